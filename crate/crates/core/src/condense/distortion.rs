use crate::error::{Error, Result};
use crate::geom::Point2;

/// `sum_i min_j |v_i - c_j|^2`.
pub fn distortion(points: &[Point2], centroids: &[Point2]) -> Result<f64> {
    if centroids.is_empty() {
        return Err(Error::NoCentroids);
    }
    Ok(points
        .iter()
        .map(|&p| {
            centroids
                .iter()
                .map(|&c| p.dist2(c))
                .fold(f64::INFINITY, f64::min)
        })
        .sum())
}

/// Nearest-centroid assignment kept in sync with single-centroid moves.
///
/// Moving centroid `j` only changes the terms of points currently assigned
/// to `j` or points that the new position captures, so a trial move costs
/// one pass over the points plus a full rescan only for the orphaned ones,
/// instead of a full `N0 x M` recomputation.
#[derive(Debug, Clone)]
pub struct IncrementalDistortion<'a> {
    points: &'a [Point2],
    centroids: Vec<Point2>,
    nearest: Vec<usize>,
    d2: Vec<f64>,
    total: f64,
    pending: Vec<(usize, usize, f64)>,
    evals: u64,
}

/// Outcome of a trial move, to be committed or dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialMove {
    pub centroid: usize,
    pub to: Point2,
    pub delta: f64,
}

impl<'a> IncrementalDistortion<'a> {
    pub fn new(points: &'a [Point2], centroids: Vec<Point2>) -> Result<Self> {
        if centroids.is_empty() {
            return Err(Error::NoCentroids);
        }
        let mut this = Self {
            points,
            nearest: vec![0; points.len()],
            d2: vec![0.0; points.len()],
            centroids,
            total: 0.0,
            pending: Vec::new(),
            evals: 0,
        };
        this.reassign_all();
        Ok(this)
    }

    fn reassign_all(&mut self) {
        let mut total = 0.0;
        for (i, &p) in self.points.iter().enumerate() {
            let (j, d) = nearest_of(p, &self.centroids);
            self.nearest[i] = j;
            self.d2[i] = d;
            total += d;
        }
        self.evals += (self.points.len() * self.centroids.len()) as u64;
        self.total = total;
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn centroids(&self) -> &[Point2] {
        &self.centroids
    }

    /// Point-to-centroid distance evaluations performed so far.
    pub fn evaluations(&self) -> u64 {
        self.evals
    }

    /// Distortion change if centroid `j` moved to `to`. The assignment
    /// changes are staged until [`commit`](Self::commit).
    pub fn trial(&mut self, j: usize, to: Point2) -> TrialMove {
        self.pending.clear();
        let mut delta = 0.0;
        for (i, &p) in self.points.iter().enumerate() {
            let dn = p.dist2(to);
            self.evals += 1;
            if self.nearest[i] == j {
                if dn <= self.d2[i] {
                    delta += dn - self.d2[i];
                    self.pending.push((i, j, dn));
                } else {
                    // Orphaned: its best may now be another centroid.
                    let (mut bj, mut bd) = (j, dn);
                    for (c, &q) in self.centroids.iter().enumerate() {
                        if c != j {
                            let d = p.dist2(q);
                            if d < bd || (d == bd && c < bj) {
                                bj = c;
                                bd = d;
                            }
                        }
                    }
                    self.evals += (self.centroids.len() - 1) as u64;
                    delta += bd - self.d2[i];
                    self.pending.push((i, bj, bd));
                }
            } else if dn < self.d2[i] {
                delta += dn - self.d2[i];
                self.pending.push((i, j, dn));
            }
        }
        TrialMove {
            centroid: j,
            to,
            delta,
        }
    }

    pub fn commit(&mut self, mv: TrialMove) {
        self.centroids[mv.centroid] = mv.to;
        for &(i, j, d) in &self.pending {
            self.nearest[i] = j;
            self.d2[i] = d;
        }
        self.total += mv.delta;
        self.pending.clear();
    }

    /// Recomputes the total from scratch, removing accumulated rounding.
    pub fn resync(&mut self) {
        self.reassign_all();
    }
}

pub(crate) fn nearest_of(p: Point2, centroids: &[Point2]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, &c) in centroids.iter().enumerate() {
        let d = p.dist2(c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}
