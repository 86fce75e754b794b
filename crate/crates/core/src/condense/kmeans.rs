//! Lloyd's k-means over the candidate nodes.

use rand::seq::index;
use rand::Rng;

use super::distortion::{distortion, nearest_of};
use crate::error::{Error, Result};
use crate::geom::Point2;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansOutcome {
    pub centroids: Vec<Point2>,
    pub distortion: f64,
    pub iterations: usize,
    /// Distortion after each assignment step.
    pub trace: Vec<f64>,
}

/// Lloyd iterations from `m` distinct random candidates. An empty cluster
/// takes over the point farthest from its current centroid.
pub fn kmeans_condense<R: Rng + ?Sized>(
    points: &[Point2],
    m: usize,
    iters: usize,
    rng: &mut R,
) -> Result<KMeansOutcome> {
    if m == 0 {
        return Err(Error::NoCentroids);
    }
    if m > points.len() {
        return Err(Error::invalid(
            "condense.centroids",
            "must not exceed candidate count",
        ));
    }
    let mut centroids: Vec<Point2> = index::sample(rng, points.len(), m)
        .into_iter()
        .map(|i| points[i])
        .collect();
    let mut assign = vec![usize::MAX; points.len()];
    let mut d2 = vec![0.0; points.len()];
    let mut trace = Vec::new();
    let mut iterations = 0;

    for _ in 0..iters.max(1) {
        iterations += 1;
        let mut changed = false;
        for (i, &p) in points.iter().enumerate() {
            let (j, d) = nearest_of(p, &centroids);
            changed |= assign[i] != j;
            assign[i] = j;
            d2[i] = d;
        }
        trace.push(d2.iter().sum());

        let mut sums = vec![(0.0, 0.0, 0usize); m];
        for (i, &p) in points.iter().enumerate() {
            let s = &mut sums[assign[i]];
            s.0 += p.x;
            s.1 += p.y;
            s.2 += 1;
        }
        for (j, &(sx, sy, n)) in sums.iter().enumerate() {
            if n > 0 {
                centroids[j] = Point2::new(sx / n as f64, sy / n as f64);
            }
        }
        for j in 0..m {
            if sums[j].2 == 0 {
                // Steal the worst-represented point; zero its cost so the next
                // empty cluster picks a different one.
                let far = (0..points.len())
                    .max_by(|&a, &b| d2[a].total_cmp(&d2[b]).then(b.cmp(&a)))
                    .expect("points is nonempty");
                centroids[j] = points[far];
                d2[far] = 0.0;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    Ok(KMeansOutcome {
        distortion: distortion(points, &centroids)?,
        centroids,
        iterations,
        trace,
    })
}
