//! The condensed waypoint graph and its CSV form.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::Method;
use crate::error::{Error, Result};
use crate::geom::Point2;

/// Tolerance on the step-radius test so spacings of exactly `v_max dt` count as edges.
pub const RADIUS_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondensedGraph {
    pub method: Method,
    pub centroids: Vec<Point2>,
    /// Sorted neighbour lists; every node lists itself (hover).
    pub neighbors: Vec<Vec<usize>>,
    /// Bridging edges added only to connect components, stored with `a < b`.
    pub virtual_edges: Vec<(usize, usize)>,
    pub distortion: f64,
}

impl CondensedGraph {
    pub fn len(&self) -> usize {
        self.centroids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centroids.is_empty()
    }

    pub fn neighbors(&self, s: usize) -> Result<&[usize]> {
        self.neighbors
            .get(s)
            .map(Vec::as_slice)
            .ok_or(Error::UnknownCentroid(s))
    }

    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors
            .get(a)
            .is_some_and(|n| n.binary_search(&b).is_ok())
    }

    pub fn is_virtual(&self, a: usize, b: usize) -> bool {
        let key = (a.min(b), a.max(b));
        self.virtual_edges.binary_search(&key).is_ok()
    }

    /// Number of connected components over all edges, virtual included.
    pub fn components(&self) -> usize {
        let mut dsu = Dsu::new(self.len());
        for (a, ns) in self.neighbors.iter().enumerate() {
            for &b in ns {
                dsu.union(a, b);
            }
        }
        dsu.count()
    }

    /// `id,x,y` rows.
    pub fn centroids_csv(&self) -> String {
        let mut out = String::from("id,x,y\n");
        for (i, c) in self.centroids.iter().enumerate() {
            writeln!(out, "{i},{},{}", fmt_f64(c.x), fmt_f64(c.y)).unwrap();
        }
        out
    }

    /// `src,dst,virtual` rows, one per undirected edge with `src < dst`;
    /// hover self-loops are implied and not listed.
    pub fn edges_csv(&self) -> String {
        let mut out = String::from("src,dst,virtual\n");
        for (a, ns) in self.neighbors.iter().enumerate() {
            for &b in ns.iter().filter(|&&b| b > a) {
                writeln!(out, "{a},{b},{}", u8::from(self.is_virtual(a, b))).unwrap();
            }
        }
        out
    }

    /// Rebuilds a graph from the two CSV tables written by
    /// [`centroids_csv`](Self::centroids_csv) and [`edges_csv`](Self::edges_csv).
    pub fn from_csv(method: Method, centroids: &str, edges: &str) -> Result<Self> {
        let mut pts = Vec::new();
        for (line, fields) in csv_rows(centroids, "centroids", &["id", "x", "y"])? {
            let id: usize = parse(&fields[0], "centroids", line)?;
            if id != pts.len() {
                return Err(format_err("centroids", line, "ids must be 0..M in order"));
            }
            pts.push(Point2::new(
                parse(&fields[1], "centroids", line)?,
                parse(&fields[2], "centroids", line)?,
            ));
        }
        let m = pts.len();
        let mut neighbors: Vec<Vec<usize>> = (0..m).map(|i| vec![i]).collect();
        let mut virtual_edges = Vec::new();
        for (line, fields) in csv_rows(edges, "edges", &["src", "dst", "virtual"])? {
            let a: usize = parse(&fields[0], "edges", line)?;
            let b: usize = parse(&fields[1], "edges", line)?;
            let v: u8 = parse(&fields[2], "edges", line)?;
            if a >= m || b >= m || a == b {
                return Err(format_err("edges", line, "endpoint out of range"));
            }
            neighbors[a].push(b);
            neighbors[b].push(a);
            if v == 1 {
                virtual_edges.push((a.min(b), a.max(b)));
            }
        }
        for ns in &mut neighbors {
            ns.sort_unstable();
            ns.dedup();
        }
        virtual_edges.sort_unstable();
        virtual_edges.dedup();
        let distortion = f64::NAN;
        Ok(Self {
            method,
            centroids: pts,
            neighbors,
            virtual_edges,
            distortion,
        })
    }
}

/// Disk-graph adjacency with radius `step_radius` plus hover self-loops.
/// Disconnected components are joined by repeatedly adding the shortest
/// edge between two different components; those edges are flagged virtual.
pub fn build_adjacency(
    method: Method,
    centroids: Vec<Point2>,
    step_radius: f64,
    distortion: f64,
) -> CondensedGraph {
    let m = centroids.len();
    let r2 = step_radius * step_radius * (1.0 + RADIUS_SLACK);
    let mut neighbors: Vec<Vec<usize>> = (0..m).map(|i| vec![i]).collect();
    let mut dsu = Dsu::new(m);
    for a in 0..m {
        for b in a + 1..m {
            if centroids[a].dist2(centroids[b]) <= r2 {
                neighbors[a].push(b);
                neighbors[b].push(a);
                dsu.union(a, b);
            }
        }
    }

    let mut virtual_edges = Vec::new();
    while dsu.count() > 1 {
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..m {
            for b in a + 1..m {
                if dsu.find(a) != dsu.find(b) {
                    let d = centroids[a].dist2(centroids[b]);
                    if best.is_none_or(|(bd, _, _)| d < bd) {
                        best = Some((d, a, b));
                    }
                }
            }
        }
        let (_, a, b) = best.expect("two components imply a cross pair");
        neighbors[a].push(b);
        neighbors[b].push(a);
        virtual_edges.push((a, b));
        dsu.union(a, b);
    }

    for ns in &mut neighbors {
        ns.sort_unstable();
    }
    virtual_edges.sort_unstable();
    CondensedGraph {
        method,
        centroids,
        neighbors,
        virtual_edges,
        distortion,
    }
}

/// Round-trip float formatting (17 significant digits).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn csv_rows(
    text: &str,
    what: &'static str,
    header: &[&str],
) -> Result<Vec<(usize, Vec<String>)>> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, head) = lines
        .next()
        .ok_or_else(|| format_err(what, 1, "missing header"))?;
    let cols: Vec<&str> = head.split(',').map(str::trim).collect();
    if cols != header {
        return Err(format_err(
            what,
            1,
            format!("expected header {}", header.join(",")),
        ));
    }
    lines
        .map(|(i, l)| {
            let fields: Vec<String> = l.split(',').map(|f| f.trim().to_string()).collect();
            if fields.len() != header.len() {
                Err(format_err(what, i + 1, "wrong field count"))
            } else {
                Ok((i + 1, fields))
            }
        })
        .collect()
}

pub(crate) fn parse<T: std::str::FromStr>(s: &str, what: &'static str, line: usize) -> Result<T> {
    s.parse()
        .map_err(|_| format_err(what, line, format!("cannot parse `{s}`")))
}

pub(crate) fn format_err(what: &'static str, line: usize, reason: impl Into<String>) -> Error {
    Error::Format {
        what,
        line,
        reason: reason.into(),
    }
}

struct Dsu {
    parent: Vec<usize>,
    count: usize,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            count: n,
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
            self.count -= 1;
        }
    }

    fn count(&self) -> usize {
        self.count
    }
}
