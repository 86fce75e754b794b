//! SNR-proxy ranking with greedy spatially diverse selection.

use super::distortion::distortion;
use crate::channel::{channel_gain, effective_path_loss_db, link_geometry, ChannelParams};
use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::scenario::UserTerminal;

/// Each relaxation round shrinks the separation by this factor.
pub const RELAX_FACTOR: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrpParams {
    pub channel: ChannelParams,
    pub altitude_m: f64,
    pub mu_pr: f64,
    pub mu_nr: f64,
    pub min_separation_m: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnrpOutcome {
    pub centroids: Vec<Point2>,
    /// Indices into the candidate list, in selection order.
    pub selected: Vec<usize>,
    /// Separation in force when the last centroid was taken.
    pub final_separation_m: f64,
    pub distortion: f64,
}

/// `sum_k w_k 10^{-L(v, k) / 10}` with unit fading; priority users weigh `mu_pr`.
pub fn snr_proxy(at: Point2, users: &[UserTerminal], p: &SnrpParams) -> Result<f64> {
    let uav = at.at_height(p.altitude_m);
    users.iter().try_fold(0.0, |acc, u| {
        let geom = link_geometry(uav, u.position.at_height(0.0))?;
        let w = if u.is_priority() { p.mu_pr } else { p.mu_nr };
        Ok(acc + w * channel_gain(effective_path_loss_db(&geom, &p.channel), 1.0))
    })
}

/// Ranks candidates by proxy score (ties by index) and takes them greedily
/// while keeping every pair at least the separation apart, relaxing the
/// separation by [`RELAX_FACTOR`] whenever a pass ends short of `m`.
pub fn snrp_condense(
    candidates: &[Point2],
    m: usize,
    users: &[UserTerminal],
    p: &SnrpParams,
) -> Result<SnrpOutcome> {
    if m == 0 {
        return Err(Error::NoCentroids);
    }
    if m > candidates.len() {
        return Err(Error::invalid(
            "condense.centroids",
            "must not exceed candidate count",
        ));
    }
    let scores = candidates
        .iter()
        .map(|&c| snr_proxy(c, users, p))
        .collect::<Result<Vec<f64>>>()?;
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));

    let mut taken = vec![false; candidates.len()];
    let mut selected: Vec<usize> = Vec::with_capacity(m);
    let mut sep = p.min_separation_m;
    loop {
        let sep2 = sep * sep;
        for &i in &order {
            if selected.len() == m {
                break;
            }
            if taken[i] {
                continue;
            }
            let c = candidates[i];
            if selected.iter().all(|&s| candidates[s].dist2(c) >= sep2) {
                taken[i] = true;
                selected.push(i);
            }
        }
        if selected.len() == m {
            break;
        }
        sep *= RELAX_FACTOR;
    }

    let centroids: Vec<Point2> = selected.iter().map(|&i| candidates[i]).collect();
    Ok(SnrpOutcome {
        distortion: distortion(candidates, &centroids)?,
        centroids,
        selected,
        final_separation_m: sep,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ChannelConfig;
    use crate::scenario::UserClass;

    fn params(sep: f64) -> SnrpParams {
        SnrpParams {
            channel: ChannelParams::from_config(&ChannelConfig::default()),
            altitude_m: 100.0,
            mu_pr: 40.0,
            mu_nr: 1.0,
            min_separation_m: sep,
        }
    }

    fn user(id: usize, x: f64, y: f64, prio: bool) -> UserTerminal {
        UserTerminal {
            id,
            position: Point2::new(x, y),
            class: if prio {
                UserClass::Priority
            } else {
                UserClass::Regular
            },
        }
    }

    fn grid(side: usize, spacing: f64) -> Vec<Point2> {
        (0..side * side)
            .map(|i| Point2::new((i % side) as f64 * spacing, (i / side) as f64 * spacing))
            .collect()
    }

    #[test]
    fn single_user_picks_nearest_candidates() {
        let v = grid(10, 100.0);
        let u = [user(0, 430.0, 380.0, false)];
        let out = snrp_condense(&v, 6, &u, &params(0.0)).unwrap();
        let mut by_dist: Vec<usize> = (0..v.len()).collect();
        by_dist.sort_by(|&a, &b| {
            v[a].dist2(u[0].position)
                .total_cmp(&v[b].dist2(u[0].position))
                .then(a.cmp(&b))
        });
        let mut got = out.selected.clone();
        got.sort();
        let mut want = by_dist[..6].to_vec();
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn separation_holds_under_concentrated_users() {
        let v = grid(20, 50.0);
        let users: Vec<UserTerminal> = (0..10).map(|i| user(i, 500.0, 500.0, i % 2 == 0)).collect();
        let out = snrp_condense(&v, 8, &users, &params(200.0)).unwrap();
        assert_eq!(out.final_separation_m, 200.0);
        for (i, &a) in out.centroids.iter().enumerate() {
            for &b in &out.centroids[..i] {
                assert!(a.dist(b) >= 200.0);
            }
        }
    }

    #[test]
    fn relaxes_when_the_area_cannot_fit_the_separation() {
        let v = grid(5, 10.0);
        let users = [user(0, 20.0, 20.0, true)];
        let out = snrp_condense(&v, 20, &users, &params(30.0)).unwrap();
        assert_eq!(out.centroids.len(), 20);
        assert!(out.final_separation_m < 30.0);
        let mut uniq = out.selected.clone();
        uniq.sort();
        uniq.dedup();
        assert_eq!(uniq.len(), 20);
    }

    /// Re-derives the greedy choice from scratch each round: best remaining
    /// feasible candidate by score, relaxing the separation when none fits.
    fn greedy_oracle(v: &[Point2], m: usize, users: &[UserTerminal], p: &SnrpParams) -> Vec<usize> {
        let score: Vec<f64> = v.iter().map(|&c| snr_proxy(c, users, p).unwrap()).collect();
        let mut chosen: Vec<usize> = Vec::new();
        let mut sep = p.min_separation_m;
        while chosen.len() < m {
            let fits =
                |i: usize| !chosen.contains(&i) && chosen.iter().all(|&j| v[i].dist(v[j]) >= sep);
            let pick = (0..v.len())
                .filter(|&i| fits(i))
                .max_by(|&a, &b| score[a].total_cmp(&score[b]).then(b.cmp(&a)));
            match pick {
                Some(i) => chosen.push(i),
                None => sep *= RELAX_FACTOR,
            }
        }
        chosen
    }

    #[test]
    fn uniform_users_match_greedy_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(50);
        let v: Vec<Point2> = (0..50)
            .map(|_| Point2::new(rng.random_range(0.0..1000.0), rng.random_range(0.0..1000.0)))
            .collect();
        let users: Vec<UserTerminal> = (0..60)
            .map(|i| {
                user(
                    i,
                    rng.random_range(0.0..1000.0),
                    rng.random_range(0.0..1000.0),
                    i < 12,
                )
            })
            .collect();
        for (m, sep) in [(8, 150.0), (20, 200.0), (33, 100.0)] {
            let p = params(sep);
            let out = snrp_condense(&v, m, &users, &p).unwrap();
            let mut got = out.selected.clone();
            let mut want = greedy_oracle(&v, m, &users, &p);
            got.sort();
            want.sort();
            assert_eq!(got, want, "m={m} sep={sep}");
        }
    }

    #[test]
    fn priority_users_pull_the_ranking() {
        let v = [Point2::new(0.0, 0.0), Point2::new(900.0, 0.0)];
        let users = [user(0, 0.0, 0.0, false), user(1, 900.0, 0.0, true)];
        let out = snrp_condense(&v, 1, &users, &params(0.0)).unwrap();
        assert_eq!(out.selected, vec![1]);
    }
}
