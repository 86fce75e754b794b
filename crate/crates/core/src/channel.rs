//! Air-to-ground channel: elevation-dependent LoS probability, effective
//! path loss, unit-mean exponential fading and the resulting linear gain.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::config::ChannelConfig;
use crate::error::{Error, Result};
use crate::geom::Point3;

/// Channel constants with the excess losses already converted to linear factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub b1: f64,
    pub b2: f64,
    pub xi_deg: f64,
    pub alpha: f64,
    pub kappa_los: f64,
    pub kappa_nlos: f64,
    pub k0: f64,
}

impl ChannelParams {
    pub fn from_config(c: &ChannelConfig) -> Self {
        Self {
            b1: c.b1,
            b2: c.b2,
            xi_deg: c.xi_deg,
            alpha: c.path_loss_exponent,
            kappa_los: db_to_linear(c.kappa_los_db),
            kappa_nlos: db_to_linear(c.kappa_nlos_db),
            k0: c.k0(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    /// 3-D distance, m.
    pub distance: f64,
    /// Elevation angle seen from the user, degrees.
    pub elevation_deg: f64,
}

pub fn link_geometry(uav: Point3, user: Point3) -> Result<LinkGeometry> {
    let h = uav.z - user.z;
    if h <= 0.0 {
        return Err(Error::ZeroAltitude);
    }
    let distance = uav.dist(user);
    let elevation_deg = (h / distance).min(1.0).asin().to_degrees();
    Ok(LinkGeometry {
        distance,
        elevation_deg,
    })
}

/// `[b1 (theta - xi)]^b2` clamped to `[0, 1]`. A non-positive base maps to 0.
pub fn los_probability(geom: &LinkGeometry, p: &ChannelParams) -> f64 {
    let base = p.b1 * (geom.elevation_deg - p.xi_deg);
    if base <= 0.0 {
        return 0.0;
    }
    base.powf(p.b2).min(1.0)
}

pub fn effective_path_loss_db(geom: &LinkGeometry, p: &ChannelParams) -> f64 {
    let p_los = los_probability(geom, p);
    let excess = p_los * p.kappa_los + (1.0 - p_los) * p.kappa_nlos;
    10.0 * p.k0.log10() + 10.0 * p.alpha * geom.distance.log10() + 10.0 * excess.log10()
}

/// One `|f|^2 ~ Exp(1)` small-scale power draw.
pub fn sample_fading<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

pub fn channel_gain(loss_db: f64, fading: f64) -> f64 {
    10f64.powf(-loss_db / 10.0) * fading
}

#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[inline]
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn params() -> ChannelParams {
        ChannelParams::from_config(&ChannelConfig::default())
    }

    fn geom_at(elevation_deg: f64, distance: f64) -> LinkGeometry {
        LinkGeometry {
            distance,
            elevation_deg,
        }
    }

    #[test]
    fn geometry_cases() {
        let g = link_geometry(Point3::new(0.0, 0.0, 100.0), Point3::default()).unwrap();
        assert_abs_diff_eq!(g.distance, 100.0);
        assert_abs_diff_eq!(g.elevation_deg, 90.0);

        let g = link_geometry(Point3::new(0.0, 0.0, 100.0), Point3::new(100.0, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(g.distance, 100.0 * 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(g.elevation_deg, 45.0, epsilon = 1e-12);

        let g = link_geometry(
            Point3::new(500.0, 500.0, 100.0),
            Point3::new(525.0, 525.0, 0.0),
        )
        .unwrap();
        // sqrt(25^2 + 25^2 + 100^2) and asin(100 / d), computed by hand.
        assert_abs_diff_eq!(g.distance, 106.0660, epsilon = 1e-4);
        assert_abs_diff_eq!(g.elevation_deg, 70.5288, epsilon = 1e-4);
    }

    #[test]
    fn ground_level_uav_is_rejected() {
        assert!(matches!(
            link_geometry(Point3::new(0.0, 0.0, 0.0), Point3::new(5.0, 0.0, 0.0)),
            Err(Error::ZeroAltitude)
        ));
    }

    #[test]
    fn los_probability_cases() {
        let p = params();
        assert_eq!(los_probability(&geom_at(90.0, 100.0), &p), 1.0);
        assert_eq!(los_probability(&geom_at(5.0, 100.0), &p), 0.0);
        assert_abs_diff_eq!(
            los_probability(&geom_at(7.0, 100.0), &p),
            0.2,
            epsilon = 1e-12
        );
        let frac = ChannelParams { b2: 0.5, ..p };
        assert_eq!(los_probability(&geom_at(3.0, 100.0), &frac), 0.0);
    }

    #[test]
    fn pure_los_loss() {
        let p = params();
        let g = geom_at(90.0, 100.0);
        let expected = 10.0 * p.k0.log10() + 10.0 * 2.0 * 100f64.log10() + 1.0;
        assert_abs_diff_eq!(effective_path_loss_db(&g, &p), expected, epsilon = 1e-12);
        // Free-space reference at 2 GHz: 20 log10(4 pi f / c) = 38.4684 dB.
        assert_abs_diff_eq!(
            effective_path_loss_db(&g, &p),
            38.4684 + 40.0 + 1.0,
            epsilon = 1e-3
        );
    }

    #[test]
    fn mixed_los_excess() {
        let p = params();
        let g = geom_at(7.0, 100.0);
        let base = 10.0 * p.k0.log10() + 40.0;
        let excess = 10.0 * (0.2 * 10f64.powf(0.1) + 0.8 * 100.0).log10();
        assert_abs_diff_eq!(excess, 19.0445, epsilon = 1e-4);
        assert_abs_diff_eq!(
            effective_path_loss_db(&g, &p),
            base + excess,
            epsilon = 1e-12
        );
    }

    #[test]
    fn gain_cases() {
        assert_abs_diff_eq!(channel_gain(80.0, 1.0), 1e-8, epsilon = 1e-22);
        assert_eq!(channel_gain(80.0, 0.0), 0.0);
        assert_abs_diff_eq!(channel_gain(79.46, 2.0), 2.2648e-8, epsilon = 1e-12);
    }

    #[test]
    fn fading_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut above_median = 0usize;
        for _ in 0..n {
            let f = sample_fading(&mut rng);
            sum += f;
            if f > std::f64::consts::LN_2 {
                above_median += 1;
            }
        }
        let mean = sum / n as f64;
        assert!((0.995..=1.005).contains(&mean), "mean {mean}");
        let frac = above_median as f64 / n as f64;
        assert!((frac - 0.5).abs() <= 0.002, "frac {frac}");
    }

    #[test]
    fn fading_is_reproducible() {
        let a: Vec<f64> = {
            let mut r = ChaCha8Rng::seed_from_u64(4);
            (0..16).map(|_| sample_fading(&mut r)).collect()
        };
        let mut r = ChaCha8Rng::seed_from_u64(4);
        let b: Vec<f64> = (0..16).map(|_| sample_fading(&mut r)).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn mean_gain_matches_large_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 1_000_000;
        let loss = 95.0;
        let mean: f64 = (0..n)
            .map(|_| channel_gain(loss, sample_fading(&mut rng)))
            .sum::<f64>()
            / n as f64;
        let target = 10f64.powf(-loss / 10.0);
        assert!((mean / target - 1.0).abs() < 0.01);
    }

    proptest! {
        #[test]
        fn los_probability_is_a_probability(
            theta in 1e-6f64..=90.0, b1 in 1e-4f64..10.0, b2 in 1e-3f64..5.0, xi in -20.0f64..40.0,
        ) {
            let p = ChannelParams { b1, b2, xi_deg: xi, ..params() };
            let v = los_probability(&geom_at(theta, 100.0), &p);
            prop_assert!((0.0..=1.0).contains(&v));
        }

        #[test]
        fn loss_grows_with_distance(theta in 1.0f64..=90.0, d in 1.0f64..5000.0, extra in 1e-3f64..1000.0) {
            let p = params();
            prop_assert!(
                effective_path_loss_db(&geom_at(theta, d + extra), &p)
                    > effective_path_loss_db(&geom_at(theta, d), &p)
            );
        }

        #[test]
        fn gain_is_linear_in_fading(loss in 40.0f64..160.0, f in 1e-6f64..20.0, s in 1e-3f64..100.0) {
            let g = channel_gain(loss, f);
            prop_assert!(g > 0.0);
            prop_assert!((channel_gain(loss, f * s) / (g * s) - 1.0).abs() < 1e-12);
        }
    }
}
