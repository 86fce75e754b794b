//! Per-slot uplink radio layer: open-loop power control, max-received-power
//! association, inter-cell interference, SINR, rate and outage statistics.

use serde::{Deserialize, Serialize};

use crate::channel::{channel_gain, db_to_linear, dbm_to_watts};
use crate::config::RadioConfig;

/// Dense row-major `rows x cols` table; rows are users, columns are ABSs.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }
}

/// Radio constants in the units the per-slot math uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    pub p_max_dbm: f64,
    pub p0_dbm: f64,
    pub alpha_ol: f64,
    pub resource_blocks: u32,
    pub noise_w: f64,
    pub bandwidth_hz: f64,
    pub threshold: f64,
}

impl RadioParams {
    pub fn from_config(r: &RadioConfig) -> Self {
        Self {
            p_max_dbm: r.p_max_dbm,
            p0_dbm: r.p0_dbm,
            alpha_ol: r.alpha_ol,
            resource_blocks: r.resource_blocks,
            noise_w: dbm_to_watts(r.noise_dbm),
            bandwidth_hz: r.bandwidth_hz,
            threshold: db_to_linear(r.sinr_threshold_db),
        }
    }

    pub fn p_max_w(&self) -> f64 {
        dbm_to_watts(self.p_max_dbm)
    }
}

/// Open-loop transmit power `min{P_max, P0 + alpha PL + 10 log10 RB}` in dBm.
pub fn tx_power_dbm(pl_serving_db: f64, p: &RadioParams) -> f64 {
    let wanted =
        p.p0_dbm + p.alpha_ol * pl_serving_db + 10.0 * f64::from(p.resource_blocks).log10();
    wanted.min(p.p_max_dbm)
}

/// Row-wise argmax; ties go to the lowest ABS index.
pub fn associate(rx_power: &Matrix) -> Vec<usize> {
    (0..rx_power.rows())
        .map(|k| argmax(rx_power.row(k)))
        .collect()
}

/// Index of the largest entry, first one on ties.
pub(crate) fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = i;
        }
    }
    best
}

/// Index of the smallest entry, first one on ties.
pub(crate) fn argmin(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate().skip(1) {
        if v < row[best] {
            best = i;
        }
    }
    best
}

/// Everything the radio layer knows about one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkState {
    /// Linear gains, users x ABSs.
    pub gains: Matrix,
    /// Transmit powers, W.
    pub tx_power: Vec<f64>,
    pub assoc: Vec<usize>,
    /// Aggregate interference seen at each ABS from users it does not serve, W.
    pub abs_interference: Vec<f64>,
    pub sinr: Vec<f64>,
    pub rate: Vec<f64>,
    pub outage: Vec<bool>,
}

impl LinkState {
    /// Associates, then evaluates interference, SINR, rate and outage for
    /// fixed gains and transmit powers.
    ///
    /// All users served by ABS `n` see the same interference: the sum of
    /// `p_j g_{j,n}` over users associated elsewhere.
    pub fn evaluate(gains: Matrix, tx_power: Vec<f64>, p: &RadioParams) -> Self {
        let (k, n) = (gains.rows(), gains.cols());
        assert_eq!(tx_power.len(), k);
        let mut rx = Matrix::zeros(k, n);
        for (u, &pw) in tx_power.iter().enumerate() {
            for (dst, &g) in rx.row_mut(u).iter_mut().zip(gains.row(u)) {
                *dst = pw * g;
            }
        }
        let assoc = associate(&rx);

        let mut abs_interference = vec![0.0; n];
        for (u, &serving) in assoc.iter().enumerate() {
            for (abs, acc) in abs_interference.iter_mut().enumerate() {
                if serving != abs {
                    *acc += rx.get(u, abs);
                }
            }
        }

        let sinr: Vec<f64> = (0..k)
            .map(|u| rx.get(u, assoc[u]) / (p.noise_w + abs_interference[assoc[u]]))
            .collect();
        let rate = sinr.iter().map(|&g| rate(g, p.bandwidth_hz)).collect();
        let outage = sinr.iter().map(|&g| g < p.threshold).collect();

        Self {
            gains,
            tx_power,
            assoc,
            abs_interference,
            sinr,
            rate,
            outage,
        }
    }

    pub fn num_users(&self) -> usize {
        self.tx_power.len()
    }

    pub fn num_abs(&self) -> usize {
        self.gains.cols()
    }

    /// `|U_n|` for every ABS.
    pub fn served_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_abs()];
        for &a in &self.assoc {
            counts[a] += 1;
        }
        counts
    }
}

/// Interference at user `i`'s serving ABS from users associated elsewhere.
pub fn interference(i: usize, state: &LinkState) -> f64 {
    state.abs_interference[state.assoc[i]]
}

pub fn sinr(i: usize, state: &LinkState, noise_w: f64) -> f64 {
    let n = state.assoc[i];
    state.tx_power[i] * state.gains.get(i, n) / (noise_w + interference(i, state))
}

pub fn rate(sinr: f64, bandwidth_hz: f64) -> f64 {
    bandwidth_hz * (1.0 + sinr).log2()
}

/// Per-slot outage indicators means.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OutageStats {
    /// Outage fraction among the users each ABS serves; 0 for an empty cell.
    pub per_abs: Vec<f64>,
    pub network: f64,
    pub priority: f64,
    pub regular: f64,
}

/// Outage fractions for one slot. An empty class or cell contributes 0.
pub fn outage_stats(state: &LinkState, priority: &[bool]) -> OutageStats {
    let k = state.num_users();
    assert_eq!(priority.len(), k);
    let n = state.num_abs();
    let mut served = vec![0usize; n];
    let mut served_out = vec![0usize; n];
    let (mut pr, mut pr_out, mut nr_out) = (0usize, 0usize, 0usize);
    for u in 0..k {
        let out = state.outage[u];
        served[state.assoc[u]] += 1;
        served_out[state.assoc[u]] += usize::from(out);
        if priority[u] {
            pr += 1;
            pr_out += usize::from(out);
        } else {
            nr_out += usize::from(out);
        }
    }
    let nr = k - pr;
    OutageStats {
        per_abs: served
            .iter()
            .zip(&served_out)
            .map(|(&s, &o)| ratio(o, s))
            .collect(),
        network: ratio(pr_out + nr_out, k),
        priority: ratio(pr_out, pr),
        regular: ratio(nr_out, nr),
    }
}

pub(crate) fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Radio inputs for one slot given the UAVs' current large-scale losses.
///
/// `path_loss_db` and `fading` are users x ABSs. Power control targets the
/// ABS in `serving` when given (the previous slot's association) and the
/// lowest-loss ABS otherwise.
pub fn evaluate_slot(
    path_loss_db: &Matrix,
    fading: &Matrix,
    serving: Option<&[usize]>,
    p: &RadioParams,
) -> LinkState {
    let (k, n) = (path_loss_db.rows(), path_loss_db.cols());
    let mut gains = Matrix::zeros(k, n);
    let mut tx_power = Vec::with_capacity(k);
    for u in 0..k {
        let pl = path_loss_db.row(u);
        let target = serving.map_or_else(|| argmin(pl), |s| s[u]);
        tx_power.push(dbm_to_watts(tx_power_dbm(pl[target], p)));
        for (abs, g) in gains.row_mut(u).iter_mut().enumerate() {
            *g = channel_gain(pl[abs], fading.get(u, abs));
        }
    }
    LinkState::evaluate(gains, tx_power, p)
}
