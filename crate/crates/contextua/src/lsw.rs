//! Quantum bounds on the average anti-correlation `R3` and the violation of
//! the LSW inequality.
//!
//! For three pairwise jointly measurable unbiased observables of equal
//! sharpness `η`, writing `λi·λj = η² x_k` for the opposite-index cosine,
//! the per-pair anti-correlation optimum contributes
//! `pair_bound(x) = 1 - η²x + sqrt(1 - 2η² + η⁴x²)` (twice the pair value),
//! and the maximum of `R3` reduces to maximizing
//! `triple_bound(x) = 2 pair_bound(x) + pair_bound(2x² - 1)` over
//! `x ∈ [-1, 0]`, attained either at the trine configuration `x = -1/2` or
//! the antiparallel one `x = -1`. The closed form is
//!
//! ```text
//! R3 <= 1/2 + η²/4 + (1/2) sqrt(1 - 2η² + η⁴/4)   for η² <= 0.3
//! R3 <= 1 - η²/3                                   for η² >= 0.3
//! ```
//!
//! The classical (noncontextual) ceiling is `1 - η/3`, so the violation
//! `δ(η)` vanishes only at `η = 0, 1` and peaks near `η ≈ 0.4566`.

use serde::Serialize;

use crate::bloch::{coplanar_from_angles, DEFAULT_TOL};
use crate::error::LswError;
use crate::pairwise::{max_anticorrelation, pairwise_compat};
use crate::triplewise::triplewise_compat;

/// Band inside which a slightly negative radicand is clamped to zero; the
/// domain boundaries produce exact zeros analytically.
const RADICAND_BAND: f64 = 1e-12;

/// The squared sharpness at which the closed-form maximum switches from the
/// trine configuration to the antiparallel one.
pub const REGIME_SWITCH_ETA_SQ: f64 = 0.3;

fn radicand(x: f64, eta: f64) -> f64 {
    let eta_sq = eta * eta;
    1.0 - 2.0 * eta_sq + eta_sq * eta_sq * x * x
}

fn format_intervals(intervals: &[(f64, f64)]) -> String {
    if intervals.is_empty() {
        return "(empty)".to_string();
    }
    intervals
        .iter()
        .map(|(lo, hi)| format!("[{:.6}, {:.6}]", lo, hi))
        .collect::<Vec<_>>()
        .join(" ∪ ")
}

fn domain_error(x: f64, eta: f64, rad: f64) -> LswError {
    LswError::Domain {
        x,
        eta,
        radicand: rad,
        valid: format_intervals(&valid_x_intervals(eta)),
    }
}

/// Intervals of `x` in `[-1, 0]` where [`triple_bound`] is defined.
///
/// For `η <= 1/√2` the whole interval qualifies. Beyond that the radicand
/// carves out, with `β = sqrt(2η² - 1)/η²`, the segment
/// `[-1, -sqrt((1+β)/2)]` and, while `η <= √3 - 1`, additionally
/// `[-sqrt((1-β)/2), -β]`.
pub fn valid_x_intervals(eta: f64) -> Vec<(f64, f64)> {
    let eta_sq = eta * eta;
    if 2.0 * eta_sq - 1.0 <= RADICAND_BAND {
        return vec![(-1.0, 0.0)];
    }
    let beta = (2.0 * eta_sq - 1.0).sqrt() / eta_sq;
    let mut intervals = vec![(-1.0, -((1.0 + beta) / 2.0).sqrt())];
    if eta <= 3f64.sqrt() - 1.0 {
        intervals.push((-((1.0 - beta) / 2.0).sqrt(), -beta));
    }
    intervals
}

/// Twice the maximal anti-correlation of an equal-sharpness pair with
/// `λi·λj = η² x`: `1 - η²x + sqrt(1 - 2η² + η⁴x²)`.
pub fn pair_bound(x: f64, eta: f64) -> Result<f64, LswError> {
    let rad = radicand(x, eta);
    if rad < -RADICAND_BAND {
        return Err(domain_error(x, eta, rad));
    }
    Ok(1.0 - eta * eta * x + rad.max(0.0).sqrt())
}

/// Six times the maximal `R3` of a symmetric triple with two pair cosines
/// equal to `x`: `2 pair_bound(x) + pair_bound(2x² - 1)`.
pub fn triple_bound(x: f64, eta: f64) -> Result<f64, LswError> {
    let first = pair_bound(x, eta)?;
    let third_cos = 2.0 * x * x - 1.0;
    let second =
        pair_bound(third_cos, eta).map_err(|_| domain_error(x, eta, radicand(third_cos, eta)))?;
    Ok(2.0 * first + second)
}

/// Which configuration attains the closed-form maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Trine,
    Parallel,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Trine => write!(f, "trine"),
            Regime::Parallel => write!(f, "parallel"),
        }
    }
}

/// Closed-form quantum maximum of `R3` at sharpness `eta`, with the
/// attaining regime.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundBranch {
    pub eta: f64,
    pub value: f64,
    pub regime: Regime,
}

/// Closed-form maximum of `R3` over equal-sharpness pairwise jointly
/// measurable triples; continuous across the regime switch at `η² = 0.3`.
pub fn r3_quantum_bound(eta: f64) -> BoundBranch {
    let eta_sq = eta * eta;
    if eta_sq <= REGIME_SWITCH_ETA_SQ + 1e-12 {
        let value = 0.5 + eta_sq / 4.0 + 0.5 * (1.0 - 2.0 * eta_sq + eta_sq * eta_sq / 4.0).sqrt();
        BoundBranch {
            eta,
            value,
            regime: Regime::Trine,
        }
    } else {
        BoundBranch {
            eta,
            value: 1.0 - eta_sq / 3.0,
            regime: Regime::Parallel,
        }
    }
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, x_tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > x_tol {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Numerical maximum of `triple_bound(x)/6` over the valid `x` domain:
/// a bracketing grid per valid interval followed by golden-section
/// refinement. Returns `(max value, maximizing x)`.
///
/// # Panics
/// Panics unless `0 <= eta <= 1`.
pub fn max_r3_numeric(eta: f64, grid: usize) -> (f64, f64) {
    assert!((0.0..=1.0).contains(&eta), "sharpness out of range: {eta}");
    let evaluate = |x: f64| triple_bound(x, eta).map_or(f64::NEG_INFINITY, |g| g);
    let mut best_val = f64::NEG_INFINITY;
    let mut best_x = -1.0;
    for (lo, hi) in valid_x_intervals(eta) {
        let n = grid.max(2);
        let spacing = (hi - lo) / (n - 1) as f64;
        let mut seg_val = f64::NEG_INFINITY;
        let mut seg_x = lo;
        for i in 0..n {
            let x = lo + spacing * i as f64;
            let value = evaluate(x);
            if value > seg_val {
                seg_val = value;
                seg_x = x;
            }
        }
        let (rx, rv) = golden_max(
            &evaluate,
            (seg_x - spacing).max(lo),
            (seg_x + spacing).min(hi),
            1e-9,
        );
        let (seg_x, seg_val) = if rv > seg_val {
            (rx, rv)
        } else {
            (seg_x, seg_val)
        };
        if seg_val > best_val {
            best_val = seg_val;
            best_x = seg_x;
        }
    }
    (best_val / 6.0, best_x)
}

/// One row of the violation curve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScanRow {
    pub eta: f64,
    pub classical_bound: f64,
    pub quantum_max: f64,
    pub delta: f64,
    pub regime: Regime,
}

/// Tabulated violation curve `δ(η) = quantum_max - (1 - η/3)`.
#[derive(Debug, Clone, Serialize)]
pub struct ScanResult {
    pub rows: Vec<ScanRow>,
}

impl ScanResult {
    /// Fixed 9-decimal CSV with header
    /// `eta,classical_bound,quantum_max,delta,regime`.
    pub fn to_csv(&self) -> String {
        let clean = |v: f64| if v == 0.0 { 0.0 } else { v };
        let mut out = String::from("eta,classical_bound,quantum_max,delta,regime\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{:.9},{:.9},{:.9},{:.9},{}\n",
                clean(row.eta),
                clean(row.classical_bound),
                clean(row.quantum_max),
                clean(row.delta),
                row.regime
            ));
        }
        out
    }
}

/// Tabulates the classical line `1 - η/3` and the quantum curve on an even
/// `eta` grid.
///
/// # Panics
/// Panics unless `0 <= eta_min < eta_max <= 1` and `steps >= 2`.
pub fn violation_scan(eta_min: f64, eta_max: f64, steps: usize) -> ScanResult {
    assert!(
        (0.0..1.0).contains(&eta_min) && eta_max <= 1.0 && eta_min < eta_max && steps >= 2,
        "invalid scan range"
    );
    let span = eta_max - eta_min;
    let rows = (0..steps)
        .map(|i| {
            let eta = eta_min + span * i as f64 / (steps - 1) as f64;
            let bound = r3_quantum_bound(eta);
            let classical_bound = 1.0 - eta / 3.0;
            ScanRow {
                eta,
                classical_bound,
                quantum_max: bound.value,
                delta: bound.value - classical_bound,
                regime: bound.regime,
            }
        })
        .collect();
    ScanResult { rows }
}

/// The sharpness of maximal violation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CriticalPoint {
    pub eta_c: f64,
    pub r3: f64,
    pub delta: f64,
}

/// Maximizes the violation `δ(η)` over `[0, sqrt(0.3)]` (the maximum lies on
/// the trine branch) by a bracketing grid plus golden-section refinement.
pub fn find_critical_sharpness(tol: f64) -> CriticalPoint {
    let delta = |eta: f64| r3_quantum_bound(eta).value - (1.0 - eta / 3.0);
    let hi = REGIME_SWITCH_ETA_SQ.sqrt();
    let n = 1000;
    let mut best_eta = 0.0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=n {
        let eta = hi * i as f64 / n as f64;
        let value = delta(eta);
        if value > best {
            best = value;
            best_eta = eta;
        }
    }
    let spacing = hi / n as f64;
    let (eta_c, delta_max) = golden_max(
        &delta,
        (best_eta - spacing).max(0.0),
        (best_eta + spacing).min(hi),
        tol.min(1e-9),
    );
    CriticalPoint {
        eta_c,
        r3: r3_quantum_bound(eta_c).value,
        delta: delta_max,
    }
}

/// Smallest third pair cosine compatible with a positive semidefinite Gram
/// matrix for given `x1`, `x2`: `x1 x2 - sqrt(1-x1²) sqrt(1-x2²)`.
pub fn min_third_cosine(x1: f64, x2: f64) -> f64 {
    x1 * x2 - (1.0 - x1 * x1).max(0.0).sqrt() * (1.0 - x2 * x2).max(0.0).sqrt()
}

/// The coplanar configuration at `η = 1/√2` with both outer angles `3π/4`:
/// pairwise jointly measurable, not triplewise, and still unable to violate
/// the LSW inequality.
#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub eta: f64,
    /// Criterion values `[H12, H13, H23]`.
    pub h: [f64; 3],
    pub pairwise_measurable: [bool; 3],
    pub margin: f64,
    pub triplewise_measurable: bool,
    /// Best achievable average anti-correlation `(1/3) Σ pair optima`.
    pub r3_max: f64,
    pub r3_expected: f64,
    pub classical_bound: f64,
    pub ok: bool,
}

pub fn counterexample_check() -> CounterexampleReport {
    let eta = std::f64::consts::FRAC_1_SQRT_2;
    let phi = 3.0 * std::f64::consts::PI / 4.0;
    let v = coplanar_from_angles(eta, phi, phi);
    let pairs: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

    let mut h = [0.0; 3];
    let mut pairwise_measurable = [false; 3];
    let mut r3_max = 0.0;
    for (idx, &(i, j)) in pairs.iter().enumerate() {
        let compat = pairwise_compat(v[i], v[j], DEFAULT_TOL).expect("valid sharpness");
        h[idx] = compat.h;
        pairwise_measurable[idx] = compat.measurable;
        r3_max += max_anticorrelation(v[i], v[j], DEFAULT_TOL).expect("pairwise measurable");
    }
    r3_max /= 3.0;

    let triple = triplewise_compat(v[0], v[1], v[2], DEFAULT_TOL).expect("valid sharpness");
    let r3_expected = (3.0 + 2f64.sqrt()) / 6.0;
    let classical_bound = 1.0 - eta / 3.0;
    let ok = pairwise_measurable.iter().all(|&m| m)
        && !triple.measurable
        && (r3_max - r3_expected).abs() <= 1e-9
        && r3_max < classical_bound;
    CounterexampleReport {
        eta,
        h,
        pairwise_measurable,
        margin: triple.margin,
        triplewise_measurable: triple.measurable,
        r3_max,
        r3_expected,
        classical_bound,
        ok,
    }
}

/// Quantum side of the critical point: the trine configuration in the plane
/// orthogonal to `z`, whose per-pair optima reach the closed-form bound.
pub fn trine_r3_attained(eta: f64) -> Result<f64, crate::error::JmError> {
    let t = crate::bloch::trine_vectors(eta);
    let mut total = 0.0;
    for &(i, j) in &[(0usize, 1usize), (0, 2), (1, 2)] {
        total += max_anticorrelation(t[i], t[j], DEFAULT_TOL)?;
    }
    Ok(total / 3.0)
}
