//! Noncontextual hidden-variable models with unsharp measurements.
//!
//! At a fixed hidden state the three binary observables have predetermined
//! values `A_k = ±1`, measured with local unsharpness `η_k ∈ [-1, 1]`, so a
//! single measurement responds with probability `(1 + μ η_k A_k)/2` for
//! outcome `μ`. The most general pairwise joint measurement adds a context
//! value `C_jk` per pair:
//!
//! ```text
//! χ(μ,ν) = (1 + μ η_j A_j + ν η_k A_k + μν C_jk) / 4
//! ```
//!
//! nonnegative exactly when `1 ± C_jk >= |η_j A_j ± η_k A_k|`. The three
//! pairwise contexts admit a common triplewise response function if and only
//! if `1 - |C13 - C23| >= C12 >= |C13 + C23| - 1`; the average
//! anti-correlation of any such model obeys the LSW bound
//! `R3 <= 1 - max_k η_k / 3`, whether or not the contexts are compatible.
//!
//! Hidden variables are represented as finite weighted ensembles: every
//! observable quantity is an expectation, and finite ensembles keep tests
//! exact. Local unsharpness is sampled in `[0, 1]`; a negative sign can
//! always be absorbed into the predetermined value.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::ModelError;

/// Index pairs `(1,2), (1,3), (2,3)` in zero-based form; the context values
/// of a [`HiddenState`] follow this order.
pub const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// One hidden-variable valuation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HiddenState {
    /// Predetermined values `A_k`, each +1 or -1.
    pub a: [f64; 3],
    /// Local unsharpness `η_k` in `[-1, 1]`.
    pub eta: [f64; 3],
    /// Context values `[C12, C13, C23]`.
    pub c: [f64; 3],
}

impl HiddenState {
    pub fn new(a: [f64; 3], eta: [f64; 3], c: [f64; 3]) -> Result<Self, ModelError> {
        let state = HiddenState { a, eta, c };
        state.validate()?;
        Ok(state)
    }

    /// `η_k A_k`, the effective response bias for observable `k`.
    fn biased(&self, k: usize) -> f64 {
        self.eta[k] * self.a[k]
    }

    /// Checks `A_k = ±1` and the pairwise positivity constraints
    /// `1 ± C_jk >= |η_j A_j ± η_k A_k|`.
    pub fn validate(&self) -> Result<(), ModelError> {
        for &value in &self.a {
            if value != 1.0 && value != -1.0 {
                return Err(ModelError::InvalidOutcome { value });
            }
        }
        for (idx, &(j, k)) in PAIRS.iter().enumerate() {
            let sum = (self.biased(j) + self.biased(k)).abs();
            if 1.0 + self.c[idx] < sum - 1e-9 {
                return Err(ModelError::InvalidContextValue {
                    j: j + 1,
                    k: k + 1,
                    sign: '+',
                    value: 1.0 + self.c[idx],
                    required: sum,
                });
            }
            let diff = (self.biased(j) - self.biased(k)).abs();
            if 1.0 - self.c[idx] < diff - 1e-9 {
                return Err(ModelError::InvalidContextValue {
                    j: j + 1,
                    k: k + 1,
                    sign: '-',
                    value: 1.0 - self.c[idx],
                    required: diff,
                });
            }
        }
        Ok(())
    }

    /// Context value for the pair `(j, k)` with `j != k` (order-insensitive).
    pub fn context(&self, j: usize, k: usize) -> f64 {
        let key = (j.min(k), j.max(k));
        let idx = PAIRS.iter().position(|&p| p == key).expect("valid pair");
        self.c[idx]
    }
}

/// Response probability `(1 + μ η_k A_k)/2` of a single unsharp measurement.
pub fn response_single(state: &HiddenState, k: usize, mu: f64) -> f64 {
    (1.0 + mu * state.biased(k)) / 2.0
}

/// Response probability of the pairwise joint measurement of observables
/// `j` and `k` for outcomes `(mu, nu)`.
pub fn response_pair(
    state: &HiddenState,
    j: usize,
    k: usize,
    mu: f64,
    nu: f64,
) -> Result<f64, ModelError> {
    state.validate()?;
    let c = state.context(j, k);
    Ok((1.0 + mu * state.biased(j) + nu * state.biased(k) + mu * nu * c) / 4.0)
}

/// Whether the three pairwise contexts of this hidden state are compatible:
/// `1 - |C13 - C23| >= C12 >= |C13 + C23| - 1` within `tol`.
pub fn compatibility_check(state: &HiddenState, tol: f64) -> bool {
    let [c12, c13, c23] = state.c;
    c12 <= 1.0 - (c13 - c23).abs() + tol && c12 >= (c13 + c23).abs() - 1.0 - tol
}

/// A triplewise response function over the eight outcome triples, in
/// lexicographic order with `+1` before `-1`.
#[derive(Debug, Clone, Serialize)]
pub struct TripleResponse {
    pub values: [f64; 8],
    /// The derived odd-parity context value.
    pub c: f64,
}

const SIGN_TRIPLES: [(f64, f64, f64); 8] = [
    (1.0, 1.0, 1.0),
    (1.0, 1.0, -1.0),
    (1.0, -1.0, 1.0),
    (1.0, -1.0, -1.0),
    (-1.0, 1.0, 1.0),
    (-1.0, 1.0, -1.0),
    (-1.0, -1.0, 1.0),
    (-1.0, -1.0, -1.0),
];

fn triple_value(state: &HiddenState, c: f64, signs: (f64, f64, f64)) -> f64 {
    let (mu, nu, tau) = signs;
    let [c12, c13, c23] = state.c;
    (1.0 + mu * state.biased(0)
        + nu * state.biased(1)
        + tau * state.biased(2)
        + mu * nu * c12
        + mu * tau * c13
        + nu * tau * c23
        + mu * nu * tau * c)
        / 8.0
}

impl TripleResponse {
    /// Constructs the triplewise response function for a compatible hidden
    /// state, choosing the extremal odd-parity value `C = max Γ⁺ - 1` from
    /// the positivity bounds `1 + τC >= Γ^τ(μ,ν)`.
    pub fn from_state(state: &HiddenState, tol: f64) -> Result<Self, ModelError> {
        state.validate()?;
        if !compatibility_check(state, tol) {
            return Err(ModelError::Incompatible);
        }
        let [c12, c13, c23] = state.c;
        let gamma_plus = SIGN_TRIPLES[..4]
            .iter()
            .map(|&(_, mu, nu)| {
                mu * (state.biased(0) + c23) + nu * (state.biased(1) + c13)
                    - mu * nu * (c12 + state.biased(2))
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let c = gamma_plus - 1.0;
        let mut values = [0.0; 8];
        for (idx, &signs) in SIGN_TRIPLES.iter().enumerate() {
            values[idx] = triple_value(state, c, signs);
        }
        Ok(TripleResponse { values, c })
    }

    /// Marginal over the third index: must equal `response_pair` exactly.
    pub fn marginal_pair(&self, j: usize, k: usize, mu: f64, nu: f64) -> f64 {
        let axes = |signs: (f64, f64, f64), axis: usize| match axis {
            0 => signs.0,
            1 => signs.1,
            _ => signs.2,
        };
        SIGN_TRIPLES
            .iter()
            .enumerate()
            .filter(|&(_, &signs)| axes(signs, j) == mu && axes(signs, k) == nu)
            .map(|(idx, _)| self.values[idx])
            .sum()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn min_triple_value(state: &HiddenState, c: f64) -> f64 {
    SIGN_TRIPLES
        .iter()
        .map(|&signs| triple_value(state, c, signs))
        .fold(f64::INFINITY, f64::min)
}

/// Brute-force feasibility search for a triplewise response function,
/// independent of the compatibility criterion: scans the odd-parity value
/// `C` over `[-1, 1]` with step `1e-3` and refines around the best grid
/// point (the worst-case response is concave piecewise-linear in `C`).
///
/// The tolerance applies to the unnormalized octet `8χ`, which carries the
/// same additive scale as the compatibility inequalities (their margins
/// coincide exactly at the feasibility boundary), so the oracle and
/// [`compatibility_check`] agree at any common `tol`.
pub fn feasible_triple_oracle(state: &HiddenState, tol: f64) -> bool {
    const STEP: f64 = 1e-3;
    let mut best_c = -1.0;
    let mut best = f64::NEG_INFINITY;
    let mut c = -1.0;
    while c <= 1.0 + 1e-12 {
        let value = min_triple_value(state, c);
        if value > best {
            best = value;
            best_c = c;
        }
        if value >= 0.0 {
            return true;
        }
        c += STEP;
    }
    let mut lo = (best_c - STEP).max(-1.0);
    let mut hi = (best_c + STEP).min(1.0);
    for _ in 0..80 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if min_triple_value(state, m1) < min_triple_value(state, m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    best = best.max(min_triple_value(state, 0.5 * (lo + hi)));
    8.0 * best >= -tol
}

/// A finite weighted ensemble of hidden states.
#[derive(Debug, Clone)]
pub struct HiddenModel {
    pub entries: Vec<(f64, HiddenState)>,
}

impl HiddenModel {
    pub fn new(entries: Vec<(f64, HiddenState)>) -> Result<Self, ModelError> {
        let model = HiddenModel { entries };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let sum: f64 = self.entries.iter().map(|(w, _)| w).sum();
        if (sum - 1.0).abs() > 1e-12 || self.entries.iter().any(|&(w, _)| w < 0.0) {
            return Err(ModelError::InvalidWeights { sum });
        }
        for (_, state) in &self.entries {
            state.validate()?;
        }
        Ok(())
    }

    /// Model sharpness of observable `k`: the ensemble average of `|η_k|`.
    pub fn sharpness(&self, k: usize) -> f64 {
        self.entries.iter().map(|(w, s)| w * s.eta[k].abs()).sum()
    }

    /// Ensemble average of the context value for pair index `pair`.
    pub fn mean_context(&self, pair: usize) -> f64 {
        self.entries.iter().map(|(w, s)| w * s.c[pair]).sum()
    }
}

/// Average anti-correlation of the three pairwise joint measurements:
/// `R3 = 1 - (1/3) Σ_pairs (1 + <C_jk>)/2`.
pub fn classical_r3(model: &HiddenModel) -> f64 {
    let mean: f64 = (0..3)
        .map(|pair| (1.0 + model.mean_context(pair)) / 2.0)
        .sum();
    1.0 - mean / 3.0
}

/// The LSW bound `1 - max_k η_k / 3`.
pub fn lsw_bound(eta1: f64, eta2: f64, eta3: f64) -> f64 {
    1.0 - eta1.max(eta2).max(eta3) / 3.0
}

/// Draws a hidden state covering the full constraint polytope: uniform
/// predetermined values, unsharpness uniform in `[0, 1]`, then each context
/// value uniform in its admissible interval
/// `[|η_j A_j + η_k A_k| - 1, 1 - |η_j A_j - η_k A_k|]`.
pub fn sample_hidden_state<R: Rng>(rng: &mut R) -> HiddenState {
    let mut a = [0.0; 3];
    let mut eta = [0.0; 3];
    for k in 0..3 {
        a[k] = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        eta[k] = rng.gen_range(0.0..=1.0);
    }
    let mut state = HiddenState {
        a,
        eta,
        c: [0.0; 3],
    };
    for (idx, &(j, k)) in PAIRS.iter().enumerate() {
        let lo = (state.biased(j) + state.biased(k)).abs() - 1.0;
        let hi = 1.0 - (state.biased(j) - state.biased(k)).abs();
        state.c[idx] = if hi - lo < 1e-15 {
            lo
        } else {
            rng.gen_range(lo..=hi)
        };
    }
    state
}

/// Draws a random ensemble of one to four hidden states.
pub fn sample_hidden_model<R: Rng>(rng: &mut R) -> HiddenModel {
    let count = rng.gen_range(1..=4);
    let mut weights: Vec<f64> = (0..count).map(|_| rng.gen_range(0.01..1.0)).collect();
    let sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= sum;
    }
    let entries = weights
        .into_iter()
        .map(|w| (w, sample_hidden_state(rng)))
        .collect();
    HiddenModel { entries }
}

/// Monte Carlo verification report for the LSW bound.
#[derive(Debug, Clone, Serialize)]
pub struct McReport {
    pub trials: u64,
    pub violations: u64,
    /// Maximum of `R3 - bound` over all sampled models; nonpositive means
    /// the bound was never exceeded.
    pub max_slack: f64,
    pub seed: u64,
}

/// Samples random hidden models — compatible and incompatible pairwise
/// contexts alike — and checks the LSW bound `R3 <= 1 - max_k <|η_k|>/3`
/// on each. Each trial derives its own RNG stream from `(seed, trial)`, so
/// trials are independent and the run is reproducible.
pub fn mc_verify_lsw_bound(trials: u64, seed: u64) -> McReport {
    let mut violations = 0;
    let mut max_slack = f64::NEG_INFINITY;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let model = sample_hidden_model(&mut rng);
        let bound = 1.0 - (0..3).map(|k| model.sharpness(k)).fold(0.0, f64::max) / 3.0;
        let slack = classical_r3(&model) - bound;
        if slack > 1e-9 {
            violations += 1;
        }
        if slack > max_slack {
            max_slack = slack;
        }
    }
    McReport {
        trials,
        violations,
        max_slack,
        seed,
    }
}
