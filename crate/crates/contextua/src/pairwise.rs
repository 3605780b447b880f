//! Pairwise joint measurability of two unbiased qubit observables.
//!
//! Two unbiased observables `O±(λi)`, `O±(λj)` are jointly measurable exactly
//! when the Busch criterion `H = 1 - |λi|² - |λj|² + (λi·λj)² >= 0` holds.
//! The general four-effect joint POVM is
//!
//! ```text
//! M(μ,ν) = [ (1 + μν Z) I + (μ λi + ν λj - μν z)·σ ] / 4
//! ```
//!
//! parametrized by a correlation scalar `Z` and a vector `z`. The
//! anti-correlation probability in a state `ρ` is `(1 - Z + ρ·z)/2`; over all
//! valid `(Z, z)` and states it is maximized by `Z = λi·λj` and `z = √H r`
//! with `r` a unit vector orthogonal to both observables, giving
//! `(1 - λi·λj + √H)/2`.

use serde::Serialize;

use crate::bloch::{outcome_grid, Effect, Povm, QubitState, Vec3};
use crate::error::JmError;

/// The four outcome sign pairs in label order `(+,+), (+,-), (-,+), (-,-)`.
pub(crate) const SIGN_PAIRS: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

/// Result of the pairwise joint-measurability test.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PairwiseCompat {
    /// Criterion value `H = 1 - |λi|² - |λj|² + (λi·λj)²`.
    pub h: f64,
    pub measurable: bool,
}

fn check_sharpness(vectors: &[Vec3], tol: f64) -> Result<(), JmError> {
    for (index, v) in vectors.iter().enumerate() {
        let norm = v.norm();
        if !v.is_finite() || norm > 1.0 + tol {
            return Err(JmError::InvalidSharpness { index, norm });
        }
    }
    Ok(())
}

/// Busch criterion for two unbiased observables.
///
/// `measurable` holds when `H >= -tol`; small negative `H` inside the
/// tolerance band is a boundary case and counts as measurable.
pub fn pairwise_compat(l_i: Vec3, l_j: Vec3, tol: f64) -> Result<PairwiseCompat, JmError> {
    check_sharpness(&[l_i, l_j], tol)?;
    let dot = l_i.dot(l_j);
    let h = 1.0 - l_i.norm_sq() - l_j.norm_sq() + dot * dot;
    Ok(PairwiseCompat {
        h,
        measurable: h >= -tol,
    })
}

/// Positivity bounds `(L₊, L₋)` on `|z|²` for a joint POVM with correlation
/// `corr`: `L_μ = (1 + μ·corr)² - |λi + μ λj|²`.
pub fn z_norm_bounds(l_i: Vec3, l_j: Vec3, corr: f64) -> (f64, f64) {
    let plus = (1.0 + corr).powi(2) - (l_i + l_j).norm_sq();
    let minus = (1.0 - corr).powi(2) - (l_i - l_j).norm_sq();
    (plus, minus)
}

/// Maximal anti-correlation `(1 - λi·λj + √H)/2` over all joint measurements
/// of the pair and all states.
pub fn max_anticorrelation(l_i: Vec3, l_j: Vec3, tol: f64) -> Result<f64, JmError> {
    let compat = pairwise_compat(l_i, l_j, tol)?;
    if !compat.measurable {
        return Err(JmError::NotJointlyMeasurable { h: compat.h });
    }
    let h = compat.h.max(0.0);
    Ok((1.0 - l_i.dot(l_j) + h.sqrt()) / 2.0)
}

/// A four-effect joint POVM for two unbiased observables.
#[derive(Debug, Clone, Serialize)]
pub struct PairwiseJoint {
    pub lambda_i: Vec3,
    pub lambda_j: Vec3,
    /// Correlation scalar of the family.
    #[serde(rename = "Z")]
    pub corr: f64,
    pub z: Vec3,
    /// Effects in label order `(+,+), (+,-), (-,+), (-,-)`.
    pub effects: [Effect; 4],
}

impl PairwiseJoint {
    /// Builds the joint POVM for the given `(corr, z)` parameters, checking
    /// positivity of every effect.
    pub fn build(l_i: Vec3, l_j: Vec3, corr: f64, z: Vec3, tol: f64) -> Result<Self, JmError> {
        check_sharpness(&[l_i, l_j], tol)?;
        let mut effects = [Effect::new(0.0, Vec3::ZERO); 4];
        for (idx, &(mu, nu)) in SIGN_PAIRS.iter().enumerate() {
            let (mu_f, nu_f) = (f64::from(mu), f64::from(nu));
            let a = (1.0 + mu_f * nu_f * corr) / 4.0;
            let b = (l_i * mu_f + l_j * nu_f - z * (mu_f * nu_f)) * 0.25;
            let effect = Effect::new(a, b);
            if !effect.is_psd(tol) {
                return Err(JmError::NotPositive {
                    mu,
                    nu,
                    deficit: -effect.min_eigenvalue(),
                });
            }
            effects[idx] = effect;
        }
        Ok(PairwiseJoint {
            lambda_i: l_i,
            lambda_j: l_j,
            corr,
            z,
            effects,
        })
    }

    /// The optimal anti-correlating joint measurement for a pure state whose
    /// Bloch direction `state_dir` is orthogonal to both observables.
    ///
    /// The effects are rank-1: `M(μ,ν) = ¼(1 + μν λi·λj)(I + m(μ,ν)·σ)` with
    /// unit vectors `m(μ,ν) ∝ μ λi + ν λj - μν r √H`. For `r` orthogonal to
    /// both observables the proportionality vector has norm exactly
    /// `1 + μν λi·λj`, so unit normalization lands the construction inside
    /// the general family at `Z = λi·λj`, `z = √H r`, and the marginals are
    /// exact.
    pub fn optimal(l_i: Vec3, l_j: Vec3, state_dir: Vec3, tol: f64) -> Result<Self, JmError> {
        let r = state_dir.normalized().ok_or(JmError::ZeroState)?;
        let (dot_i, dot_j) = (r.dot(l_i), r.dot(l_j));
        if dot_i.abs() > tol.max(1e-12) || dot_j.abs() > tol.max(1e-12) {
            return Err(JmError::StateNotOrthogonal { dot_i, dot_j });
        }
        let compat = pairwise_compat(l_i, l_j, tol)?;
        if !compat.measurable {
            return Err(JmError::NotJointlyMeasurable { h: compat.h });
        }
        let sqrt_h = compat.h.max(0.0).sqrt();
        let dot = l_i.dot(l_j);
        let mut effects = [Effect::new(0.0, Vec3::ZERO); 4];
        for (idx, &(mu, nu)) in SIGN_PAIRS.iter().enumerate() {
            let (mu_f, nu_f) = (f64::from(mu), f64::from(nu));
            let weight = (1.0 + mu_f * nu_f * dot) / 4.0;
            let prop = l_i * mu_f + l_j * nu_f - r * (mu_f * nu_f * sqrt_h);
            // The proportionality vector only vanishes together with the
            // weight (antiparallel unit observables); the fallback keeps the
            // direction well defined there.
            let m = prop.normalized().unwrap_or(r * -(mu_f * nu_f));
            effects[idx] = Effect::new(weight, m * weight);
        }
        Ok(PairwiseJoint {
            lambda_i: l_i,
            lambda_j: l_j,
            corr: dot,
            z: r * sqrt_h,
            effects,
        })
    }

    /// The POVM with its outcome labels.
    pub fn povm(&self) -> Povm {
        Povm::new(self.effects.to_vec(), outcome_grid(2))
    }

    /// Probability of obtaining different outcomes: `p(+,-) + p(-,+)`.
    pub fn anticorrelation(&self, state: &QubitState) -> f64 {
        self.effects[1].probability(state) + self.effects[2].probability(state)
    }
}
