//! Qubit algebra in Bloch coefficient form.
//!
//! A qubit effect `a·I + b·σ` is stored as the pair `(a, b)` with `b` a real
//! 3-vector; its eigenvalues are `a ± |b|`, so positivity checks are exact
//! scalar arithmetic and never require complex matrices. A state is the Bloch
//! vector `r` of the density matrix `(I + r·σ)/2`, and the Born rule for an
//! effect reduces to `a + b·r`.

use serde::{Deserialize, Serialize};

use crate::error::{BlochError, PovmError};

/// Default absolute tolerance for positivity and completeness checks.
///
/// Joint-POVM constructions saturate their positivity constraints exactly, so
/// the tolerance must absorb nothing more than f64 roundoff.
pub const DEFAULT_TOL: f64 = 1e-10;

/// A real 3-vector in Bloch space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * other.z - self.z * other.y,
            y: self.z * other.x - self.x * other.z,
            z: self.x * other.y - self.y * other.x,
        }
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Unit vector in the same direction, or `None` for a (near-)zero vector.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        if n < 1e-300 {
            None
        } else {
            Some(self * (1.0 / n))
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(v: [f64; 3]) -> Self {
        Vec3::new(v[0], v[1], v[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        [v.x, v.y, v.z]
    }
}

impl std::ops::Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl std::ops::Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl std::ops::Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl std::ops::Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

/// A qubit effect `a·I + b·σ` with eigenvalues `a ± |b|`.
///
/// Positivity is validated on demand, not at construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Effect {
    pub a: f64,
    pub b: Vec3,
}

impl Effect {
    pub const fn new(a: f64, b: Vec3) -> Self {
        Effect { a, b }
    }

    /// Smaller eigenvalue `a - |b|`.
    pub fn min_eigenvalue(&self) -> f64 {
        self.a - self.b.norm()
    }

    /// Positive semidefinite within tolerance: `a - |b| >= -tol`.
    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    /// A valid effect is PSD and bounded by the identity: `a + |b| <= 1 + tol`.
    pub fn is_effect(&self, tol: f64) -> bool {
        self.is_psd(tol) && self.a + self.b.norm() <= 1.0 + tol
    }

    /// Born-rule outcome probability `Tr[ρE] = a + b·r`.
    pub fn probability(&self, state: &QubitState) -> f64 {
        self.a + self.b.dot(state.r)
    }
}

impl std::ops::Add for Effect {
    type Output = Effect;
    fn add(self, o: Effect) -> Effect {
        Effect::new(self.a + o.a, self.b + o.b)
    }
}

/// Outcome labels for a joint measurement of `arity` binary observables, in
/// lexicographic order with `+1` before `-1`: for two observables the order
/// is `(+,+), (+,-), (-,+), (-,-)`.
pub fn outcome_grid(arity: usize) -> Vec<Vec<i8>> {
    let count = 1usize << arity;
    (0..count)
        .map(|idx| {
            (0..arity)
                .map(|axis| {
                    let bit = (idx >> (arity - 1 - axis)) & 1;
                    if bit == 0 {
                        1
                    } else {
                        -1
                    }
                })
                .collect()
        })
        .collect()
}

/// An ordered list of effects with their outcome labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Povm {
    pub effects: Vec<Effect>,
    /// One label per effect; entries are `+1` or `-1`.
    pub outcome_labels: Vec<Vec<i8>>,
}

impl Povm {
    pub fn new(effects: Vec<Effect>, outcome_labels: Vec<Vec<i8>>) -> Self {
        Povm {
            effects,
            outcome_labels,
        }
    }

    /// Two-outcome POVM labeled `(+1)`, `(-1)`.
    pub fn two_outcome(plus: Effect, minus: Effect) -> Self {
        Povm::new(vec![plus, minus], vec![vec![1], vec![-1]])
    }

    /// Number of observables the outcome labels address.
    pub fn arity(&self) -> usize {
        self.outcome_labels.first().map_or(0, |l| l.len())
    }

    /// Checks label shape, completeness (`Σa = 1`, `Σb = 0`) and positivity of
    /// every effect; reports the first failing constraint.
    pub fn validate(&self, tol: f64) -> Result<(), PovmError> {
        if self.effects.is_empty() {
            return Err(PovmError::Empty);
        }
        if self.outcome_labels.len() != self.effects.len() {
            return Err(PovmError::MalformedLabels(format!(
                "{} labels for {} effects",
                self.outcome_labels.len(),
                self.effects.len()
            )));
        }
        let arity = self.arity();
        for label in &self.outcome_labels {
            if label.len() != arity {
                return Err(PovmError::MalformedLabels(
                    "labels have mixed arity".to_string(),
                ));
            }
            if label.iter().any(|&v| v != 1 && v != -1) {
                return Err(PovmError::MalformedLabels(
                    "label entries must be +1 or -1".to_string(),
                ));
            }
        }
        let sum_a: f64 = self.effects.iter().map(|e| e.a).sum();
        let sum_b = self.effects.iter().fold(Vec3::ZERO, |acc, e| acc + e.b);
        if (sum_a - 1.0).abs() > tol
            || sum_b.x.abs() > tol
            || sum_b.y.abs() > tol
            || sum_b.z.abs() > tol
        {
            return Err(PovmError::Completeness {
                sum_a,
                sum_b_norm: sum_b.norm(),
            });
        }
        for (index, effect) in self.effects.iter().enumerate() {
            if !effect.is_psd(tol) {
                return Err(PovmError::NotPsd {
                    index,
                    min_eigenvalue: effect.min_eigenvalue(),
                });
            }
        }
        Ok(())
    }

    /// Marginal on one observable: keeps the outcome on `axis` and sums the
    /// effects over all other outcome indices. Requires the labels to form
    /// the full product grid over `{+1, -1}`.
    pub fn marginalize(&self, axis: usize) -> Result<Povm, PovmError> {
        let arity = self.arity();
        if axis >= arity {
            return Err(PovmError::MalformedLabels(format!(
                "axis {} out of range for arity {}",
                axis, arity
            )));
        }
        let grid = outcome_grid(arity);
        if self.outcome_labels != grid {
            return Err(PovmError::MalformedLabels(
                "labels do not form the full lexicographic product grid".to_string(),
            ));
        }
        let mut plus = Effect::new(0.0, Vec3::ZERO);
        let mut minus = Effect::new(0.0, Vec3::ZERO);
        for (label, effect) in self.outcome_labels.iter().zip(&self.effects) {
            if label[axis] == 1 {
                plus = plus + *effect;
            } else {
                minus = minus + *effect;
            }
        }
        Ok(Povm::two_outcome(plus, minus))
    }

    /// Outcome probabilities in the given state, in label order.
    pub fn probabilities(&self, state: &QubitState) -> Vec<f64> {
        self.effects.iter().map(|e| e.probability(state)).collect()
    }
}

/// A qubit state as the Bloch vector of `(I + r·σ)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    pub r: Vec3,
}

impl QubitState {
    pub fn new(r: Vec3) -> Result<Self, BlochError> {
        let norm = r.norm();
        if !r.is_finite() || norm > 1.0 + DEFAULT_TOL {
            return Err(BlochError::InvalidState { norm });
        }
        Ok(QubitState { r })
    }

    /// Pure state along `direction` (normalized internally).
    pub fn pure(direction: Vec3) -> Result<Self, BlochError> {
        let unit = direction.normalized().ok_or(BlochError::ZeroVector)?;
        Ok(QubitState { r: unit })
    }

    pub fn maximally_mixed() -> Self {
        QubitState { r: Vec3::ZERO }
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.r.norm() - 1.0).abs() <= tol
    }
}

/// An unbiased two-outcome observable `O±(λ) = (I ± λ·σ)/2`.
///
/// Outcomes are equiprobable on the maximally mixed state; the sharpness is
/// `|λ|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnbiasedObservable {
    pub lambda: Vec3,
}

impl UnbiasedObservable {
    pub fn new(lambda: Vec3) -> Result<Self, BlochError> {
        let norm = lambda.norm();
        if !lambda.is_finite() || norm > 1.0 + DEFAULT_TOL {
            return Err(BlochError::InvalidSharpness { norm });
        }
        Ok(UnbiasedObservable { lambda })
    }

    pub fn sharpness(&self) -> f64 {
        self.lambda.norm()
    }

    /// Effect for outcome `sign` (+1 or -1): `(1/2, ±λ/2)`.
    pub fn effect(&self, sign: i8) -> Effect {
        Effect::new(0.5, self.lambda * (0.5 * f64::from(sign)))
    }

    pub fn povm(&self) -> Povm {
        Povm::two_outcome(self.effect(1), self.effect(-1))
    }
}

/// Three coplanar equal-length Bloch vectors at mutual 120 degrees
/// (`λi·λj = -η²/2`), laid out in the xy-plane.
pub fn trine_vectors(eta: f64) -> [Vec3; 3] {
    let third = 2.0 * std::f64::consts::PI / 3.0;
    [0.0, third, 2.0 * third].map(|angle| Vec3::new(eta * angle.cos(), eta * angle.sin(), 0.0))
}

/// Three coplanar equal-length vectors in the xy-plane with `λ3` along +x and
/// `λ1`, `λ2` rotated by `+phi1` and `-phi2` from it. Returned as
/// `[λ1, λ2, λ3]`.
pub fn coplanar_from_angles(eta: f64, phi1: f64, phi2: f64) -> [Vec3; 3] {
    [
        Vec3::new(eta * phi1.cos(), eta * phi1.sin(), 0.0),
        Vec3::new(eta * phi2.cos(), -eta * phi2.sin(), 0.0),
        Vec3::new(eta, 0.0, 0.0),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn psd_examples() {
        // multiple of identity
        assert!(Effect::new(0.5, Vec3::ZERO).is_psd(DEFAULT_TOL));
        // min eigenvalue a - |b| = -0.05
        let e = Effect::new(0.25, Vec3::new(0.0, 0.0, 0.3));
        assert!(!e.is_psd(DEFAULT_TOL));
        assert_abs_diff_eq!(e.min_eigenvalue(), -0.05, epsilon = 1e-15);
        // |b| = 0.25 exactly: boundary case
        assert!(Effect::new(0.25, Vec3::new(0.15, 0.20, 0.0)).is_psd(DEFAULT_TOL));
    }

    #[test]
    fn unbiased_pair_is_complete() {
        let obs = UnbiasedObservable::new(Vec3::new(0.7, 0.0, 0.0)).unwrap();
        assert!(obs.povm().validate(DEFAULT_TOL).is_ok());
        assert_abs_diff_eq!(obs.sharpness(), 0.7, epsilon = 1e-15);
    }

    #[test]
    fn incomplete_pair_reports_completeness() {
        let e = Effect::new(0.6, Vec3::ZERO);
        let p = Povm::two_outcome(e, e);
        match p.validate(DEFAULT_TOL) {
            Err(PovmError::Completeness { sum_a, .. }) => {
                assert_abs_diff_eq!(sum_a, 1.2, epsilon = 1e-15)
            }
            other => panic!("expected completeness violation, got {:?}", other),
        }
    }

    #[test]
    fn empty_povm_rejected() {
        let p = Povm::new(vec![], vec![]);
        assert_eq!(p.validate(DEFAULT_TOL), Err(PovmError::Empty));
    }

    #[test]
    fn born_rule_examples() {
        let mixed = QubitState::maximally_mixed();
        assert_abs_diff_eq!(
            Effect::new(0.5, Vec3::ZERO).probability(&mixed),
            0.5,
            epsilon = 1e-15
        );

        let obs = UnbiasedObservable::new(Vec3::new(0.8, 0.0, 0.0)).unwrap();
        let along = QubitState::pure(Vec3::new(1.0, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(obs.effect(1).probability(&along), 0.9, epsilon = 1e-15);

        let perp = QubitState::pure(Vec3::new(0.0, 0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(obs.effect(1).probability(&perp), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn outcome_grid_order() {
        assert_eq!(
            outcome_grid(2),
            vec![vec![1, 1], vec![1, -1], vec![-1, 1], vec![-1, -1]]
        );
        assert_eq!(outcome_grid(3).len(), 8);
        assert_eq!(outcome_grid(3)[0], vec![1, 1, 1]);
        assert_eq!(outcome_grid(3)[7], vec![-1, -1, -1]);
    }

    #[test]
    fn marginalize_rejects_bad_labels() {
        let e = Effect::new(0.25, Vec3::ZERO);
        let p = Povm::new(
            vec![e; 4],
            vec![vec![1, 1], vec![1, 1], vec![-1, 1], vec![-1, -1]],
        );
        assert!(matches!(
            p.marginalize(0),
            Err(PovmError::MalformedLabels(_))
        ));
    }

    #[test]
    fn coin_joint_marginalizes_to_identity_halves() {
        // Perfectly correlated pair of trivial observables: marginals are
        // (I/2, I/2) on both axes.
        let half = Effect::new(0.5, Vec3::ZERO);
        let zero = Effect::new(0.0, Vec3::ZERO);
        let joint = Povm::new(vec![half, zero, zero, half], outcome_grid(2));
        for axis in 0..2 {
            let m = joint.marginalize(axis).unwrap();
            assert_eq!(m.effects, vec![half, half]);
            m.validate(DEFAULT_TOL).unwrap();
        }
    }

    #[test]
    fn trine_geometry() {
        let eta = 0.6;
        let t = trine_vectors(eta);
        for v in t {
            assert_abs_diff_eq!(v.norm(), eta, epsilon = 1e-14);
        }
        for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
            assert_abs_diff_eq!(t[i].dot(t[j]), -eta * eta / 2.0, epsilon = 1e-14);
        }
        let sum = t[0] + t[1] + t[2];
        assert!(sum.norm() < 1e-14);
    }

    #[test]
    fn state_validation() {
        assert!(QubitState::new(Vec3::new(0.0, 0.0, 1.0)).is_ok());
        assert!(QubitState::new(Vec3::new(0.0, 0.0, 1.1)).is_err());
        assert!(QubitState::pure(Vec3::new(0.0, 0.0, 2.0))
            .unwrap()
            .is_pure(1e-12));
    }

    #[test]
    fn effect_json_schema() {
        let e = Effect::new(0.5, Vec3::new(0.1, 0.2, 0.3));
        let json = serde_json::to_string(&e).unwrap();
        assert_eq!(json, r#"{"a":0.5,"b":[0.1,0.2,0.3]}"#);
        let back: Effect = serde_json::from_str(&json).unwrap();
        assert_eq!(back, e);
    }
}
