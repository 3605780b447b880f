//! Triplewise joint measurability of three unbiased qubit observables.
//!
//! Three unbiased observables `O±(λk)` are triplewise jointly measurable
//! exactly when the four sign vectors
//!
//! ```text
//! Λ0 = λ1 + λ2 + λ3,   Λk = 2 λk - Λ0   (k = 1, 2, 3)
//! ```
//!
//! satisfy `Σ_a |Λa - Λft| <= 4`, where `Λft` is their Fermat–Torricelli
//! vector (geometric median). When the bound holds, an explicit eight-effect
//! joint POVM exists with the three observables as single marginals; its
//! positivity constraints on the mixed-sign outcomes hold with equality.
//!
//! The geometric median is computed by a Weiszfeld iteration with explicit
//! vertex handling: the closed-form special cases (coplanar and orthogonal
//! configurations) place the optimum exactly on an input point, where the
//! plain iteration is undefined.

use serde::Serialize;

use crate::bloch::{outcome_grid, Effect, Povm, Vec3};
use crate::error::JmError;
use crate::pairwise::{pairwise_compat, PairwiseJoint};

const MAX_ITERATIONS: usize = 100_000;
/// Distance at which an iterate is treated as sitting on an input point.
const VERTEX_TOL: f64 = 1e-9;
/// Interior stopping criterion on the norm of the summed unit vectors.
const STATIONARITY_TOL: f64 = 1e-10;
const STEP_TOL: f64 = 1e-12;
/// Coplanarity threshold on the triple product of unit vectors.
const COPLANAR_TOL: f64 = 1e-9;

/// The four sign vectors derived from a triple of observables.
#[derive(Debug, Clone, Copy)]
pub struct LambdaSystem {
    pub lambdas: [Vec3; 3],
}

impl LambdaSystem {
    pub fn new(l1: Vec3, l2: Vec3, l3: Vec3) -> Self {
        LambdaSystem {
            lambdas: [l1, l2, l3],
        }
    }

    /// `Λ0 = λ1 + λ2 + λ3`.
    pub fn sum_vector(&self) -> Vec3 {
        self.lambdas[0] + self.lambdas[1] + self.lambdas[2]
    }

    /// `[Λ0, Λ1, Λ2, Λ3]` with `Λk = 2 λk - Λ0`, so `Λk + Λ0 = 2 λk`.
    pub fn points(&self) -> [Vec3; 4] {
        let sum = self.sum_vector();
        [
            sum,
            self.lambdas[0] * 2.0 - sum,
            self.lambdas[1] * 2.0 - sum,
            self.lambdas[2] * 2.0 - sum,
        ]
    }
}

/// Output of the geometric-median solver.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FtResult {
    pub point: Vec3,
    /// `Σ_a |p_a - point|` at the returned point.
    pub total_distance: f64,
    /// Index of the input point the optimum coincides with, when it does.
    /// Also set (index 0) when all input points coincide.
    pub at_vertex: Option<usize>,
    pub iterations: usize,
}

/// Total Euclidean distance from `y` to every point.
pub fn total_distance(points: &[Vec3], y: Vec3) -> f64 {
    points.iter().map(|&p| (p - y).norm()).sum()
}

/// One Weiszfeld update: the inverse-distance weighted mean of the points.
pub(crate) fn weiszfeld_step(points: &[Vec3], y: Vec3) -> Vec3 {
    let mut numerator = Vec3::ZERO;
    let mut weight_sum = 0.0;
    for &p in points {
        let d = (p - y).norm().max(1e-300);
        numerator = numerator + p * (1.0 / d);
        weight_sum += 1.0 / d;
    }
    numerator * (1.0 / weight_sum)
}

fn interior_result(points: &[Vec3], y: Vec3, iterations: usize) -> FtResult {
    FtResult {
        point: y,
        total_distance: total_distance(points, y),
        at_vertex: None,
        iterations,
    }
}

/// Golden-section minimization of the total distance along a line. The
/// objective is convex, so this can only improve the point; it rescues the
/// Weiszfeld iteration in ill-conditioned valleys (two tight point clusters
/// leave one direction with nearly zero curvature, where plain Weiszfeld
/// contracts by a factor close to one).
fn line_search(points: &[Vec3], y: Vec3, direction: Vec3, half_width: f64) -> Vec3 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let f = |t: f64| total_distance(points, y + direction * t);
    let mut a = -half_width;
    let mut b = half_width;
    let mut t1 = b - INV_PHI * (b - a);
    let mut t2 = a + INV_PHI * (b - a);
    let mut f1 = f(t1);
    let mut f2 = f(t2);
    for _ in 0..90 {
        if f1 < f2 {
            b = t2;
            t2 = t1;
            f2 = f1;
            t1 = b - INV_PHI * (b - a);
            f1 = f(t1);
        } else {
            a = t1;
            t1 = t2;
            f1 = f2;
            t2 = a + INV_PHI * (b - a);
            f2 = f(t2);
        }
    }
    let best_t = if f1 < f2 { t1 } else { t2 };
    if f(best_t) < f(0.0) {
        y + direction * best_t
    } else {
        y
    }
}

/// Tests the vertex-optimality certificate at point `a`: `p_a` minimizes the
/// total distance exactly when the summed unit pulls of the non-coincident
/// points do not exceed the multiplicity of `p_a`. The objective is convex,
/// so a passing certificate is a global optimality proof.
fn certified_vertex(points: &[Vec3]) -> Option<usize> {
    (0..points.len()).find(|&a| {
        let mut multiplicity = 1.0;
        let mut pull = Vec3::ZERO;
        for (b, &p) in points.iter().enumerate() {
            if b == a {
                continue;
            }
            let d = (p - points[a]).norm();
            if d < 1e-12 {
                multiplicity += 1.0;
            } else {
                pull = pull + (p - points[a]) * (1.0 / d);
            }
        }
        pull.norm() <= multiplicity + 1e-9
    })
}

/// Geometric median (Fermat–Torricelli vector) of a point set.
///
/// Every input point is tested against the vertex-optimality certificate
/// first; a certified vertex is returned exactly, with no iteration. This
/// matters because the closed-form special cases (coplanar and orthogonal
/// configurations) place the optimum exactly on an input point, where plain
/// Weiszfeld is undefined and its approach is sublinear. Otherwise the
/// optimum is interior and the Weiszfeld iteration converges from the
/// centroid; an iterate that wanders onto an input point is displaced along
/// the descent direction (Vardi-Zhang step). Inputs whose points all
/// coincide return that point, flagged via `at_vertex`. For collinear point
/// sets the minimizer may not be unique; the solver reports one minimizer.
pub fn fermat_torricelli(points: &[Vec3]) -> Result<FtResult, JmError> {
    if points.len() < 3 {
        return Err(JmError::TooFewPoints {
            count: points.len(),
        });
    }
    if let Some(v) = certified_vertex(points) {
        return Ok(FtResult {
            point: points[v],
            total_distance: total_distance(points, points[v]),
            at_vertex: Some(v),
            iterations: 0,
        });
    }

    let centroid = points.iter().fold(Vec3::ZERO, |acc, &p| acc + p) * (1.0 / points.len() as f64);
    let spread = points
        .iter()
        .map(|&p| (p - centroid).norm())
        .fold(0.0, f64::max);
    let mut y = centroid;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        let (nearest_idx, nearest_dist) = points
            .iter()
            .enumerate()
            .map(|(i, &p)| (i, (p - y).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty point set");

        if nearest_dist < VERTEX_TOL {
            // No vertex is optimal (pre-certified), so step off along the
            // descent direction with the Vardi-Zhang step length.
            let anchor = points[nearest_idx];
            let mut multiplicity = 0.0;
            let mut pull = Vec3::ZERO;
            let mut inv_dist_sum = 0.0;
            for &p in points {
                let d = (p - anchor).norm();
                if d < VERTEX_TOL {
                    multiplicity += 1.0;
                } else {
                    pull = pull + (p - anchor) * (1.0 / d);
                    inv_dist_sum += 1.0 / d;
                }
            }
            let pull_norm = pull.norm();
            if pull_norm <= multiplicity + 1e-12 {
                // Optimal within the cluster around the anchor (possible for
                // near-coincident points below the grouping radius).
                return Ok(FtResult {
                    point: anchor,
                    total_distance: total_distance(points, anchor),
                    at_vertex: Some(nearest_idx),
                    iterations,
                });
            }
            let step = (pull_norm - multiplicity) / inv_dist_sum;
            y = anchor + pull * (step / pull_norm);
            iterations += 1;
            continue;
        }

        let residual = points.iter().fold(Vec3::ZERO, |acc, &p| {
            acc + ((p - y) * (1.0 / (p - y).norm()))
        });
        if residual.norm() <= STATIONARITY_TOL {
            return Ok(interior_result(points, y, iterations));
        }

        let next = weiszfeld_step(points, y);
        iterations += 1;
        let step = next - y;
        y = next;
        if step.norm() < STEP_TOL {
            return Ok(interior_result(points, y, iterations));
        }
        // Periodic polish along the recent step direction, which aligns
        // with the flat axis when the iteration is crawling through an
        // ill-conditioned valley.
        if iterations % 32 == 0 {
            if let Some(direction) = step.normalized() {
                y = line_search(points, y, direction, spread);
            }
        }
    }
    Ok(interior_result(points, y, iterations))
}

/// Result of the triplewise joint-measurability test.
#[derive(Debug, Clone, Serialize)]
pub struct TriplewiseCompat {
    /// `4 - Σ_a |Λa - Λft|`; nonnegative means measurable.
    pub margin: f64,
    pub measurable: bool,
    pub ft: FtResult,
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

/// Necessary and sufficient triplewise joint-measurability test.
pub fn triplewise_compat(
    l1: Vec3,
    l2: Vec3,
    l3: Vec3,
    tol: f64,
) -> Result<TriplewiseCompat, JmError> {
    check_sharpness(&[l1, l2, l3], tol)?;
    let system = LambdaSystem::new(l1, l2, l3);
    let ft = fermat_torricelli(&system.points())?;
    let margin = 4.0 - ft.total_distance;
    Ok(TriplewiseCompat {
        margin,
        measurable: margin >= -tol,
        ft,
    })
}

/// An eight-effect joint POVM for three unbiased observables.
///
/// Effects follow the lexicographic outcome order of [`outcome_grid`] and
/// take the form `8 M(μ) = (1 + Σ_{i<j} μi μj Z_ij) I + (Σ_i μi λi - μ1μ2μ3 z)·σ`
/// with `z` the Fermat–Torricelli vector of the sign system and
/// `Z_ij = 1 - (|Λi - z| + |Λj - z|)/2`.
#[derive(Debug, Clone, Serialize)]
pub struct TriplewiseJoint {
    pub lambdas: [Vec3; 3],
    /// Pair correlations `[Z12, Z13, Z23]`.
    pub corr: [f64; 3],
    /// The Fermat–Torricelli vector used as the odd-parity term.
    pub z: Vec3,
    pub effects: [Effect; 8],
}

/// Index pairs `(1,2), (1,3), (2,3)` in zero-based form.
pub const PAIR_INDICES: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

impl TriplewiseJoint {
    pub fn build(l1: Vec3, l2: Vec3, l3: Vec3, tol: f64) -> Result<Self, JmError> {
        let compat = triplewise_compat(l1, l2, l3, tol)?;
        if !compat.measurable {
            return Err(JmError::NotTriplewiseMeasurable {
                margin: compat.margin,
            });
        }
        let system = LambdaSystem::new(l1, l2, l3);
        let points = system.points();
        let ft = compat.ft.point;
        let dist = [
            (points[1] - ft).norm(),
            (points[2] - ft).norm(),
            (points[3] - ft).norm(),
        ];
        let corr = [
            1.0 - (dist[0] + dist[1]) / 2.0,
            1.0 - (dist[0] + dist[2]) / 2.0,
            1.0 - (dist[1] + dist[2]) / 2.0,
        ];
        let lambdas = [l1, l2, l3];
        let mut effects = [Effect::new(0.0, Vec3::ZERO); 8];
        for (idx, label) in outcome_grid(3).iter().enumerate() {
            let s: Vec<f64> = label.iter().map(|&v| f64::from(v)).collect();
            let a =
                (1.0 + s[0] * s[1] * corr[0] + s[0] * s[2] * corr[1] + s[1] * s[2] * corr[2]) / 8.0;
            let b = (lambdas[0] * s[0] + lambdas[1] * s[1] + lambdas[2] * s[2]
                - ft * (s[0] * s[1] * s[2]))
                * 0.125;
            let effect = Effect::new(a, b);
            debug_assert!(effect.is_psd(tol.max(1e-12)));
            effects[idx] = effect;
        }
        Ok(TriplewiseJoint {
            lambdas,
            corr,
            z: ft,
            effects,
        })
    }

    pub fn povm(&self) -> Povm {
        Povm::new(self.effects.to_vec(), outcome_grid(3))
    }

    /// The pairwise joint measurement that arises as the marginal over the
    /// remaining observable, for `pair` indexing into [`PAIR_INDICES`].
    pub fn pair_joint(&self, pair: usize, tol: f64) -> Result<PairwiseJoint, JmError> {
        let (i, j) = PAIR_INDICES[pair];
        PairwiseJoint::build(
            self.lambdas[i],
            self.lambdas[j],
            self.corr[pair],
            Vec3::ZERO,
            tol,
        )
    }
}

/// Which closed-form branch a coplanar triple falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CoplanarBranch {
    /// The four sign vectors are in convex position (the case where one
    /// observable is a convex combination of the other two): the
    /// Fermat–Torricelli vector is the diagonal crossing and measurability
    /// reduces to the pairwise criterion for the diagonal pair, so the third
    /// observable is measured jointly for free.
    InHull,
    /// One sign vector lies in the triangle of the other three and is itself
    /// the Fermat–Torricelli vector: the criterion is
    /// `|λi+λj| + |λi-λk| + |λj-λk| <= 2` with `λk` in the middle role
    /// (sign-flipped when the interior vector is `Λ0`).
    OutOfHull,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CoplanarCheck {
    pub measurable: bool,
    pub branch: CoplanarBranch,
}

/// Closed-form triplewise criterion for coplanar observables, bypassing the
/// iterative solver.
///
/// For coplanar observables the four sign vectors `Λa` are coplanar, and
/// exactly one of two pictures holds. Either some `Λa` carries the
/// vertex-optimality certificate — then it is the Fermat–Torricelli vector
/// and the criterion is the distance-sum formula, which in observable terms
/// reads `|λi+λj| + |λi∓λk| + |λj∓λk| <= 2` (sign depending on whether the
/// interior vertex is `Λk` or `Λ0`). Or the four points are in convex
/// position — then the optimum is the diagonal crossing, the total distance
/// is the summed diagonal length `2(|λi+λj| + |λi-λj|)`, and the criterion
/// collapses to the pairwise condition `H_ij >= 0` for the diagonal pair.
/// The diagonal split is the one maximizing the paired distance sum.
/// Callers may pass the vectors in any order; outcome relabelings
/// (`λ -> -λ`) are handled internally.
pub fn coplanar_condition(
    l1: Vec3,
    l2: Vec3,
    l3: Vec3,
    tol: f64,
) -> Result<CoplanarCheck, JmError> {
    check_sharpness(&[l1, l2, l3], tol)?;
    let v = [l1, l2, l3];
    let units: Vec<Vec3> = v.iter().filter_map(|x| x.normalized()).collect();
    if units.len() == 3 {
        let triple_product = units[0].dot(units[1].cross(units[2]));
        if triple_product.abs() >= COPLANAR_TOL {
            return Err(JmError::NotCoplanar { triple_product });
        }
    }

    let points = LambdaSystem::new(l1, l2, l3).points();
    if let Some(a) = certified_vertex(&points) {
        let sum = total_distance(&points, points[a]) / 2.0;
        return Ok(CoplanarCheck {
            measurable: sum <= 2.0 + tol,
            branch: CoplanarBranch::OutOfHull,
        });
    }

    // Convex position: the crossing split maximizes the paired distance sum
    // (any split is a lower bound on the total distance by the triangle
    // inequality, and the diagonal split attains it).
    let splits = [(1usize, (1usize, 2usize)), (2, (0, 2)), (3, (0, 1))];
    let (_, (i, j)) = splits
        .into_iter()
        .max_by(|&(k1, _), &(k2, _)| {
            let sum_of = |k: usize| {
                let (i, j) = match k {
                    1 => (2, 3),
                    2 => (1, 3),
                    _ => (1, 2),
                };
                (points[0] - points[k]).norm() + (points[i] - points[j]).norm()
            };
            sum_of(k1).total_cmp(&sum_of(k2))
        })
        .expect("three splits");
    let compat = pairwise_compat(v[i], v[j], tol)?;
    Ok(CoplanarCheck {
        measurable: compat.measurable,
        branch: CoplanarBranch::InHull,
    })
}

/// Maximal sharpness for equal-length coplanar observables with between
/// angles `phi1`, `phi2` from the middle vector to the outer two:
/// `η <= [cos((φ1+φ2)/2) + sin(φ1/2) + sin(φ2/2)]⁻¹`.
///
/// The formula presumes the canonical configuration: all three directions in
/// a common half plane with the middle vector between the outer two, which
/// requires `φ1 + φ2 <= π`. For wider raw angles, sign-canonicalize first
/// (flip one vector and recompute the between angles) or use
/// [`triplewise_compat`]; evaluating the formula outside its domain
/// overestimates the boundary. Verified against the Fermat–Torricelli
/// criterion in the test suite.
pub fn equal_length_coplanar_bound(phi1: f64, phi2: f64) -> f64 {
    let f = ((phi1 + phi2) / 2.0).cos() + (phi1 / 2.0).sin() + (phi2 / 2.0).sin();
    if f <= 1e-12 {
        f64::INFINITY
    } else {
        f.recip()
    }
}

/// Closed-form Fermat–Torricelli vector for `λ3` orthogonal to `λ1`, `λ2`:
/// `Λft = [(|λ1-λ2| - |λ1+λ2|) / (|λ1+λ2| + |λ1-λ2|)] λ3`.
///
/// Derived from the stationarity condition (the summed unit vectors toward
/// the four sign vectors vanish on the `λ3` axis); cross-checked against the
/// iterative solver in the test suite.
pub fn orthogonal_ft_vector(l1: Vec3, l2: Vec3, l3: Vec3) -> Vec3 {
    let sum = (l1 + l2).norm();
    let diff = (l1 - l2).norm();
    if sum + diff < 1e-300 {
        return Vec3::ZERO;
    }
    l3 * ((diff - sum) / (sum + diff))
}

/// Closed-form triplewise criterion for `λ3` orthogonal to `λ1`, `λ2`:
/// `|λ1+λ2| + |λ1-λ2| <= 2 sqrt(1 - |λ3|²)`.
pub fn orthogonal_case_check(l1: Vec3, l2: Vec3, l3: Vec3, tol: f64) -> Result<bool, JmError> {
    check_sharpness(&[l1, l2, l3], tol)?;
    let dot13 = l3.dot(l1);
    let dot23 = l3.dot(l2);
    if dot13.abs() > tol.max(1e-12) || dot23.abs() > tol.max(1e-12) {
        return Err(JmError::NotOrthogonal { dot13, dot23 });
    }
    let lhs = (l1 + l2).norm() + (l1 - l2).norm();
    let rhs = 2.0 * (1.0 - l3.norm_sq()).max(0.0).sqrt();
    Ok(lhs <= rhs + tol)
}
