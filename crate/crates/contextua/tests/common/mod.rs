//! Shared helpers for the integration suites.
#![allow(dead_code)]

use contextua::triplewise::total_distance;
use contextua::Vec3;
use rand::Rng;

/// Uniform direction on the unit sphere (rejection from the cube).
pub fn unit_vector<R: Rng>(rng: &mut R) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v * (1.0 / n);
        }
    }
}

/// Uniform point in the ball of the given radius.
pub fn in_ball<R: Rng>(rng: &mut R, radius: f64) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.gen_range(-radius..=radius),
            rng.gen_range(-radius..=radius),
            rng.gen_range(-radius..=radius),
        );
        if v.norm() <= radius {
            return v;
        }
    }
}

/// Any unit vector orthogonal to `v` (and to `w` when they span a plane).
pub fn perpendicular(v: Vec3, w: Vec3) -> Vec3 {
    if let Some(n) = v.cross(w).normalized() {
        return n;
    }
    let axis = if v.norm() > w.norm() { v } else { w };
    let helper = if axis.x.abs() < 0.9 {
        Vec3::new(1.0, 0.0, 0.0)
    } else {
        Vec3::new(0.0, 1.0, 0.0)
    };
    match axis.normalized() {
        Some(u) => (helper - u * helper.dot(u))
            .normalized()
            .expect("helper independent of axis"),
        None => Vec3::new(0.0, 0.0, 1.0),
    }
}

/// Brute-force geometric-median value: a multilevel grid search over a box
/// covering the point set, seeded with the input points themselves so vertex
/// optima are evaluated exactly. Independent of the Weiszfeld solver.
pub fn grid_search_ft_value(points: &[Vec3], per_axis: usize, levels: usize) -> f64 {
    let total = |y: Vec3| total_distance(points, y);
    let centroid = points.iter().fold(Vec3::ZERO, |acc, &p| acc + p) * (1.0 / points.len() as f64);
    let mut best_point = centroid;
    let mut best_value = total(centroid);
    for &p in points {
        let v = total(p);
        if v < best_value {
            best_value = v;
            best_point = p;
        }
    }
    let mut half = points
        .iter()
        .map(|&p| (p - centroid).norm())
        .fold(0.0, f64::max)
        + 1e-9;
    let mut center = centroid;
    for _ in 0..levels {
        let step = 2.0 * half / (per_axis - 1) as f64;
        for i in 0..per_axis {
            for j in 0..per_axis {
                for k in 0..per_axis {
                    let y = Vec3::new(
                        center.x - half + step * i as f64,
                        center.y - half + step * j as f64,
                        center.z - half + step * k as f64,
                    );
                    let v = total(y);
                    if v < best_value {
                        best_value = v;
                        best_point = y;
                    }
                }
            }
        }
        center = best_point;
        // Cover the neighboring cells of the best point; the objective is
        // convex, so the optimum cannot hide farther away.
        half = 2.0 * step;
    }
    best_value
}
