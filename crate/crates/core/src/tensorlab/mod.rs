//! Coordinate-chart Riemannian calculus in dimension 3.
//!
//! Tensor fields ([`VectorField`], [`OneFormField`], [`MetricField`],
//! [`EndoField`]) are symbolic in their chart components. Quantities built
//! from the inverse metric (Christoffel symbols, curvature, Ricci operator)
//! are produced per point by [`CurvatureBundle::at`] as jets, which keeps
//! them exact without expanding adjugate formulas symbolically.

mod curvature;
mod fields;
pub mod local;

pub use curvature::{
    christoffel, christoffel_finite_difference, contracted_bianchi_residual,
    covariant_derivative_endo, covariant_derivative_vector, gradient, petersen_residual, ricci,
    riemann, Christoffel, CurvatureBundle, PointGeometry, RicciAt, Riemann, CONDITION_LIMIT,
};
pub use fields::{
    lie_bracket, lie_derivative_endo, lie_derivative_form, lie_derivative_metric, EndoField,
    MetricField, OneFormField, VectorField,
};

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale(s: f64, a: Vec3) -> Vec3 {
    [s * a[0], s * a[1], s * a[2]]
}

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Euclidean norm of chart components.
pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn mat_vec(m: &Mat3, v: Vec3) -> Vec3 {
    [dot(m[0], v), dot(m[1], v), dot(m[2], v)]
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

/// Largest absolute entry.
pub fn max_abs(m: &Mat3) -> f64 {
    m.iter().flatten().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Bilinear form applied to two vectors: X^i B_ij Y^j.
pub fn bilinear(b: &Mat3, x: Vec3, y: Vec3) -> f64 {
    dot(x, mat_vec(b, y))
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn symmetric_eigenvalues(m: &Mat3) -> Vec3 {
    let mat = nalgebra::Matrix3::from_fn(|i, j| 0.5 * (m[i][j] + m[j][i]));
    let mut ev: Vec<f64> = mat.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    [ev[0], ev[1], ev[2]]
}

/// Spectral condition number of a symmetric positive definite matrix;
/// infinite when the smallest eigenvalue is not positive.
pub fn condition_number(m: &Mat3) -> f64 {
    let ev = symmetric_eigenvalues(m);
    if ev[0] <= 0.0 {
        f64::INFINITY
    } else {
        ev[2] / ev[0]
    }
}
