//! Pointwise tensor algebra on jets.
//!
//! A `JVec` or `JMat` is the truncated Taylor expansion of a chart-component
//! field at one point. Products and inverses propagate derivatives exactly,
//! so differential operators can be applied after algebraic ones.

use crate::jetcalc::{EvalError, Jet};

use super::{Mat3, Vec3};

pub type JVec = [Jet; 3];
pub type JMat = [[Jet; 3]; 3];

pub fn order_of_vec(v: &JVec) -> usize {
    v.iter().map(Jet::order).min().unwrap()
}

pub fn order_of_mat(m: &JMat) -> usize {
    m.iter().flat_map(|r| r.iter()).map(Jet::order).min().unwrap()
}

pub fn vec_value(v: &JVec) -> Vec3 {
    [v[0].value(), v[1].value(), v[2].value()]
}

pub fn mat_value(m: &JMat) -> Mat3 {
    std::array::from_fn(|i| vec_value(&m[i]))
}

pub fn constant_vec(v: Vec3, order: usize) -> JVec {
    std::array::from_fn(|i| Jet::constant(v[i], order))
}

pub fn constant_mat(m: Mat3, order: usize) -> JMat {
    std::array::from_fn(|i| constant_vec(m[i], order))
}

pub fn identity(order: usize) -> JMat {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| Jet::constant(if i == j { 1.0 } else { 0.0 }, order))
    })
}

pub fn dot(a: &JVec, b: &JVec) -> Jet {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn scale_vec(s: Jet, v: &JVec) -> JVec {
    std::array::from_fn(|i| s * v[i])
}

pub fn add_vec(a: &JVec, b: &JVec) -> JVec {
    std::array::from_fn(|i| a[i] + b[i])
}

pub fn sub_vec(a: &JVec, b: &JVec) -> JVec {
    std::array::from_fn(|i| a[i] - b[i])
}

pub fn mat_vec(m: &JMat, v: &JVec) -> JVec {
    std::array::from_fn(|k| dot(&m[k], v))
}

/// Row covector times matrix: (w M)_j = w_k M^k_j.
pub fn covec_mat(w: &JVec, m: &JMat) -> JVec {
    std::array::from_fn(|j| w[0] * m[0][j] + w[1] * m[1][j] + w[2] * m[2][j])
}

pub fn mat_mul(a: &JMat, b: &JMat) -> JMat {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j])
    })
}

pub fn add_mat(a: &JMat, b: &JMat) -> JMat {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] + b[i][j]))
}

pub fn sub_mat(a: &JMat, b: &JMat) -> JMat {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] - b[i][j]))
}

pub fn scale_mat(s: Jet, m: &JMat) -> JMat {
    std::array::from_fn(|i| std::array::from_fn(|j| s * m[i][j]))
}

pub fn transpose(m: &JMat) -> JMat {
    std::array::from_fn(|i| std::array::from_fn(|j| m[j][i]))
}

pub fn trace(m: &JMat) -> Jet {
    m[0][0] + m[1][1] + m[2][2]
}

/// v ⊗ w as an endomorphism: Y ↦ w(Y) v.
pub fn outer(v: &JVec, w: &JVec) -> JMat {
    std::array::from_fn(|k| std::array::from_fn(|j| v[k] * w[j]))
}

/// X(f) = X^i ∂_i f.
pub fn directional(x: &JVec, f: &Jet) -> Jet {
    (0..3)
        .map(|i| x[i] * f.derivative(i))
        .reduce(|a, b| a + b)
        .unwrap()
}

pub fn value_inverse(m: &Mat3) -> Result<Mat3, EvalError> {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if det.abs() < crate::jetcalc::DIVISION_GUARD {
        return Err(EvalError::NearZeroDenominator { value: det });
    }
    let c = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    Ok([
        [c(1, 2, 1, 2) / det, -c(0, 2, 1, 2) / det, c(0, 1, 1, 2) / det],
        [-c(1, 2, 0, 2) / det, c(0, 2, 0, 2) / det, -c(0, 1, 0, 2) / det],
        [c(1, 2, 0, 1) / det, -c(0, 2, 0, 1) / det, c(0, 1, 0, 1) / det],
    ])
}

/// Inverse of a jet matrix. The value is inverted directly; derivatives
/// follow from the truncated Neumann series
/// (A + N)^{-1} = Σ_k (−A^{-1} N)^k A^{-1}, which at first order is
/// ∂(M^{-1}) = −M^{-1} (∂M) M^{-1}.
pub fn inverse(m: &JMat) -> Result<JMat, EvalError> {
    let order = order_of_mat(m);
    let a_inv = constant_mat(value_inverse(&mat_value(m))?, order);
    let mut nilpotent = *m;
    for row in nilpotent.iter_mut() {
        for e in row.iter_mut() {
            *e = *e - Jet::constant(e.value(), order);
        }
    }
    let x = mat_mul(&a_inv, &nilpotent);
    let mut series = identity(order);
    let mut term = identity(order);
    for _ in 0..order {
        term = scale_mat(Jet::constant(-1.0, order), &mat_mul(&term, &x));
        series = add_mat(&series, &term);
    }
    Ok(mat_mul(&series, &a_inv))
}

/// [X, Y]^k = X^i ∂_i Y^k − Y^i ∂_i X^k.
pub fn lie_bracket(x: &JVec, y: &JVec) -> JVec {
    std::array::from_fn(|k| directional(x, &y[k]) - directional(y, &x[k]))
}

/// (L_Z T)^k_j = Z^i ∂_i T^k_j − T^i_j ∂_i Z^k + T^k_i ∂_j Z^i.
pub fn lie_derivative_endo(z: &JVec, t: &JMat) -> JMat {
    std::array::from_fn(|k| {
        std::array::from_fn(|j| {
            let mut acc = directional(z, &t[k][j]);
            for i in 0..3 {
                acc -= t[i][j] * z[k].derivative(i);
                acc += t[k][i] * z[i].derivative(j);
            }
            acc
        })
    })
}

/// (L_Z g)_ij = Z^k ∂_k g_ij + g_kj ∂_i Z^k + g_ik ∂_j Z^k.
pub fn lie_derivative_metric(z: &JVec, g: &JMat) -> JMat {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut acc = directional(z, &g[i][j]);
            for k in 0..3 {
                acc += g[k][j] * z[k].derivative(i);
                acc += g[i][k] * z[k].derivative(j);
            }
            acc
        })
    })
}

/// (dη)_ij = ∂_i η_j − ∂_j η_i.
pub fn exterior_derivative(eta: &JVec) -> JMat {
    std::array::from_fn(|i| std::array::from_fn(|j| eta[j].derivative(i) - eta[i].derivative(j)))
}

pub fn truncate_vec(v: &JVec, order: usize) -> JVec {
    std::array::from_fn(|i| v[i].truncate(order))
}

pub fn truncate_mat(m: &JMat, order: usize) -> JMat {
    std::array::from_fn(|i| truncate_vec(&m[i], order))
}
