use crate::jetcalc::{EvalError, Point, ScalarField};

use super::local::{JMat, JVec};
use super::Mat3;

fn jets3(c: &[ScalarField; 3], p: &Point, order: usize) -> Result<JVec, EvalError> {
    Ok([
        c[0].eval_jet(p, order)?,
        c[1].eval_jet(p, order)?,
        c[2].eval_jet(p, order)?,
    ])
}

fn eval3(c: &[ScalarField; 3], p: &Point) -> Result<[f64; 3], EvalError> {
    Ok([c[0].eval(p)?, c[1].eval(p)?, c[2].eval(p)?])
}

fn jets33(c: &[[ScalarField; 3]; 3], p: &Point, order: usize) -> Result<JMat, EvalError> {
    Ok([
        jets3(&c[0], p, order)?,
        jets3(&c[1], p, order)?,
        jets3(&c[2], p, order)?,
    ])
}

fn eval33(c: &[[ScalarField; 3]; 3], p: &Point) -> Result<Mat3, EvalError> {
    Ok([eval3(&c[0], p)?, eval3(&c[1], p)?, eval3(&c[2], p)?])
}

fn sum3(terms: impl IntoIterator<Item = ScalarField>) -> ScalarField {
    terms
        .into_iter()
        .reduce(|a, b| a + b)
        .unwrap_or_else(ScalarField::zero)
}

/// Vector field with components along ∂x, ∂y, ∂z.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField(pub [ScalarField; 3]);

impl VectorField {
    pub fn new(c: [ScalarField; 3]) -> Self {
        Self(c)
    }

    pub fn zero() -> Self {
        Self(std::array::from_fn(|_| ScalarField::zero()))
    }

    /// The coordinate field ∂_axis.
    pub fn coordinate(axis: usize) -> Self {
        Self(std::array::from_fn(|i| {
            ScalarField::constant(if i == axis { 1.0 } else { 0.0 })
        }))
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.0[i]
    }

    pub fn eval(&self, p: &Point) -> Result<[f64; 3], EvalError> {
        eval3(&self.0, p)
    }

    pub fn jets(&self, p: &Point, order: usize) -> Result<JVec, EvalError> {
        jets3(&self.0, p, order)
    }

    /// The derivation X(f) = X^i ∂_i f.
    pub fn apply(&self, f: &ScalarField) -> ScalarField {
        sum3((0..3).map(|i| &self.0[i] * f.differentiate(i)))
    }

    pub fn scale(&self, s: &ScalarField) -> VectorField {
        VectorField(std::array::from_fn(|i| s * &self.0[i]))
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        VectorField(std::array::from_fn(|i| &self.0[i] + &other.0[i]))
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        VectorField(std::array::from_fn(|i| &self.0[i] - &other.0[i]))
    }
}

/// One-form with components along dx, dy, dz.
#[derive(Debug, Clone, PartialEq)]
pub struct OneFormField(pub [ScalarField; 3]);

impl OneFormField {
    pub fn new(c: [ScalarField; 3]) -> Self {
        Self(c)
    }

    /// The differential df.
    pub fn differential(f: &ScalarField) -> Self {
        Self(std::array::from_fn(|i| f.differentiate(i)))
    }

    pub fn eval(&self, p: &Point) -> Result<[f64; 3], EvalError> {
        eval3(&self.0, p)
    }

    pub fn jets(&self, p: &Point, order: usize) -> Result<JVec, EvalError> {
        jets3(&self.0, p, order)
    }

    /// η(X) as a scalar field.
    pub fn apply(&self, x: &VectorField) -> ScalarField {
        sum3((0..3).map(|i| &self.0[i] * &x.0[i]))
    }

    pub fn scale(&self, s: &ScalarField) -> OneFormField {
        OneFormField(std::array::from_fn(|i| s * &self.0[i]))
    }

    /// Components (dη)_ij = ∂_i η_j − ∂_j η_i, so that
    /// dη(X, Y) = X η(Y) − Y η(X) − η([X, Y]).
    pub fn exterior_derivative(&self) -> [[ScalarField; 3]; 3] {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                if i == j {
                    ScalarField::zero()
                } else {
                    self.0[j].differentiate(i) - self.0[i].differentiate(j)
                }
            })
        })
    }
}

/// Symmetric (0,2) tensor field; used for metrics and for Lie derivatives of
/// metrics. Positive definiteness is checked where it matters, never assumed.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricField([[ScalarField; 3]; 3]);

impl MetricField {
    /// Builds a symmetric field from the upper triangle
    /// `[g_xx, g_xy, g_xz, g_yy, g_yz, g_zz]`.
    pub fn from_upper(u: [ScalarField; 6]) -> Self {
        let [xx, xy, xz, yy, yz, zz] = u;
        Self([
            [xx, xy.clone(), xz.clone()],
            [xy, yy, yz.clone()],
            [xz, yz, zz],
        ])
    }

    /// Builds from a full array, keeping the upper triangle.
    pub fn symmetric_from(c: [[ScalarField; 3]; 3]) -> Self {
        Self::from_upper([
            c[0][0].clone(),
            c[0][1].clone(),
            c[0][2].clone(),
            c[1][1].clone(),
            c[1][2].clone(),
            c[2][2].clone(),
        ])
    }

    pub fn euclidean() -> Self {
        Self(std::array::from_fn(|i| {
            std::array::from_fn(|j| ScalarField::constant(if i == j { 1.0 } else { 0.0 }))
        }))
    }

    pub fn component(&self, i: usize, j: usize) -> &ScalarField {
        &self.0[i][j]
    }

    pub fn components(&self) -> &[[ScalarField; 3]; 3] {
        &self.0
    }

    pub fn eval(&self, p: &Point) -> Result<Mat3, EvalError> {
        eval33(&self.0, p)
    }

    pub fn jets(&self, p: &Point, order: usize) -> Result<JMat, EvalError> {
        jets33(&self.0, p, order)
    }

    pub fn inner(&self, x: &VectorField, y: &VectorField) -> ScalarField {
        sum3((0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| {
            &self.0[i][j] * &x.0[i] * &y.0[j]
        }))
    }

    pub fn scale(&self, s: &ScalarField) -> MetricField {
        MetricField(std::array::from_fn(|i| {
            std::array::from_fn(|j| s * &self.0[i][j])
        }))
    }

    pub fn add(&self, other: &MetricField) -> MetricField {
        MetricField(std::array::from_fn(|i| {
            std::array::from_fn(|j| &self.0[i][j] + &other.0[i][j])
        }))
    }

    /// α⊗α.
    pub fn square(a: &OneFormField) -> MetricField {
        MetricField::symmetric_from(std::array::from_fn(|i| {
            std::array::from_fn(|j| &a.0[i] * &a.0[j])
        }))
    }

    /// ½(α⊗β + β⊗α).
    pub fn symmetric_product(a: &OneFormField, b: &OneFormField) -> MetricField {
        MetricField::symmetric_from(std::array::from_fn(|i| {
            std::array::from_fn(|j| 0.5 * (&a.0[i] * &b.0[j] + &b.0[i] * &a.0[j]))
        }))
    }
}

/// (1,1) tensor field; `0[k][j]` is T^k_j, so (TX)^k = T^k_j X^j.
#[derive(Debug, Clone, PartialEq)]
pub struct EndoField(pub [[ScalarField; 3]; 3]);

impl EndoField {
    pub fn new(c: [[ScalarField; 3]; 3]) -> Self {
        Self(c)
    }

    pub fn identity() -> Self {
        Self(std::array::from_fn(|i| {
            std::array::from_fn(|j| ScalarField::constant(if i == j { 1.0 } else { 0.0 }))
        }))
    }

    pub fn zero() -> Self {
        Self(std::array::from_fn(|_| std::array::from_fn(|_| ScalarField::zero())))
    }

    /// The rank-one endomorphism Y ↦ ω(Y) v.
    pub fn outer(v: &VectorField, w: &OneFormField) -> Self {
        Self(std::array::from_fn(|k| std::array::from_fn(|j| &v.0[k] * &w.0[j])))
    }

    pub fn eval(&self, p: &Point) -> Result<Mat3, EvalError> {
        eval33(&self.0, p)
    }

    pub fn jets(&self, p: &Point, order: usize) -> Result<JMat, EvalError> {
        jets33(&self.0, p, order)
    }

    pub fn apply(&self, x: &VectorField) -> VectorField {
        VectorField(std::array::from_fn(|k| {
            sum3((0..3).map(|j| &self.0[k][j] * &x.0[j]))
        }))
    }

    pub fn add(&self, other: &EndoField) -> EndoField {
        EndoField(std::array::from_fn(|k| {
            std::array::from_fn(|j| &self.0[k][j] + &other.0[k][j])
        }))
    }

    pub fn scale(&self, s: &ScalarField) -> EndoField {
        EndoField(std::array::from_fn(|k| {
            std::array::from_fn(|j| s * &self.0[k][j])
        }))
    }
}

/// [X, Y]^k = X^i ∂_i Y^k − Y^i ∂_i X^k.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> VectorField {
    VectorField(std::array::from_fn(|k| x.apply(&y.0[k]) - y.apply(&x.0[k])))
}

/// (L_Z g)_ij = Z^k ∂_k g_ij + g_kj ∂_i Z^k + g_ik ∂_j Z^k, the coordinate
/// form of Z g(X,Y) − g([Z,X],Y) − g(X,[Z,Y]).
pub fn lie_derivative_metric(z: &VectorField, g: &MetricField) -> MetricField {
    let c = g.components();
    MetricField::symmetric_from(std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let transport = sum3((0..3).map(|k| {
                &c[k][j] * z.0[k].differentiate(i) + &c[i][k] * z.0[k].differentiate(j)
            }));
            z.apply(&c[i][j]) + transport
        })
    }))
}

/// (L_Z T)(Y) = [Z, TY] − T[Z, Y], in components
/// Z^i ∂_i T^k_j − T^i_j ∂_i Z^k + T^k_i ∂_j Z^i.
pub fn lie_derivative_endo(z: &VectorField, t: &EndoField) -> EndoField {
    EndoField(std::array::from_fn(|k| {
        std::array::from_fn(|j| {
            let a = z.apply(&t.0[k][j]);
            let b = sum3((0..3).map(|i| &t.0[i][j] * z.0[k].differentiate(i)));
            let c = sum3((0..3).map(|i| &t.0[k][i] * z.0[i].differentiate(j)));
            a - b + c
        })
    }))
}

/// (L_Z η)_j = Z^i ∂_i η_j + η_i ∂_j Z^i.
pub fn lie_derivative_form(z: &VectorField, eta: &OneFormField) -> OneFormField {
    OneFormField(std::array::from_fn(|j| {
        z.apply(&eta.0[j]) + sum3((0..3).map(|i| &eta.0[i] * z.0[i].differentiate(j)))
    }))
}
