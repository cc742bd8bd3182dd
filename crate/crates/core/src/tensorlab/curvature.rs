use crate::jetcalc::{EvalError, Jet, Point, ScalarField};

use super::fields::{EndoField, MetricField, VectorField};
use super::local::{self, JMat, JVec};
use super::{condition_number, symmetric_eigenvalues, Mat3, Vec3};

/// Points whose metric condition number exceeds this are reported as
/// untrusted rather than pass/fail.
pub const CONDITION_LIMIT: f64 = 1e8;

/// Metric jets are taken to third order: Γ keeps two orders and the
/// curvature one, enough for ∇Ric and dr.
const METRIC_ORDER: usize = 3;

/// Γ^k_ij stored as `[k][i][j]`.
pub type Christoffel = [[[Jet; 3]; 3]; 3];
/// R^l_kij stored as `[l][k][i][j]`, with R(∂_i, ∂_j)∂_k = R^l_kij ∂_l.
pub type Riemann = [[[[Jet; 3]; 3]; 3]; 3];

/// The Levi-Civita connection of a metric together with its curvature.
/// Everything is produced per point; see [`CurvatureBundle::at`].
#[derive(Debug, Clone)]
pub struct CurvatureBundle {
    metric: MetricField,
}

pub fn christoffel(g: &MetricField) -> CurvatureBundle {
    CurvatureBundle { metric: g.clone() }
}

impl CurvatureBundle {
    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn at(&self, p: &Point) -> Result<PointGeometry, EvalError> {
        PointGeometry::new(&self.metric, p)
    }

    /// Γ^k_ij values at a point, `[k][i][j]`.
    pub fn christoffel_at(&self, p: &Point) -> Result<[[[f64; 3]; 3]; 3], EvalError> {
        let g = self.metric.jets(p, 1)?;
        let gamma = christoffel_jets(&g)?;
        Ok(std::array::from_fn(|k| {
            std::array::from_fn(|i| std::array::from_fn(|j| gamma[k][i][j].value()))
        }))
    }
}

fn christoffel_jets(g: &JMat) -> Result<Christoffel, EvalError> {
    let ginv = local::inverse(g)?;
    // dg[a][b][c] = ∂_a g_bc
    let dg: [JMat; 3] =
        std::array::from_fn(|a| std::array::from_fn(|b| std::array::from_fn(|c| g[b][c].derivative(a))));
    Ok(std::array::from_fn(|k| {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut acc = Jet::zero(0);
                for l in 0..3 {
                    let t = ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                    acc = if l == 0 { t } else { acc + t };
                }
                acc.scale(0.5)
            })
        })
    }))
}

/// Connection and curvature of a metric at a single point, as jets.
#[derive(Debug, Clone)]
pub struct PointGeometry {
    pub point: Point,
    /// Metric jet (order 3).
    pub g: JMat,
    /// Inverse metric jet (order 3).
    pub ginv: JMat,
    /// Christoffel symbols (order 2).
    pub gamma: Christoffel,
    /// Riemann tensor (order 1).
    pub riemann: Riemann,
    /// Ric_jk (order 1).
    pub ricci: JMat,
    /// Ricci operator Q^a_b = g^ac Ric_cb (order 1).
    pub q: JMat,
    /// Scalar curvature (order 1).
    pub r: Jet,
    pub min_eigenvalue: f64,
    pub condition: f64,
}

impl PointGeometry {
    pub fn new(metric: &MetricField, p: &Point) -> Result<Self, EvalError> {
        let g = metric.jets(p, METRIC_ORDER)?;
        let ginv = local::inverse(&g)?;
        let gamma = christoffel_jets(&g)?;
        let riemann: Riemann = std::array::from_fn(|l| {
            std::array::from_fn(|k| {
                std::array::from_fn(|i| {
                    std::array::from_fn(|j| {
                        let mut acc = gamma[l][j][k].derivative(i) - gamma[l][i][k].derivative(j);
                        for m in 0..3 {
                            acc += gamma[l][i][m] * gamma[m][j][k] - gamma[l][j][m] * gamma[m][i][k];
                        }
                        acc
                    })
                })
            })
        });
        let ricci: JMat = std::array::from_fn(|j| {
            std::array::from_fn(|k| riemann[0][k][0][j] + riemann[1][k][1][j] + riemann[2][k][2][j])
        });
        let q = local::mat_mul(&ginv, &ricci);
        let r = local::trace(&q);
        let gv = local::mat_value(&g);
        let ev = symmetric_eigenvalues(&gv);
        Ok(PointGeometry {
            point: *p,
            g,
            ginv,
            gamma,
            riemann,
            ricci,
            q,
            r,
            min_eigenvalue: ev[0],
            condition: condition_number(&gv),
        })
    }

    pub fn trusted(&self) -> bool {
        self.condition <= CONDITION_LIMIT
    }

    pub fn metric_value(&self) -> Mat3 {
        local::mat_value(&self.g)
    }

    pub fn inverse_value(&self) -> Mat3 {
        local::mat_value(&self.ginv)
    }

    pub fn ricci_value(&self) -> Mat3 {
        local::mat_value(&self.ricci)
    }

    pub fn q_value(&self) -> Mat3 {
        local::mat_value(&self.q)
    }

    pub fn inner(&self, x: Vec3, y: Vec3) -> f64 {
        super::bilinear(&self.metric_value(), x, y)
    }

    /// g(X, Y) as a jet.
    pub fn inner_jet(&self, x: &JVec, y: &JVec) -> Jet {
        local::dot(x, &local::mat_vec(&self.g, y))
    }

    /// Index lowering X ↦ g(X, ·) as a jet covector.
    pub fn lower(&self, x: &JVec) -> JVec {
        local::mat_vec(&self.g, x)
    }

    pub fn norm(&self, x: Vec3) -> f64 {
        self.inner(x, x).max(0.0).sqrt()
    }

    /// (∇_X Y)^k = X^i (∂_i Y^k + Γ^k_ij Y^j). `Y` needs order ≥ 1; the
    /// result has one order less.
    pub fn covariant_vector(&self, x: &JVec, y: &JVec) -> JVec {
        std::array::from_fn(|k| {
            let mut acc = Jet::zero(0);
            for i in 0..3 {
                let mut inner = y[k].derivative(i);
                for j in 0..3 {
                    inner += self.gamma[k][i][j] * y[j];
                }
                acc = if i == 0 { x[i] * inner } else { acc + x[i] * inner };
            }
            acc
        })
    }

    /// (∇_X T)^k_j = X^i (∂_i T^k_j + Γ^k_im T^m_j − Γ^m_ij T^k_m).
    pub fn covariant_endo(&self, x: &JVec, t: &JMat) -> JMat {
        std::array::from_fn(|k| {
            std::array::from_fn(|j| {
                let mut acc = Jet::zero(0);
                for i in 0..3 {
                    let mut inner = t[k][j].derivative(i);
                    for m in 0..3 {
                        inner += self.gamma[k][i][m] * t[m][j] - self.gamma[m][i][j] * t[k][m];
                    }
                    acc = if i == 0 { x[i] * inner } else { acc + x[i] * inner };
                }
                acc
            })
        })
    }

    /// (∇_i B)_jk for a symmetric (0,2) jet, `[i][j][k]`.
    fn covariant_bilinear(&self, b: &JMat) -> [JMat; 3] {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                std::array::from_fn(|k| {
                    let mut acc = b[j][k].derivative(i);
                    for m in 0..3 {
                        acc -= self.gamma[m][i][j] * b[m][k] + self.gamma[m][i][k] * b[j][m];
                    }
                    acc
                })
            })
        })
    }

    /// max |(∇_i g)_jk|.
    pub fn metric_compatibility_residual(&self) -> f64 {
        self.covariant_bilinear(&self.g)
            .iter()
            .flatten()
            .flatten()
            .fold(0.0_f64, |acc, j| acc.max(j.value().abs()))
    }

    /// max |Γ^k_ij − Γ^k_ji|.
    pub fn torsion_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    worst = worst.max((self.gamma[k][i][j].value() - self.gamma[k][j][i].value()).abs());
                }
            }
        }
        worst
    }

    /// max over k of |g^ij (∇_i Ric)_jk − ½ ∂_k r|.
    pub fn contracted_bianchi_residual(&self) -> f64 {
        let nabla_ric = self.covariant_bilinear(&self.ricci);
        let ginv = self.inverse_value();
        let dr = self.r.gradient();
        (0..3)
            .map(|k| {
                let mut div = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        div += ginv[i][j] * nabla_ric[i][j][k].value();
                    }
                }
                (div - 0.5 * dr[k]).abs()
            })
            .fold(0.0, f64::max)
    }

    /// R(X, Y)Z at the point.
    pub fn riemann_apply(&self, x: Vec3, y: Vec3, z: Vec3) -> Vec3 {
        std::array::from_fn(|l| {
            let mut acc = 0.0;
            for k in 0..3 {
                for i in 0..3 {
                    for j in 0..3 {
                        acc += self.riemann[l][k][i][j].value() * z[k] * x[i] * y[j];
                    }
                }
            }
            acc
        })
    }

    pub fn ricci_apply(&self, x: Vec3, y: Vec3) -> f64 {
        super::bilinear(&self.ricci_value(), x, y)
    }

    pub fn q_apply(&self, x: Vec3) -> Vec3 {
        super::mat_vec(&self.q_value(), x)
    }

    pub fn scalar_curvature(&self) -> f64 {
        self.r.value()
    }

    /// Largest |R^l_kij|, a scale for curvature residuals.
    pub fn curvature_scale(&self) -> f64 {
        self.riemann
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .fold(0.0_f64, |acc, j| acc.max(j.value().abs()))
    }

    /// Chart norm of the difference between R(X,Y)Z and the expression of
    /// the three-dimensional curvature through Ric, Q and r.
    pub fn petersen_residual(&self, x: Vec3, y: Vec3, z: Vec3) -> f64 {
        use super::{add, norm, scale, sub};
        let lhs = self.riemann_apply(x, y, z);
        let r = self.scalar_curvature();
        let (gzy, gzx) = (self.inner(z, y), self.inner(z, x));
        let mut rhs = sub(scale(self.ricci_apply(z, y), x), scale(self.ricci_apply(z, x), y));
        rhs = add(rhs, sub(scale(gzy, self.q_apply(x)), scale(gzx, self.q_apply(y))));
        rhs = sub(rhs, scale(0.5 * r, sub(scale(gzy, x), scale(gzx, y))));
        norm(sub(lhs, rhs))
    }

    /// Largest violation among R(X,Y)Z = −R(Y,X)Z, the first Bianchi
    /// identity and g(R(X,Y)Z, W) = g(R(Z,W)X, Y).
    pub fn curvature_symmetry_residual(&self, x: Vec3, y: Vec3, z: Vec3, w: Vec3) -> f64 {
        use super::{add, norm};
        let antisym = norm(add(self.riemann_apply(x, y, z), self.riemann_apply(y, x, z)));
        let bianchi = norm(add(
            add(self.riemann_apply(x, y, z), self.riemann_apply(y, z, x)),
            self.riemann_apply(z, x, y),
        ));
        let pair = (self.inner(self.riemann_apply(x, y, z), w)
            - self.inner(self.riemann_apply(z, w, x), y))
        .abs();
        antisym.max(bianchi).max(pair)
    }

    /// grad F = g⁻¹ dF.
    pub fn gradient(&self, f: &Jet) -> Vec3 {
        super::mat_vec(&self.inverse_value(), f.gradient())
    }
}

/// (∇_X Y) at `p`.
pub fn covariant_derivative_vector(
    b: &CurvatureBundle,
    x: &VectorField,
    y: &VectorField,
    p: &Point,
) -> Result<Vec3, EvalError> {
    let geo = b.at(p)?;
    Ok(local::vec_value(&geo.covariant_vector(&x.jets(p, 0)?, &y.jets(p, 1)?)))
}

/// (∇_X T) at `p`.
pub fn covariant_derivative_endo(
    b: &CurvatureBundle,
    x: &VectorField,
    t: &EndoField,
    p: &Point,
) -> Result<Mat3, EvalError> {
    let geo = b.at(p)?;
    Ok(local::mat_value(&geo.covariant_endo(&x.jets(p, 0)?, &t.jets(p, 1)?)))
}

/// R(X, Y)Z at `p`.
pub fn riemann(
    b: &CurvatureBundle,
    x: &VectorField,
    y: &VectorField,
    z: &VectorField,
    p: &Point,
) -> Result<Vec3, EvalError> {
    Ok(b.at(p)?.riemann_apply(x.eval(p)?, y.eval(p)?, z.eval(p)?))
}

/// Ricci operator, Ricci tensor and scalar curvature at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicciAt {
    pub q: Mat3,
    pub ric: Mat3,
    pub r: f64,
}

pub fn ricci(b: &CurvatureBundle, p: &Point) -> Result<RicciAt, EvalError> {
    let geo = b.at(p)?;
    Ok(RicciAt {
        q: geo.q_value(),
        ric: geo.ricci_value(),
        r: geo.scalar_curvature(),
    })
}

pub fn contracted_bianchi_residual(b: &CurvatureBundle, p: &Point) -> Result<f64, EvalError> {
    Ok(b.at(p)?.contracted_bianchi_residual())
}

pub fn petersen_residual(
    b: &CurvatureBundle,
    x: &VectorField,
    y: &VectorField,
    z: &VectorField,
    p: &Point,
) -> Result<f64, EvalError> {
    Ok(b.at(p)?.petersen_residual(x.eval(p)?, y.eval(p)?, z.eval(p)?))
}

pub fn gradient(b: &CurvatureBundle, f: &ScalarField, p: &Point) -> Result<Vec3, EvalError> {
    Ok(b.at(p)?.gradient(&f.eval_jet(p, 1)?))
}

/// Γ^k_ij from central differences of the metric values, `[k][i][j]`.
/// Used only as an independent oracle for the exact computation.
pub fn christoffel_finite_difference(
    g: &MetricField,
    p: &Point,
    step: f64,
) -> Result<[[[f64; 3]; 3]; 3], EvalError> {
    let ginv = local::value_inverse(&g.eval(p)?)?;
    let mut dg = [[[0.0; 3]; 3]; 3];
    for (a, slot) in dg.iter_mut().enumerate() {
        let (mut plus, mut minus) = (*p, *p);
        plus[a] += step;
        minus[a] -= step;
        let (gp, gm) = (g.eval(&plus)?, g.eval(&minus)?);
        for b in 0..3 {
            for c in 0..3 {
                slot[b][c] = (gp[b][c] - gm[b][c]) / (2.0 * step);
            }
        }
    }
    Ok(std::array::from_fn(|k| {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                0.5 * (0..3)
                    .map(|l| ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]))
                    .sum::<f64>()
            })
        })
    }))
}
