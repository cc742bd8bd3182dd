//! Contact metric structures, their axioms and the curvature classifiers
//! built on them.
//!
//! A [`ContactStructure`] is symbolic in η, ξ and g. The endomorphism φ is
//! either given in closed form or solved pointwise from dη = 2g(·, φ·). All
//! derived tensors (h, eigenframes, fits) are evaluated per point through
//! [`LocalContact`].

mod checks;
mod structure_file;

pub use checks::*;
pub use structure_file::{load_structure, parse_structure, StructureFile};

use std::collections::BTreeMap;

use nalgebra::{Cholesky, Matrix3, Vector3};
use serde_json::Value;

use crate::jetcalc::{Jet, Point, ScalarField};
use crate::sampling::SampleDomain;
use crate::tensorlab::local::{self, JMat, JVec};
use crate::tensorlab::{
    self, christoffel, EndoField, Mat3, MetricField, OneFormField, PointGeometry, Vec3, VectorField,
};
use crate::{Error, Result};

/// Below this size h is treated as zero: no eigenframe, and μ cannot be
/// identified.
pub const H_ZERO: f64 = 1e-8;

/// Smallest admissible |η ∧ dη| and smallest metric eigenvalue.
pub const DEGENERACY_FLOOR: f64 = 1e-10;

/// Order of the η and ξ jets; φ then carries order 2 and h order 1.
const STRUCTURE_ORDER: usize = 3;

#[derive(Debug, Clone)]
pub enum PhiSource {
    /// φ given in closed form.
    Explicit(EndoField),
    /// φ = ½ g⁻¹ dη, solved at each point.
    Solved,
}

/// A horizontal frame {E, φE} carried along by the model that built the
/// structure.
#[derive(Debug, Clone)]
pub struct ReferenceFrame {
    pub e: VectorField,
    pub phi_e: VectorField,
}

#[derive(Debug, Clone)]
pub struct ContactStructure {
    pub label: String,
    pub eta: OneFormField,
    pub xi: VectorField,
    pub phi: PhiSource,
    pub g: MetricField,
    pub domain: SampleDomain,
    pub frame: Option<ReferenceFrame>,
    pub provenance: BTreeMap<String, Value>,
}

impl ContactStructure {
    pub fn new(
        label: &str,
        eta: OneFormField,
        xi: VectorField,
        phi: PhiSource,
        g: MetricField,
        domain: SampleDomain,
    ) -> Self {
        ContactStructure {
            label: label.to_string(),
            eta,
            xi,
            phi,
            g,
            domain,
            frame: None,
            provenance: BTreeMap::new(),
        }
    }

    pub fn with_frame(mut self, frame: ReferenceFrame) -> Self {
        self.frame = Some(frame);
        self
    }

    pub fn with_provenance(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.provenance.insert(key.to_string(), value.into());
        self
    }

    pub fn local(&self, p: &Point) -> Result<LocalContact> {
        LocalContact::new(self, p)
    }
}

/// The Reeb field: the unique ξ with η(ξ) = 1 and dη(ξ, ·) = 0. The kernel
/// of the 2-form dη is spanned by v = (dη_yz, dη_zx, dη_xy), so ξ = v / η(v).
/// Evaluation fails where η(v), the density of η ∧ dη, vanishes.
pub fn reeb_field(eta: &OneFormField, _g: &MetricField) -> VectorField {
    let d = eta.exterior_derivative();
    let v = [d[1][2].clone(), d[2][0].clone(), d[0][1].clone()];
    let norm = &eta.0[0] * &v[0] + &eta.0[1] * &v[1] + &eta.0[2] * &v[2];
    VectorField::new(v.map(|c| c / &norm))
}

/// φ = ½ g⁻¹ dη as a jet.
pub fn solve_phi(g: &JMat, deta: &JMat) -> Result<JMat> {
    let ginv = local::inverse(g)?;
    Ok(local::scale_mat(Jet::constant(0.5, 3), &local::mat_mul(&ginv, deta)))
}

/// Orthonormal horizontal pair used as a working frame at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizontalFrame {
    pub e: Vec3,
    pub phi_e: Vec3,
    /// Largest eigenvalue of h (zero when h vanishes).
    pub lambda_h: f64,
    /// Whether `e` is an eigenvector of h.
    pub from_h: bool,
}

/// Eigenvalue λ_h > 0 of h with unit eigenvector E and its image φE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenframe {
    pub lambda_h: f64,
    pub e: Vec3,
    pub phi_e: Vec3,
}

/// Jets of the h-eigenframe, for identities involving its derivatives.
#[derive(Debug, Clone)]
pub struct EigenframeJets {
    pub lambda_h: Jet,
    pub e: JVec,
    pub phi_e: JVec,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KmuFit {
    pub kappa: f64,
    pub mu: f64,
    pub residual: f64,
    pub mu_identifiable: bool,
    pub lambda_h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaEinsteinFit {
    pub lambda_ric: f64,
    pub gamma: f64,
    pub residual: f64,
}

/// Structure tensors and curvature at one point.
#[derive(Debug, Clone)]
pub struct LocalContact {
    pub geo: PointGeometry,
    /// η (order 3).
    pub eta: JVec,
    /// ξ (order 3).
    pub xi: JVec,
    /// (dη)_ij (order 2).
    pub deta: JMat,
    /// φ (order 2).
    pub phi: JMat,
    /// h = ½ L_ξ φ (order 1).
    pub h: JMat,
}

impl LocalContact {
    pub fn new(s: &ContactStructure, p: &Point) -> Result<Self> {
        let geo = christoffel(&s.g).at(p)?;
        let eta = s.eta.jets(p, STRUCTURE_ORDER)?;
        let xi = s.xi.jets(p, STRUCTURE_ORDER)?;
        let deta = local::exterior_derivative(&eta);
        let phi = match &s.phi {
            PhiSource::Explicit(phi) => phi.jets(p, 2)?,
            PhiSource::Solved => local::truncate_mat(&solve_phi(&geo.g, &deta)?, 2),
        };
        let h = local::scale_mat(Jet::constant(0.5, 3), &local::lie_derivative_endo(&xi, &phi));
        Ok(LocalContact { geo, eta, xi, deta, phi, h })
    }

    pub fn point(&self) -> Point {
        self.geo.point
    }

    pub fn eta_v(&self) -> Vec3 {
        local::vec_value(&self.eta)
    }

    pub fn xi_v(&self) -> Vec3 {
        local::vec_value(&self.xi)
    }

    pub fn phi_v(&self) -> Mat3 {
        local::mat_value(&self.phi)
    }

    pub fn h_v(&self) -> Mat3 {
        local::mat_value(&self.h)
    }

    pub fn deta_v(&self) -> Mat3 {
        local::mat_value(&self.deta)
    }

    pub fn eta_of(&self, x: Vec3) -> f64 {
        tensorlab::dot(self.eta_v(), x)
    }

    pub fn phi_of(&self, x: Vec3) -> Vec3 {
        tensorlab::mat_vec(&self.phi_v(), x)
    }

    pub fn h_of(&self, x: Vec3) -> Vec3 {
        tensorlab::mat_vec(&self.h_v(), x)
    }

    /// X − η(X)ξ.
    pub fn horizontal_part(&self, x: Vec3) -> Vec3 {
        tensorlab::sub(x, tensorlab::scale(self.eta_of(x), self.xi_v()))
    }

    pub fn trusted(&self) -> bool {
        self.geo.trusted()
    }

    /// L_ξ g (order 2).
    pub fn lie_xi_metric(&self) -> JMat {
        local::lie_derivative_metric(&self.xi, &self.geo.g)
    }

    /// Symmetric eigen-decomposition of h in a g-orthonormal basis. Returns
    /// the largest eigenvalue and a g-unit eigenvector, with its largest
    /// component made positive.
    fn h_top_eigenpair(&self) -> Option<(f64, Vec3)> {
        let g = Matrix3::from_fn(|i, j| self.geo.metric_value()[i][j]);
        let l = Cholesky::new(g)?.l();
        let l_inv_t = l.transpose().try_inverse()?;
        let h = Matrix3::from_fn(|i, j| self.h_v()[i][j]);
        let hat = l.transpose() * h * l_inv_t;
        let sym = (hat + hat.transpose()) * 0.5;
        let eig = sym.symmetric_eigen();
        let top = (0..3)
            .max_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]))
            .unwrap();
        let v: Vector3<f64> = eig.eigenvectors.column(top).into();
        let e = l_inv_t * v;
        let mut e = [e[0], e[1], e[2]];
        let lead = (0..3).max_by(|&a, &b| e[a].abs().total_cmp(&e[b].abs())).unwrap();
        if e[lead] < 0.0 {
            e = tensorlab::scale(-1.0, e);
        }
        Some((eig.eigenvalues[top], e))
    }

    /// hE = λ_h E with λ_h > 0, E a g-unit vector; `None` when h ≈ 0.
    pub fn h_eigenframe(&self) -> Option<Eigenframe> {
        let (lambda_h, e) = self.h_top_eigenpair()?;
        if lambda_h < H_ZERO {
            return None;
        }
        Some(Eigenframe { lambda_h, e, phi_e: self.phi_of(e) })
    }

    /// The h-eigenframe when h ≠ 0; otherwise a unit horizontal vector
    /// obtained from the coordinate field with the largest horizontal part.
    pub fn horizontal_frame(&self) -> Result<HorizontalFrame> {
        if let Some(ef) = self.h_eigenframe() {
            return Ok(HorizontalFrame { e: ef.e, phi_e: ef.phi_e, lambda_h: ef.lambda_h, from_h: true });
        }
        let candidates: Vec<Vec3> = (0..3)
            .map(|m| {
                let mut v = [0.0; 3];
                v[m] = 1.0;
                self.horizontal_part(v)
            })
            .collect();
        let best = candidates
            .iter()
            .max_by(|a, b| self.geo.norm(**a).total_cmp(&self.geo.norm(**b)))
            .unwrap();
        let n = self.geo.norm(*best);
        if n < DEGENERACY_FLOOR {
            return Err(Error::DegenerateContactForm { point: self.point() });
        }
        let e = tensorlab::scale(1.0 / n, *best);
        Ok(HorizontalFrame { e, phi_e: self.phi_of(e), lambda_h: 0.0, from_h: false })
    }

    /// Eigenframe jets from the spectral projector P = (h² + λh) / (2λ²),
    /// with λ² = ½ tr h². P maps onto the λ-eigenline when the spectrum of
    /// h is {λ, −λ, 0}.
    pub fn h_eigenframe_jets(&self) -> Result<Option<EigenframeJets>> {
        let Some(ef) = self.h_eigenframe() else { return Ok(None) };
        let h2 = local::mat_mul(&self.h, &self.h);
        let lambda = (local::trace(&h2) * 0.5).sqrt()?;
        let denom = (lambda * lambda * 2.0).recip()?;
        let proj = local::scale_mat(denom, &local::add_mat(&h2, &local::scale_mat(lambda, &self.h)));
        let g = local::truncate_mat(&self.geo.g, 1);
        let columns: Vec<JVec> = (0..3).map(|m| std::array::from_fn(|k| proj[k][m])).collect();
        let norm2 = |v: &JVec| local::dot(v, &local::mat_vec(&g, v));
        let best = columns
            .iter()
            .max_by(|a, b| norm2(a).value().total_cmp(&norm2(b).value()))
            .unwrap();
        let mut inv_norm = norm2(best).sqrt()?.recip()?;
        if tensorlab::dot(local::vec_value(best), ef.e) < 0.0 {
            inv_norm = -inv_norm;
        }
        let e = local::scale_vec(inv_norm, best);
        let phi_e = local::mat_vec(&local::truncate_mat(&self.phi, 1), &e);
        Ok(Some(EigenframeJets { lambda_h: lambda, e, phi_e }))
    }

    /// Least-squares fit of R(X,ξ)ξ = κ(X − η(X)ξ) + μhX. Over {E, φE} when
    /// h has an eigenframe; over the coordinate fields with μ = 0 otherwise.
    pub fn fit_kappa_mu(&self) -> KmuFit {
        let xi = self.xi_v();
        let jacobi = |x: Vec3| self.geo.riemann_apply(x, xi, xi);
        let ip = |a: Vec3, b: Vec3| self.geo.inner(a, b);
        match self.h_eigenframe() {
            Some(ef) => {
                let (mut aa, mut ab, mut bb, mut aj, mut bj) = (0.0, 0.0, 0.0, 0.0, 0.0);
                let rows: Vec<(Vec3, Vec3, Vec3)> = [ef.e, ef.phi_e]
                    .iter()
                    .map(|&x| (self.horizontal_part(x), self.h_of(x), jacobi(x)))
                    .collect();
                for &(a, b, j) in &rows {
                    aa += ip(a, a);
                    ab += ip(a, b);
                    bb += ip(b, b);
                    aj += ip(a, j);
                    bj += ip(b, j);
                }
                let det = aa * bb - ab * ab;
                let kappa = (bb * aj - ab * bj) / det;
                let mu = (aa * bj - ab * aj) / det;
                let residual = rows
                    .iter()
                    .map(|&(a, b, j)| {
                        let r = tensorlab::sub(j, tensorlab::add(tensorlab::scale(kappa, a), tensorlab::scale(mu, b)));
                        ip(r, r)
                    })
                    .sum::<f64>()
                    .sqrt();
                KmuFit { kappa, mu, residual, mu_identifiable: true, lambda_h: ef.lambda_h }
            }
            None => {
                let rows: Vec<(Vec3, Vec3)> = (0..3)
                    .map(|m| {
                        let mut x = [0.0; 3];
                        x[m] = 1.0;
                        (self.horizontal_part(x), jacobi(x))
                    })
                    .collect();
                let aa: f64 = rows.iter().map(|&(a, _)| ip(a, a)).sum();
                let aj: f64 = rows.iter().map(|&(a, j)| ip(a, j)).sum();
                let kappa = if aa > 0.0 { aj / aa } else { 0.0 };
                let residual = rows
                    .iter()
                    .map(|&(a, j)| {
                        let r = tensorlab::sub(j, tensorlab::scale(kappa, a));
                        ip(r, r)
                    })
                    .sum::<f64>()
                    .sqrt();
                KmuFit { kappa, mu: 0.0, residual, mu_identifiable: false, lambda_h: 0.0 }
            }
        }
    }

    /// (λ_ric, γ) as jets: λ = (r − Ric(ξ,ξ))/2 and γ = Ric(ξ,ξ) − λ, the
    /// unique pair with 3λ + γ = r and λ + γ = Ric(ξ,ξ).
    pub fn eta_einstein_jets(&self) -> (Jet, Jet) {
        let xi = local::truncate_vec(&self.xi, 1);
        let ric_xi_xi = local::dot(&xi, &local::mat_vec(&self.geo.ricci, &xi));
        let lambda = (self.geo.r - ric_xi_xi) * 0.5;
        (lambda, ric_xi_xi - lambda)
    }

    pub fn fit_eta_einstein(&self) -> EtaEinsteinFit {
        let (l, gm) = self.eta_einstein_jets();
        let (lambda_ric, gamma) = (l.value(), gm.value());
        let q = self.geo.q_value();
        let (xi, eta) = (self.xi_v(), self.eta_v());
        let mut residual = 0.0_f64;
        for a in 0..3 {
            for b in 0..3 {
                let model = if a == b { lambda_ric } else { 0.0 } + gamma * xi[a] * eta[b];
                residual = residual.max((q[a][b] - model).abs());
            }
        }
        EtaEinsteinFit { lambda_ric, gamma, residual }
    }

    /// g^ab (∇_a h)(∂_b), the frame trace Σ (∇_{E_i} h) E_i.
    pub fn h_divergence(&self) -> Vec3 {
        let ginv = self.geo.inverse_value();
        let mut out = [0.0; 3];
        for a in 0..3 {
            let mut ea = [Jet::constant(0.0, 0); 3];
            ea[a] = Jet::constant(1.0, 0);
            let nabla_h = local::mat_value(&self.geo.covariant_endo(&ea, &self.h));
            for b in 0..3 {
                for k in 0..3 {
                    out[k] += ginv[a][b] * nabla_h[k][b];
                }
            }
        }
        out
    }
}

/// h at a point.
pub fn h_tensor(s: &ContactStructure, p: &Point) -> Result<Mat3> {
    Ok(s.local(p)?.h_v())
}

/// The h-eigenframe at a point; `None` flags h ≈ 0.
pub fn h_eigenframe(s: &ContactStructure, p: &Point) -> Result<Option<Eigenframe>> {
    Ok(s.local(p)?.h_eigenframe())
}

pub fn fit_kappa_mu_jacobi(s: &ContactStructure, p: &Point) -> Result<KmuFit> {
    Ok(s.local(p)?.fit_kappa_mu())
}

pub fn fit_eta_einstein(s: &ContactStructure, p: &Point) -> Result<EtaEinsteinFit> {
    Ok(s.local(p)?.fit_eta_einstein())
}

/// Jet of a scalar field; constants are exact at any order.
pub(crate) fn scalar_jet(f: &ScalarField, p: &Point, order: usize) -> Result<Jet> {
    Ok(f.eval_jet(p, order)?)
}

#[cfg(test)]
mod tests;
