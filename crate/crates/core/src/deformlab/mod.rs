//! Model structures and their deformations.
//!
//! Two models: the flat contact structure on the 3-torus, written in a chart
//! of ℝ³ with period π in every coordinate, and the Sasakian Heisenberg
//! group. Two deformations: the D-homothety with constant a > 0, and the
//! fiber-invariant deformation g^f of the flat torus, built in three
//! variants that differ in how φ^f and the off-diagonal entry of g^f are
//! chosen.

mod checks;

pub use checks::*;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::contactcore::{
    check_contact_axioms, CheckContext, ContactStructure, PhiSource, ReferenceFrame, DEFAULT_TOLERANCE,
};
use crate::jetcalc::ScalarField;
use crate::report::Verdict;
use crate::sampling::{sample_points, SampleDomain, Strategy};
use crate::tensorlab::{EndoField, MetricField, OneFormField, VectorField};
use crate::{Error, Result};

/// Period of the flat-torus chart in every coordinate.
pub const TORUS_PERIOD: f64 = PI;

const TORUS_PERIODS: [Option<f64>; 3] = [Some(PI); 3];

/// Number of z samples used to bound |f|.
pub const POSITIVITY_SAMPLES: usize = 1024;

/// Admissible bound on |f|: 1 − ¾f⁴ stays positive below (4/3)^¼.
pub fn positivity_bound() -> f64 {
    (4.0_f64 / 3.0).powf(0.25) - 1e-6
}

fn periodic(f: ScalarField) -> ScalarField {
    f.with_periods(TORUS_PERIODS)
}

fn torus_domain() -> SampleDomain {
    SampleDomain { bounds: [[0.0, PI]; 3], periods: TORUS_PERIODS }
}

fn two_z() -> ScalarField {
    periodic(ScalarField::coordinate(2) * 2.0)
}

/// E = ∂z and φE = sin(2z)∂x − cos(2z)∂y.
pub fn flat_torus_frame() -> ReferenceFrame {
    let (s, c) = (two_z().sin(), two_z().cos());
    ReferenceFrame {
        e: VectorField::coordinate(2),
        phi_e: VectorField::new([s, -c, ScalarField::zero()]),
    }
}

/// ε = dz and θ = sin(2z)dx − cos(2z)dy, dual to E and φE.
fn flat_coframe() -> (OneFormField, OneFormField) {
    let (s, c) = (two_z().sin(), two_z().cos());
    let eps = OneFormField::new([ScalarField::zero(), ScalarField::zero(), ScalarField::one()]);
    let theta = OneFormField::new([s, -c, ScalarField::zero()]);
    (eps, theta)
}

/// η = cos(2z)dx + sin(2z)dy with the Euclidean metric. The contact
/// structure is flat, h = ½L_ξφ has eigenvector E = ∂z with eigenvalue 1,
/// and φ = φE⊗dz − E⊗θ.
pub fn model_flat_torus() -> ContactStructure {
    let (s, c) = (two_z().sin(), two_z().cos());
    let eta = OneFormField::new([c.clone(), s.clone(), ScalarField::zero()]);
    let xi = VectorField::new([c, s, ScalarField::zero()]);
    let frame = flat_torus_frame();
    let (eps, theta) = flat_coframe();
    let phi = EndoField::outer(&frame.phi_e, &eps)
        .add(&EndoField::outer(&frame.e, &theta).scale(&ScalarField::constant(-1.0)));
    ContactStructure::new(
        "flat-torus",
        eta,
        xi,
        PhiSource::Explicit(phi),
        MetricField::euclidean(),
        torus_domain(),
    )
    .with_frame(frame)
    .with_provenance("model", "flat contact torus, period pi")
}

/// η = ½(dz − y dx), ξ = 2∂z, g = ¼(dx² + dy²) + η⊗η, φ solved from
/// dη = 2g(·, φ·). Sasakian with Qξ = 2ξ and r = −2.
pub fn model_heisenberg_sasakian() -> ContactStructure {
    let y = ScalarField::coordinate(1);
    let eta = OneFormField::new([&y * -0.5, ScalarField::zero(), ScalarField::constant(0.5)]);
    let xi = VectorField::new([ScalarField::zero(), ScalarField::zero(), ScalarField::constant(2.0)]);
    let dx = OneFormField::new([ScalarField::one(), ScalarField::zero(), ScalarField::zero()]);
    let dy = OneFormField::new([ScalarField::zero(), ScalarField::one(), ScalarField::zero()]);
    let g = MetricField::square(&dx)
        .add(&MetricField::square(&dy))
        .scale(&ScalarField::constant(0.25))
        .add(&MetricField::square(&eta));
    let domain = SampleDomain { bounds: [[-1.0, 1.0]; 3], periods: [None; 3] };
    ContactStructure::new("heisenberg", eta, xi, PhiSource::Solved, g, domain)
        .with_provenance("model", "sasakian heisenberg group")
}

/// Parameters of the two deformations.
#[derive(Debug, Clone)]
pub enum DeformParams {
    /// D-homothety constant a > 0.
    Homothety { a: f64 },
    /// Fiber-invariant function f(z) for g^f.
    Fiber { f: ScalarField, variant: GfVariant },
}

impl DeformParams {
    /// Applies the deformation. The g^f deformation ignores `base` and
    /// always starts from the flat torus.
    pub fn apply(&self, base: &ContactStructure) -> Result<ContactStructure> {
        match self {
            DeformParams::Homothety { a } => d_homothety(base, *a),
            DeformParams::Fiber { f, variant } => Ok(gf_structure(f, *variant)?.structure),
        }
    }
}

pub const HOMOTHETY_CONVENTION: &str = "eta_bar = a*eta, xi_bar = xi/a, phi_bar = phi, g_bar = a*g + a(a-1)*eta⊗eta";

/// D-homothety with constant a: η̄ = aη, ξ̄ = ξ/a, φ̄ = φ,
/// ḡ = ag + a(a − 1)η⊗η. The input must satisfy the contact metric axioms
/// on a coarse sample of its domain.
pub fn d_homothety(s: &ContactStructure, a: f64) -> Result<ContactStructure> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::Construction(format!("homothety constant must be positive, got {a}")));
    }
    let ctx = CheckContext::sampled("d-homothety-precondition", s, Strategy::Grid([4, 4, 4]), 0, DEFAULT_TOLERANCE)?;
    let axioms = check_contact_axioms(s, &ctx)?;
    if axioms.verdict != Verdict::Pass {
        return Err(Error::Construction(format!(
            "{} fails the contact metric axioms (worst residual {:e}); D-homothety needs a contact metric structure",
            s.label,
            axioms.summary().max.unwrap_or(f64::NAN)
        )));
    }
    let ac = ScalarField::constant(a);
    let eta = s.eta.scale(&ac);
    let xi = s.xi.scale(&ScalarField::constant(1.0 / a));
    let g = s.g.scale(&ac).add(&MetricField::square(&s.eta).scale(&ScalarField::constant(a * (a - 1.0))));
    let frame = s.frame.as_ref().map(|f| {
        let k = ScalarField::constant(1.0 / a.sqrt());
        ReferenceFrame { e: f.e.scale(&k), phi_e: f.phi_e.scale(&k) }
    });
    let mut out = ContactStructure::new(&format!("{}-dhomothety", s.label), eta, xi, s.phi.clone(), g, s.domain);
    out.frame = frame;
    out.provenance = s.provenance.clone();
    Ok(out
        .with_provenance("homothety_a", a)
        .with_provenance("homothety_convention", HOMOTHETY_CONVENTION))
}

/// Transformation of the η-Einstein coefficients under a D-homothety of a
/// K-contact η-Einstein structure of dimension 2n + 1:
/// λ̄ = (λ + 2 − 2a)/a and γ̄ = 2n − λ̄.
pub fn ricci_transform_law(lambda_ric: f64, a: f64, n: u32) -> (f64, f64) {
    let lambda_bar = (lambda_ric + 2.0 - 2.0 * a) / a;
    (lambda_bar, 2.0 * f64::from(n) - lambda_bar)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GfVariant {
    /// g^f(E, φE) = f² with φ^f taken from its closed form on the frame.
    PaperLiteral,
    /// g^f(E, φE) = f² with φ^f solved from dη = 2g^f(·, φ^f·).
    DefinitionDerived,
    /// g^f(E, φE) = ½f² with φ^f solved from dη = 2g^f(·, φ^f·).
    HalfOffDiagonal,
}

impl GfVariant {
    pub const ALL: [GfVariant; 3] =
        [GfVariant::PaperLiteral, GfVariant::DefinitionDerived, GfVariant::HalfOffDiagonal];

    pub fn name(self) -> &'static str {
        match self {
            GfVariant::PaperLiteral => "paper-literal",
            GfVariant::DefinitionDerived => "derived",
            GfVariant::HalfOffDiagonal => "half-offdiag",
        }
    }
}

impl fmt::Display for GfVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GfVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GfVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Construction(format!("unknown g^f variant '{s}' (paper-literal, derived, half-offdiag)")))
    }
}

/// A g^f structure together with the data it was built from.
#[derive(Debug, Clone)]
pub struct GfStructure {
    pub structure: ContactStructure,
    pub f: ScalarField,
    pub variant: GfVariant,
}

impl GfStructure {
    /// g^f(E, E) = 1 + f + ½f².
    pub fn a_coefficient(&self) -> ScalarField {
        1.0 + &self.f + 0.5 * (&self.f * &self.f)
    }

    /// g^f(φE, φE) = 1 − f + ½f².
    pub fn b_coefficient(&self) -> ScalarField {
        1.0 - &self.f + 0.5 * (&self.f * &self.f)
    }

    /// g^f(E, φE).
    pub fn c_coefficient(&self) -> ScalarField {
        off_diagonal(&self.f, self.variant)
    }

    /// κ = (f − ½f²)(2 − f + ½f²).
    pub fn kappa_closed_form(&self) -> ScalarField {
        let half_sq = 0.5 * (&self.f * &self.f);
        (&self.f - &half_sq) * (2.0 - &self.f + &half_sq)
    }

    /// μ = 2(f − ½f²).
    pub fn mu_closed_form(&self) -> ScalarField {
        2.0 * (&self.f - 0.5 * (&self.f * &self.f))
    }

    pub fn frame(&self) -> &ReferenceFrame {
        self.structure.frame.as_ref().expect("g^f structures carry the flat frame")
    }

    pub fn f_is_constant(&self) -> bool {
        self.f.is_constant()
    }

    pub fn f_is_zero(&self) -> bool {
        self.f.as_constant() == Some(0.0)
    }
}

fn off_diagonal(f: &ScalarField, variant: GfVariant) -> ScalarField {
    let sq = f * f;
    match variant {
        GfVariant::PaperLiteral | GfVariant::DefinitionDerived => sq,
        GfVariant::HalfOffDiagonal => 0.5 * sq,
    }
}

/// f must depend on z only, be π-periodic and stay below the positivity
/// bound.
fn admit_fiber_function(f: &ScalarField) -> Result<ScalarField> {
    let f = periodic(f.clone());
    let frame = flat_torus_frame();
    let xi = model_flat_torus().xi;
    let probe = sample_points(&torus_domain(), Strategy::Grid([4, 4, 16]), 0)?;
    let (along_xi, along_phi_e) = (xi.apply(&f), frame.phi_e.apply(&f));
    for p in &probe {
        let (a, b) = (along_xi.eval(p)?, along_phi_e.eval(p)?);
        if a.abs() > 1e-12 || b.abs() > 1e-12 {
            return Err(Error::Construction(format!(
                "f = {f} is not fiber invariant: df(xi) = {a:e}, df(phi E) = {b:e} at {p:?}"
            )));
        }
    }
    let residual = f.periodicity_residual(&probe)?;
    if residual > 1e-12 {
        return Err(Error::Construction(format!("f = {f} is not pi-periodic in z (deviation {residual:e})")));
    }
    let bound = positivity_bound();
    for i in 0..POSITIVITY_SAMPLES {
        let z = PI * i as f64 / POSITIVITY_SAMPLES as f64;
        let v = f.eval(&[0.0, 0.0, z])?;
        if v.abs() >= bound {
            return Err(Error::Construction(format!(
                "|f| = {} at z = {z} exceeds the positivity bound {bound}",
                v.abs()
            )));
        }
    }
    Ok(f)
}

/// The deformation g^f of the flat torus. g^f is set on the frame
/// {ξ, E, φE}: g^f(E,E) = 1 + f + ½f², g^f(φE,φE) = 1 − f + ½f²,
/// g^f(E,φE) per variant, ξ unit and orthogonal to both. With the coframe
/// {η, ε, θ} this is g + (A−1)ε² + (B−1)θ² + C(ε⊗θ + θ⊗ε) in the chart.
/// η and ξ are unchanged.
pub fn gf_structure(f: &ScalarField, variant: GfVariant) -> Result<GfStructure> {
    let f = admit_fiber_function(f)?;
    let base = model_flat_torus();
    let frame = flat_torus_frame();
    let (eps, theta) = flat_coframe();
    let sq = &f * &f;
    let a1 = &f + 0.5 * &sq;
    let b1 = 0.5 * &sq - &f;
    let c = off_diagonal(&f, variant);
    let g = base
        .g
        .add(&MetricField::square(&eps).scale(&a1))
        .add(&MetricField::square(&theta).scale(&b1))
        .add(&MetricField::symmetric_product(&eps, &theta).scale(&(2.0 * &c)));
    let phi = match variant {
        GfVariant::PaperLiteral => {
            // φ^f E = −f²E + AφE and φ^f φE = −BE + f²φE.
            let PhiSource::Explicit(phi) = &base.phi else { unreachable!("flat torus has explicit phi") };
            let (e, pe) = (&frame.e, &frame.phi_e);
            let correction = EndoField::outer(&pe.scale(&a1).sub(&e.scale(&sq)), &eps)
                .add(&EndoField::outer(&pe.scale(&sq).sub(&e.scale(&b1)), &theta));
            PhiSource::Explicit(phi.add(&correction))
        }
        GfVariant::DefinitionDerived | GfVariant::HalfOffDiagonal => PhiSource::Solved,
    };
    let structure = ContactStructure::new(
        &format!("gf-{}", variant.name()),
        base.eta,
        base.xi,
        phi,
        g,
        base.domain,
    )
    .with_frame(frame)
    .with_provenance("gf_variant", variant.name())
    .with_provenance("gf_f", f.to_string());
    Ok(GfStructure { structure, f, variant })
}

#[cfg(test)]
mod tests;
