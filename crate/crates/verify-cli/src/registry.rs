//! The built-in scenario table.
//!
//! Each row names a structure, one check and the verdict the check is
//! expected to reach. Rows with a sweep expand into one scenario per
//! parameter value when run as a suite.

use kmu_core::deformlab::GfVariant;
use kmu_core::report::Verdict;

/// Structure a scenario runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    FlatTorus,
    Heisenberg,
    /// D-homothety of a model with the scenario's `a`.
    Homothety(Base),
    /// g^f deformation of the flat torus with the scenario's f and variant.
    Gf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Base {
    FlatTorus,
    Heisenberg,
}

/// A vector field Z for the Killing and Ricci identity checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Coordinate(usize),
    Reeb,
}

/// Known (κ, μ) or η-Einstein values of a model, as expressions.
pub type KappaMu = (&'static str, &'static str);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CheckKind {
    Axioms,
    HEigenframe,
    Sasakian,
    KContact,
    KappaMuFit { kappa: &'static str, mu: Option<&'static str> },
    FullKmu(KappaMu),
    QFormula(KappaMu),
    KmuStructural(KappaMu),
    HDivergence,
    Lemma32(KappaMu),
    EtaEinstein { expected: Option<(f64, f64)> },
    EtaEinsteinRigidity,
    Killing(Field),
    MetricIdentities,
    FlatBrackets,
    HomothetyLaw,
    RicciIdentity(Field),
    GfH,
    GfDefiningRelation,
    GfProposition,
    GfRemark,
    /// g^f with f ≡ 0 against the flat torus.
    GfFlatLimit,
}

/// Expected verdict of a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Expect {
    Is(Verdict),
    /// Pass for the listed g^f variants and for f ≡ 0, fail otherwise.
    PassFor(&'static [GfVariant]),
}

/// Parameter values a row expands over in a suite run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sweep {
    None,
    Homothety(&'static [f64]),
    /// Every variant with each listed f.
    Gf(&'static [&'static str]),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioDef {
    pub name: &'static str,
    pub model: Model,
    pub check: CheckKind,
    pub expect: Expect,
    pub sweep: Sweep,
    pub about: &'static str,
}

pub const HOMOTHETY_VALUES: &[f64] = &[0.5, 1.0, 2.0, 3.0];
pub const RICCI_IDENTITY_VALUES: &[f64] = &[0.5, 2.0];
pub const GF_FUNCTIONS: &[&str] = &["0.1", "0.1*sin(2*z)"];
pub const GF_ZERO: &[&str] = &["0"];

const PASS: Expect = Expect::Is(Verdict::Pass);
const FAIL: Expect = Expect::Is(Verdict::Fail);
const NOT_APPLICABLE: Expect = Expect::Is(Verdict::NotApplicable);
const FLAT_KMU: KappaMu = ("0", "0");
const HEISENBERG_KMU: KappaMu = ("1", "0");

macro_rules! row {
    ($name:expr, $model:expr, $check:expr, $expect:expr, $sweep:expr, $about:expr) => {
        ScenarioDef { name: $name, model: $model, check: $check, expect: $expect, sweep: $sweep, about: $about }
    };
}

use CheckKind as C;
use Model as M;
use Sweep as S;

pub const REGISTRY: &[ScenarioDef] = &[
    row!("flat-torus-axioms", M::FlatTorus, C::Axioms, PASS, S::None, "contact metric axioms"),
    row!("flat-torus-brackets", M::FlatTorus, C::FlatBrackets, PASS, S::None, "frame brackets, parallel E, R = 0, hE = E"),
    row!("flat-torus-eigenframe", M::FlatTorus, C::HEigenframe, PASS, S::None, "eigenframe of h"),
    row!("flat-torus-kmu-fit", M::FlatTorus, C::KappaMuFit { kappa: "0", mu: Some("0") }, PASS, S::None, "Jacobi (kappa, mu) fit equals (0, 0)"),
    row!("flat-torus-full-kmu", M::FlatTorus, C::FullKmu(FLAT_KMU), PASS, S::None, "full (kappa, mu) condition"),
    row!("flat-torus-q-formula", M::FlatTorus, C::QFormula(FLAT_KMU), PASS, S::None, "Ricci operator of a 3-dim (kappa, mu)-space"),
    row!("flat-torus-kmu-structural", M::FlatTorus, C::KmuStructural(FLAT_KMU), PASS, S::None, "nabla_xi h = mu h phi, h^2 = (kappa - 1) phi^2"),
    row!("flat-torus-lemma32", M::FlatTorus, C::Lemma32(FLAT_KMU), PASS, S::None, "identities of generalized (kappa, mu)-spaces"),
    row!("flat-torus-h-divergence", M::FlatTorus, C::HDivergence, PASS, S::None, "frame divergence of h equals phi Q xi"),
    row!("flat-torus-sasakian", M::FlatTorus, C::Sasakian, FAIL, S::None, "not Sasakian"),
    row!("flat-torus-k-contact", M::FlatTorus, C::KContact, FAIL, S::None, "not K-contact"),
    row!("flat-torus-eta-einstein", M::FlatTorus, C::EtaEinstein { expected: Some((0.0, 0.0)) }, PASS, S::None, "eta-Einstein fit with lambda = gamma = 0"),
    row!("flat-torus-eta-einstein-rigidity", M::FlatTorus, C::EtaEinsteinRigidity, PASS, S::None, "non-K-contact eta-Einstein: lambda = 0, d gamma = 0"),
    row!("flat-torus-killing-dz", M::FlatTorus, C::Killing(Field::Coordinate(2)), PASS, S::None, "d/dz is Killing, not an automorphism (gamma = 0)"),
    row!("flat-torus-metric-identities", M::FlatTorus, C::MetricIdentities, PASS, S::None, "universal identities and Christoffel oracle"),
    row!("heisenberg-axioms", M::Heisenberg, C::Axioms, PASS, S::None, "contact metric axioms"),
    row!("heisenberg-sasakian", M::Heisenberg, C::Sasakian, PASS, S::None, "both Sasakian criteria"),
    row!("heisenberg-k-contact", M::Heisenberg, C::KContact, PASS, S::None, "both K-contact criteria"),
    row!("heisenberg-kmu-fit", M::Heisenberg, C::KappaMuFit { kappa: "1", mu: None }, PASS, S::None, "Jacobi fit kappa = 1"),
    row!("heisenberg-full-kmu", M::Heisenberg, C::FullKmu(HEISENBERG_KMU), PASS, S::None, "full (kappa, mu) condition with (1, 0)"),
    row!("heisenberg-q-formula", M::Heisenberg, C::QFormula(HEISENBERG_KMU), PASS, S::None, "Ricci operator formula, Q xi = 2 xi"),
    row!("heisenberg-kmu-structural", M::Heisenberg, C::KmuStructural(HEISENBERG_KMU), PASS, S::None, "h = 0 structural identities"),
    row!("heisenberg-h-divergence", M::Heisenberg, C::HDivergence, PASS, S::None, "frame divergence of h equals phi Q xi"),
    row!("heisenberg-eta-einstein", M::Heisenberg, C::EtaEinstein { expected: Some((-2.0, 4.0)) }, PASS, S::None, "eta-Einstein fit (lambda, gamma) = (-2, 4)"),
    row!("heisenberg-eta-einstein-rigidity", M::Heisenberg, C::EtaEinsteinRigidity, NOT_APPLICABLE, S::None, "K-contact, so the hypothesis fails"),
    row!("heisenberg-killing-dx", M::Heisenberg, C::Killing(Field::Coordinate(0)), PASS, S::None, "d/dx is a Killing automorphism (gamma = 4)"),
    row!("heisenberg-killing-xi", M::Heisenberg, C::Killing(Field::Reeb), PASS, S::None, "xi is a Killing automorphism"),
    row!("heisenberg-metric-identities", M::Heisenberg, C::MetricIdentities, PASS, S::None, "universal identities and Christoffel oracle"),
    row!("heisenberg-dhomothety", M::Homothety(Base::Heisenberg), C::HomothetyLaw, PASS, S::Homothety(HOMOTHETY_VALUES), "fitted (lambda, gamma) follow the D-homothety law"),
    row!("heisenberg-dhomothety-axioms", M::Homothety(Base::Heisenberg), C::Axioms, PASS, S::Homothety(HOMOTHETY_VALUES), "D-homothetic Heisenberg is contact metric"),
    row!("heisenberg-dhomothety-k-contact", M::Homothety(Base::Heisenberg), C::KContact, PASS, S::Homothety(HOMOTHETY_VALUES), "D-homothety preserves K-contact"),
    row!("flat-torus-dhomothety-axioms", M::Homothety(Base::FlatTorus), C::Axioms, PASS, S::Homothety(HOMOTHETY_VALUES), "D-homothetic flat torus is contact metric"),
    row!("heisenberg-ricci-z-dx", M::Homothety(Base::Heisenberg), C::RicciIdentity(Field::Coordinate(0)), PASS, S::Homothety(RICCI_IDENTITY_VALUES), "deformed Ric(Z, Z) identity for Z = d/dx"),
    row!("heisenberg-ricci-z-xi", M::Homothety(Base::Heisenberg), C::RicciIdentity(Field::Reeb), PASS, S::Homothety(RICCI_IDENTITY_VALUES), "deformed Ric(Z, Z) identity for Z = xi"),
    row!("gf-flat-limit", M::Gf, C::GfFlatLimit, PASS, S::Gf(GF_ZERO), "f = 0 reproduces the flat torus"),
    row!("gf-axioms", M::Gf, C::Axioms, Expect::PassFor(&[GfVariant::HalfOffDiagonal]), S::Gf(GF_FUNCTIONS), "contact metric axioms of g^f"),
    row!("gf-defining-relation", M::Gf, C::GfDefiningRelation, Expect::PassFor(&[GfVariant::DefinitionDerived, GfVariant::HalfOffDiagonal]), S::Gf(GF_FUNCTIONS), "d eta = 2 g^f(., phi^f .) on the frame"),
    row!("gf-h", M::Gf, C::GfH, PASS, S::Gf(GF_FUNCTIONS), "h^f phi E = -(1 - f + f^2/2) phi E, measured"),
    row!("gf-proposition", M::Gf, C::GfProposition, PASS, S::Gf(GF_FUNCTIONS), "Jacobi residual against the closed-form (kappa, mu), re-fit gaps"),
    row!("gf-remark", M::Gf, C::GfRemark, PASS, S::Gf(GF_FUNCTIONS), "R^f(phi E, phi^f phi E) xi vanishes only for constant f"),
    row!("gf-metric-identities", M::Gf, C::MetricIdentities, PASS, S::Gf(GF_FUNCTIONS), "universal identities on g^f"),
];

pub fn find(name: &str) -> Option<&'static ScenarioDef> {
    REGISTRY.iter().find(|d| d.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn names_are_unique() {
        let names: BTreeSet<_> = REGISTRY.iter().map(|d| d.name).collect();
        assert_eq!(names.len(), REGISTRY.len());
    }

    #[test]
    fn sweeps_match_models() {
        for d in REGISTRY {
            match d.sweep {
                Sweep::Homothety(_) => assert!(matches!(d.model, Model::Homothety(_)), "{}", d.name),
                Sweep::Gf(_) => assert_eq!(d.model, Model::Gf, "{}", d.name),
                Sweep::None => assert!(matches!(d.model, Model::FlatTorus | Model::Heisenberg), "{}", d.name),
            }
        }
    }
}
