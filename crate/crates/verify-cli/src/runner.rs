//! Scenario resolution and execution.

use std::path::PathBuf;

use kmu_core::contactcore::{self as cc, CheckContext, ContactStructure, DEFAULT_TOLERANCE};
use kmu_core::deformlab::{self as dl, GfStructure, GfVariant};
use kmu_core::jetcalc::{parse_expression, ScalarField};
use kmu_core::report::{CheckReport, Verdict};
use kmu_core::sampling::Strategy;
use kmu_core::tensorlab::VectorField;
use kmu_core::{Error, Result};

use crate::registry::{self, Base, CheckKind, Expect, Field, Model, ScenarioDef, Sweep};

/// Default homothety constant when a scenario runs without a sweep.
pub const DEFAULT_A: f64 = 2.0;

/// Sampling, tolerance and seed shared by the scenarios of one invocation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    pub strategy: Strategy,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings { strategy: Strategy::DEFAULT_GRID, seed: 0, tolerance: DEFAULT_TOLERANCE }
    }
}

/// Parameter overrides from the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub structure: Option<PathBuf>,
    pub f: Option<String>,
    pub variant: Option<GfVariant>,
    pub a: Option<f64>,
}

/// A fully resolved, runnable scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub def: &'static ScenarioDef,
    /// Registry name plus parameters, unique within a suite.
    pub label: String,
    pub structure_file: Option<PathBuf>,
    pub a: Option<f64>,
    pub f: Option<String>,
    pub variant: Option<GfVariant>,
    pub settings: RunSettings,
}

impl Scenario {
    pub fn expected(&self) -> Verdict {
        if self.structure_file.is_some() {
            return Verdict::Pass;
        }
        match self.def.expect {
            Expect::Is(v) => v,
            Expect::PassFor(variants) => {
                let zero_f = self.f.as_deref().is_some_and(|f| f.trim() == "0");
                match self.variant {
                    Some(v) if !zero_f && !variants.contains(&v) => Verdict::Fail,
                    _ => Verdict::Pass,
                }
            }
        }
    }
}

fn label(def: &ScenarioDef, a: Option<f64>, f: Option<&str>, variant: Option<GfVariant>) -> String {
    let mut parts = Vec::new();
    if let Some(v) = variant {
        parts.push(format!("variant={v}"));
    }
    if let Some(f) = f {
        parts.push(format!("f={f}"));
    }
    if let Some(a) = a {
        parts.push(format!("a={a}"));
    }
    if parts.is_empty() {
        def.name.to_string()
    } else {
        format!("{}[{}]", def.name, parts.join(";"))
    }
}

/// Expands a registry row into scenarios. Overrides pin a parameter to a
/// single value; without them a suite run sweeps the row's values and a
/// single check uses the first of them.
pub fn expand(def: &'static ScenarioDef, ov: &Overrides, settings: RunSettings, sweep: bool) -> Vec<Scenario> {
    let make = |a: Option<f64>, f: Option<String>, variant: Option<GfVariant>| Scenario {
        def,
        label: label(def, a, f.as_deref(), variant),
        structure_file: ov.structure.clone(),
        a,
        f,
        variant,
        settings,
    };
    match def.sweep {
        Sweep::None => vec![make(None, None, None)],
        Sweep::Homothety(values) => {
            let values: Vec<f64> = match ov.a {
                Some(a) => vec![a],
                None if sweep => values.to_vec(),
                None => vec![DEFAULT_A],
            };
            values.into_iter().map(|a| make(Some(a), None, None)).collect()
        }
        Sweep::Gf(functions) => {
            let variants: Vec<GfVariant> = match ov.variant {
                Some(v) => vec![v],
                None if sweep => GfVariant::ALL.to_vec(),
                None => vec![GfVariant::DefinitionDerived],
            };
            let functions: Vec<String> = match &ov.f {
                Some(f) => vec![f.clone()],
                None if sweep => functions.iter().map(|f| f.to_string()).collect(),
                None => vec![functions[0].to_string()],
            };
            variants
                .iter()
                .flat_map(|&v| functions.iter().map(move |f| (v, f.clone())))
                .map(|(v, f)| make(None, Some(f), Some(v)))
                .collect()
        }
    }
}

/// Every registry row, swept.
pub fn suite(settings: RunSettings) -> Vec<Scenario> {
    registry::REGISTRY
        .iter()
        .flat_map(|def| expand(def, &Overrides::default(), settings, true))
        .collect()
}

/// Outcome of one scenario: its report and whether the verdict matches
/// the expectation.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: CheckReport,
    pub expected: Verdict,
}

impl Outcome {
    pub fn as_expected(&self) -> bool {
        self.report.verdict == self.expected
    }
}

/// Runs a scenario. Failures to build the structure or to evaluate it
/// become an `Error` verdict rather than an `Err`.
pub fn run_scenario(s: &Scenario) -> Outcome {
    let report = execute(s).unwrap_or_else(|e| {
        CheckReport::construction_error(&s.label, s.settings.tolerance, &e.to_string())
    });
    Outcome { report, expected: s.expected() }
}

fn parse_field(text: &str) -> Result<ScalarField> {
    Ok(parse_expression(text)?)
}

fn base_structure(base: Base) -> ContactStructure {
    match base {
        Base::FlatTorus => dl::model_flat_torus(),
        Base::Heisenberg => dl::model_heisenberg_sasakian(),
    }
}

fn gf_of(s: &Scenario) -> Result<GfStructure> {
    let f = parse_field(s.f.as_deref().unwrap_or("0"))?;
    dl::gf_structure(&f, s.variant.unwrap_or(GfVariant::DefinitionDerived))
}

fn field(f: Field, s: &ContactStructure) -> VectorField {
    match f {
        Field::Coordinate(axis) => VectorField::coordinate(axis),
        Field::Reeb => s.xi.clone(),
    }
}

fn kmu(pair: (&str, &str)) -> Result<(ScalarField, ScalarField)> {
    Ok((parse_field(pair.0)?, parse_field(pair.1)?))
}

fn execute(s: &Scenario) -> Result<CheckReport> {
    let def = s.def;
    let gf = matches!(def.model, Model::Gf);
    if gf && s.structure_file.is_some() {
        return Err(Error::Construction(format!("{} builds its own structure; --structure does not apply", def.name)));
    }
    // The structure the check samples, and for homothety checks the base.
    let gs = if gf { Some(gf_of(s)?) } else { None };
    let a = s.a.unwrap_or(DEFAULT_A);
    let structure = match (&s.structure_file, def.model, &gs) {
        (Some(path), _, _) => cc::load_structure(path)?,
        (None, Model::FlatTorus, _) => dl::model_flat_torus(),
        (None, Model::Heisenberg, _) => dl::model_heisenberg_sasakian(),
        (None, Model::Homothety(base), _) => {
            let base = base_structure(base);
            match def.check {
                CheckKind::HomothetyLaw | CheckKind::RicciIdentity(_) => base,
                _ => dl::d_homothety(&base, a)?,
            }
        }
        (None, Model::Gf, Some(g)) => g.structure.clone(),
        (None, Model::Gf, None) => unreachable!("g^f structure built above"),
    };
    let st = s.settings;
    let ctx = CheckContext::sampled(&s.label, &structure, st.strategy, st.seed, st.tolerance)?;
    let need_gf = || gs.as_ref().ok_or_else(|| Error::Construction(format!("{} needs a g^f structure", def.name)));
    let mut report = match def.check {
        CheckKind::Axioms => cc::check_contact_axioms(&structure, &ctx)?,
        CheckKind::HEigenframe => cc::check_h_eigenframe(&structure, &ctx)?,
        CheckKind::Sasakian => cc::check_sasakian(&structure, &ctx)?,
        CheckKind::KContact => cc::check_k_contact(&structure, &ctx)?,
        CheckKind::KappaMuFit { kappa, mu } => {
            let kappa = parse_field(kappa)?;
            let mu = mu.map(parse_field).transpose()?;
            cc::check_kappa_mu_fit(&structure, &ctx, Some(&kappa), mu.as_ref())?
        }
        CheckKind::FullKmu(pair) => {
            let (k, m) = kmu(pair)?;
            cc::check_full_kmu(&structure, &ctx, &k, &m)?
        }
        CheckKind::QFormula(pair) => {
            let (k, m) = kmu(pair)?;
            cc::check_q_formula_3d(&structure, &ctx, &k, &m)?
        }
        CheckKind::KmuStructural(pair) => {
            let (k, m) = kmu(pair)?;
            cc::check_kmu_structural(&structure, &ctx, &k, &m)?
        }
        CheckKind::HDivergence => cc::check_h_divergence(&structure, &ctx)?,
        CheckKind::Lemma32(pair) => {
            let (k, m) = kmu(pair)?;
            cc::check_lemma32(&structure, &ctx, &k, &m)?
        }
        CheckKind::EtaEinstein { expected } => cc::check_prop41(&structure, &ctx, expected)?,
        CheckKind::EtaEinsteinRigidity => cc::check_eta_einstein_rigidity(&structure, &ctx)?,
        CheckKind::Killing(f) => cc::killing_and_automorphism(&structure, &ctx, &field(f, &structure))?,
        CheckKind::MetricIdentities => cc::check_metric_identities(&structure, &ctx)?,
        CheckKind::FlatBrackets => dl::check_flat_torus_brackets(&structure, &ctx)?,
        CheckKind::HomothetyLaw => dl::check_homothety_law(&structure, &ctx, a)?,
        CheckKind::RicciIdentity(f) => dl::check_ricci_z_identity(&structure, &ctx, &field(f, &structure), a)?,
        CheckKind::GfH => dl::check_gf_h(need_gf()?, &ctx)?,
        CheckKind::GfDefiningRelation => dl::check_gf_defining_relation(need_gf()?, &ctx)?,
        CheckKind::GfProposition => dl::check_gf_proposition(need_gf()?, &ctx)?,
        CheckKind::GfRemark => dl::check_remark_condition(need_gf()?, &ctx)?,
        CheckKind::GfFlatLimit => dl::check_structure_agreement(&structure, &dl::model_flat_torus(), &ctx)?,
    };
    report.provenance.insert("scenario_name".into(), def.name.into());
    if let Some(a) = s.a {
        report.provenance.insert("homothety_a".into(), a.into());
        report.provenance.insert("homothety_convention".into(), dl::HOMOTHETY_CONVENTION.into());
    }
    if let Some(v) = s.variant {
        report.provenance.insert("gf_variant".into(), v.name().into());
    }
    if let Some(path) = &s.structure_file {
        report.provenance.insert("structure_file".into(), path.display().to_string().into());
    }
    Ok(report)
}
