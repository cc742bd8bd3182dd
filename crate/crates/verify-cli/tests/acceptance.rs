//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context, Result};

use kmu_core::contactcore::{
    check_contact_axioms, check_h_eigenframe, check_k_contact, check_kappa_mu_fit, check_metric_identities,
    check_prop41, check_q_formula_3d, check_sasakian, check_eta_einstein_rigidity, killing_and_automorphism, CheckContext,
    ContactStructure,
};
use kmu_core::deformlab::{
    check_flat_torus_brackets, check_gf_defining_relation, check_gf_h, check_gf_proposition, check_homothety_law,
    check_remark_condition, check_ricci_z_identity, check_structure_agreement, d_homothety, gf_structure,
    model_flat_torus, model_heisenberg_sasakian, GfStructure, GfVariant,
};
use kmu_core::jetcalc::{parse_expression, Point, ScalarField};
use kmu_core::report::{CheckReport, Verdict};
use kmu_core::sampling::Strategy;
use kmu_core::tensorlab::VectorField;

type Outcome = Result<String>;
type Criterion = (&'static str, fn() -> Outcome);

const SEED: u64 = 7;
const HOMOTHETY: [f64; 4] = [0.5, 1.0, 2.0, 3.0];
const GF_FUNCTIONS: [&str; 2] = ["0.1", "0.1*sin(2*z)"];

fn ctx(s: &ContactStructure, strategy: Strategy, tol: f64) -> CheckContext {
    CheckContext::sampled("acceptance", s, strategy, SEED, tol).expect("sampling")
}

fn gf(f: &str, v: GfVariant) -> GfStructure {
    gf_structure(&parse_expression(f).expect("f parses"), v).expect("admissible f")
}

fn gf_all() -> Vec<GfStructure> {
    GfVariant::ALL.iter().flat_map(|&v| GF_FUNCTIONS.iter().map(move |f| gf(f, v))).collect()
}

fn field(text: [&str; 3]) -> VectorField {
    VectorField::new(text.map(|t| parse_expression(t).expect("component parses")))
}

/// Fails unless every named column of `r` stays below `limit`.
fn below(r: &CheckReport, names: &[&str], limit: f64) -> Result<()> {
    for name in names {
        if r.column_index(name).is_none() {
            bail!("{}: no column {name}", r.scenario);
        }
        let max = r.column_max(name);
        if !(max < limit) {
            bail!("{}: {name} = {max:.3e} >= {limit:.0e}", r.scenario);
        }
    }
    Ok(())
}

fn pass(r: &CheckReport) -> Result<()> {
    match r.verdict {
        Verdict::Pass => Ok(()),
        v => Err(anyhow!("{}: verdict {v}, {:?}", r.scenario, r.summary().notes)),
    }
}

fn all_near(r: &CheckReport, name: &str, target: f64, limit: f64) -> Result<()> {
    let worst = r.column(name).iter().map(|v| (v - target).abs()).fold(0.0, f64::max);
    if worst < limit && !r.column(name).is_empty() {
        Ok(())
    } else {
        Err(anyhow!("{}: {name} differs from {target} by {worst:.3e}", r.scenario))
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut models = vec![model_flat_torus(), model_heisenberg_sasakian()];
    models.extend(gf_all().into_iter().map(|g| g.structure));
    let mut worst: f64 = 0.0;
    for s in &models {
        let r = check_metric_identities(s, &ctx(s, Strategy::Random(256), 1e-7))?;
        below(&r, &["contracted_bianchi", "petersen"], 1e-7)?;
        worst = worst.max(r.column_max("contracted_bianchi")).max(r.column_max("petersen"));
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(60) {
        bail!("took {elapsed:.1?}");
    }
    Ok(format!("{} metrics x 256 points, max {worst:.1e}, {elapsed:.1?}", models.len()))
}

fn criterion_2() -> Outcome {
    let s = model_flat_torus();
    let c = ctx(&s, Strategy::Random(500), 1e-9);
    let brackets = check_flat_torus_brackets(&s, &c)?;
    pass(&brackets)?;
    below(&brackets, &["nabla_e", "xi_e_bracket", "xi_phie_bracket", "e_phie_bracket", "riemann", "h_e"], 1e-9)?;
    pass(&check_contact_axioms(&s, &c)?)?;
    pass(&check_h_eigenframe(&s, &c)?)?;
    let zero = ScalarField::zero();
    let fit = check_kappa_mu_fit(&s, &c, Some(&zero), Some(&zero))?;
    pass(&fit)?;
    below(&fit, &["kappa_error", "mu_error"], 1e-9)?;
    Ok("brackets, axioms, R = 0, hE = E, (kappa, mu) = (0, 0) at 500 points".into())
}

fn criterion_3() -> Outcome {
    let s = model_heisenberg_sasakian();
    let c = ctx(&s, Strategy::Random(500), 1e-8);
    let sasakian = check_sasakian(&s, &c)?;
    pass(&sasakian)?;
    below(&sasakian, &["nabla_phi", "curvature_xi"], 1e-8)?;
    let k_contact = check_k_contact(&s, &c)?;
    pass(&k_contact)?;
    below(&k_contact, &["lie_xi_g", "jacobi_xi"], 1e-8)?;
    let (one, zero) = (ScalarField::constant(1.0), ScalarField::zero());
    let q = check_q_formula_3d(&s, &c, &one, &zero)?;
    pass(&q)?;
    below(&q, &["q_formula", "q_xi"], 1e-8)?;
    all_near(&q, "scalar_curvature", -2.0, 1e-8)?;
    let c7 = ctx(&s, Strategy::Random(500), 1e-7);
    let fit = check_prop41(&s, &c7, Some((-2.0, 4.0)))?;
    pass(&fit)?;
    below(&fit, &["lambda_error", "gamma_error"], 1e-7)?;
    Ok("Sasakian and K-contact by both criteria, Q xi = 2 xi, r = -2, (lambda, gamma) = (-2, 4)".into())
}

fn criterion_4() -> Outcome {
    let heisenberg = model_heisenberg_sasakian();
    let flat = model_flat_torus();
    for a in HOMOTHETY {
        for base in [&heisenberg, &flat] {
            let s = d_homothety(base, a)?;
            pass(&check_contact_axioms(&s, &ctx(&s, Strategy::Random(200), 1e-8))?)?;
        }
        let c = ctx(&heisenberg, Strategy::Random(200), 1e-7);
        let law = check_homothety_law(&heisenberg, &c, a)?;
        pass(&law)?;
        below(&law, &["lambda_law", "gamma_law"], 1e-7)?;
        all_near(&law, "lambda_bar", -2.0, 1e-7)?;
        for z in [VectorField::coordinate(0), heisenberg.xi.clone()] {
            let r = check_ricci_z_identity(&heisenberg, &c, &z, a)?;
            pass(&r)?;
            below(&r, &["identity"], 1e-7)?;
        }
    }
    Ok("axioms for a in {1/2, 1, 2, 3}, transformation law, lambda = -2 fixed, Ric(Z, Z) identity".into())
}

fn criterion_5() -> Outcome {
    let heisenberg = model_heisenberg_sasakian();
    let flat = model_flat_torus();
    let cases = [
        (&heisenberg, VectorField::coordinate(0), "d/dx"),
        (&heisenberg, field(["0", "1", "x"]), "d/dy + x d/dz"),
        (&heisenberg, heisenberg.xi.clone(), "xi"),
        (&flat, VectorField::coordinate(0), "d/dx"),
        (&flat, VectorField::coordinate(1), "d/dy"),
        (&flat, VectorField::coordinate(2), "d/dz"),
    ];
    for (s, z, name) in &cases {
        let r = killing_and_automorphism(s, &ctx(s, Strategy::Random(300), 1e-8), z)?;
        below(&r, &["killing", "eta_bracket"], 1e-8).map_err(|e| anyhow!("{name}: {e}"))?;
    }
    let c = ctx(&heisenberg, Strategy::Random(300), 1e-8);
    let dx = killing_and_automorphism(&heisenberg, &c, &VectorField::coordinate(0))?;
    pass(&dx)?;
    below(&dx, &["bracket", "lie_eta", "z_lambda", "z_gamma"], 1e-8)?;
    all_near(&dx, "gamma", 4.0, 1e-8)?;
    let c = ctx(&flat, Strategy::Random(300), 1e-8);
    let dz = killing_and_automorphism(&flat, &c, &VectorField::coordinate(2))?;
    pass(&dz)?;
    all_near(&dz, "gamma", 0.0, 1e-8)?;
    let bracket = dz.column_max("bracket");
    if !(bracket > 1.0) {
        bail!("flat d/dz: max |[Z, xi]| = {bracket:.3e}, not > 1");
    }
    Ok(format!("{} Killing fields horizontal, d/dx automorphism, flat d/dz max |[Z, xi]| = {bracket:.3}", cases.len()))
}

fn criterion_6() -> Outcome {
    let s = model_flat_torus();
    let r = check_eta_einstein_rigidity(&s, &ctx(&s, Strategy::Random(500), 1e-8))?;
    pass(&r)?;
    below(&r, &["lambda_ric", "dgamma"], 1e-8)?;
    Ok(format!("max |lambda| = {:.1e}, max |d gamma| = {:.1e}", r.column_max("lambda_ric"), r.column_max("dgamma")))
}

/// Points with z at the zeros of sin 2z in [0, π).
fn zeros_of_sin(n: usize) -> Vec<Point> {
    (0..n).map(|i| [0.37 * i as f64 % PI, 0.61 * i as f64 % PI, if i % 2 == 0 { 0.0 } else { PI / 2.0 }]).collect()
}

fn criterion_7() -> Outcome {
    let flat = model_flat_torus();
    let c = ctx(&flat, Strategy::DEFAULT_GRID, 1e-8);
    for v in GfVariant::ALL {
        let g0 = gf("0", v);
        let r = check_structure_agreement(&g0.structure, &flat, &c)?;
        pass(&r)?;
        below(&r, &["eta", "xi", "phi", "g", "h"], 1e-12)?;
    }
    for f in GF_FUNCTIONS {
        let r = check_gf_defining_relation(&gf(f, GfVariant::DefinitionDerived), &c)?;
        below(&r, &["defining_relation"], 1e-10)?;
    }
    let zeros = CheckContext::new("acceptance", zeros_of_sin(64), 1e-8, SEED);
    let mut floor_min = f64::INFINITY;
    for gs in gf_all() {
        let reports = [
            check_contact_axioms(&gs.structure, &c)?,
            check_gf_h(&gs, &c)?,
            check_gf_proposition(&gs, &c)?,
            check_remark_condition(&gs, &c)?,
        ];
        for r in &reports {
            if r.points.len() != c.points.len() || r.columns.is_empty() {
                bail!("{}: incomplete report", r.scenario);
            }
            if r.points.iter().flat_map(|p| &p.residuals).any(|v| !v.is_finite()) {
                bail!("{}: non-finite residual", r.scenario);
            }
        }
        let again = check_remark_condition(&gs, &c)?;
        if serde_json::to_string(&again.summary()).ok() != serde_json::to_string(&reports[3].summary()).ok() {
            bail!("{}: remark report differs between runs", again.scenario);
        }
        let remark = &reports[3];
        pass(remark)?;
        if gs.f_is_constant() {
            below(remark, &["remark"], c.tolerance)?;
        } else {
            let floor = remark.provenance["remark_floor"].as_f64().unwrap_or(f64::NAN);
            let max = remark.column_max("remark");
            if !(floor > 0.0 && max > floor) {
                bail!("{}: remark max {max:.3e} not above floor {floor:.3e}", remark.scenario);
            }
            floor_min = floor_min.min(max / floor);
            let refit = check_gf_proposition(&gs, &zeros)?;
            below(&refit, &["kappa_gap", "mu_gap", "gap_at_f_zero"], 1e-8)?;
        }
    }
    Ok(format!(
        "flat limit exact, derived defining relation, 6 structures reported, nonconstant remark >= {floor_min:.0}x floor, re-fit at zeros of f"
    ))
}

fn criterion_8() -> Outcome {
    let mut models = vec![model_flat_torus(), model_heisenberg_sasakian()];
    for a in [0.5, 3.0] {
        models.push(d_homothety(&model_heisenberg_sasakian(), a)?);
    }
    models.extend(gf_all().into_iter().map(|g| g.structure));
    let mut worst: f64 = 0.0;
    for s in &models {
        let r = check_metric_identities(s, &ctx(s, Strategy::Random(200), 1e-8))?;
        below(&r, &["christoffel_oracle"], 1e-6)?;
        worst = worst.max(r.column_max("christoffel_oracle"));
    }
    Ok(format!("{} models, max finite-difference gap {worst:.1e}", models.len()))
}

fn run_all() -> Result<(Vec<u8>, Duration)> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_kmu-verify"))
        .args(["run", "--all", "--seed", "7", "--format", "jsonl"])
        .output()
        .context("cannot start kmu-verify")?;
    match out.status.code() {
        Some(0) => Ok((out.stdout, start.elapsed())),
        code => Err(anyhow!("exit {code:?}: {}", String::from_utf8_lossy(&out.stderr))),
    }
}

fn criterion_9() -> Outcome {
    let (first, t1) = run_all()?;
    let (second, t2) = run_all()?;
    if first != second {
        bail!("outputs differ");
    }
    if first.is_empty() {
        bail!("empty output");
    }
    let limit = Duration::from_secs(300);
    if t1.max(t2) > limit {
        bail!("suite took {:.1?}", t1.max(t2));
    }
    let lines = first.iter().filter(|&&b| b == b'\n').count();
    Ok(format!("{lines} identical lines, {t1:.1?} and {t2:.1?}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("universal identities", criterion_1),
        ("flat torus model", criterion_2),
        ("Heisenberg model", criterion_3),
        ("D-homothety", criterion_4),
        ("Killing fields and automorphisms", criterion_5),
        ("non-K-contact eta-Einstein", criterion_6),
        ("g^f deformation", criterion_7),
        ("Christoffel oracle", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
