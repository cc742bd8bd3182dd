use proptest::prelude::*;

use super::*;
use crate::deformlab::{model_flat_torus, model_heisenberg_sasakian};
use crate::report::{CheckReport, Verdict};
use crate::sampling::Strategy;
use crate::tensorlab::{max_abs, norm, sub};

const HEISENBERG_JSON: &str = r#"{
  "label": "heisenberg-file",
  "eta": ["-0.5*y", "0", "0.5"],
  "xi": ["0", "0", "2"],
  "g": [["0.25 + 0.25*y^2", "0", "-0.25*y"],
        ["0", "0.25", "0"],
        ["-0.25*y", "0", "0.25"]],
  "domain": {"bounds": [[-1, 1], [-1, 1], [-1, 1]], "periods": [null, null, null]}
}"#;

fn ctx_for(s: &ContactStructure, n: usize) -> CheckContext {
    CheckContext::sampled("test", s, Strategy::Random(n), 5, DEFAULT_TOLERANCE).unwrap()
}

fn assert_verdict(r: &CheckReport, v: Verdict) {
    assert_eq!(r.verdict, v, "{}: {:?}", r.scenario, r.summary());
}

fn mat_gap(a: Mat3, b: Mat3) -> f64 {
    max_abs(&std::array::from_fn(|i| sub(a[i], b[i])))
}

#[test]
fn reeb_field_of_flat_torus() {
    let s = model_flat_torus();
    let reeb = reeb_field(&s.eta, &s.g);
    for p in [[0.0, 0.0, 0.0], [0.4, 1.1, 2.3], [3.0, 0.2, 1.7]] {
        assert!(norm(sub(reeb.eval(&p).unwrap(), s.xi.eval(&p).unwrap())) < 1e-15);
    }
}

#[test]
fn solved_phi_agrees_with_explicit_phi() {
    let s = model_flat_torus();
    let mut solved = s.clone();
    solved.phi = PhiSource::Solved;
    for p in [[0.1, 0.2, 0.3], [1.0, 2.0, 3.0]] {
        let (a, b) = (s.local(&p).unwrap(), solved.local(&p).unwrap());
        assert!(mat_gap(a.phi_v(), b.phi_v()) < 1e-15);
        assert!(mat_gap(a.h_v(), b.h_v()) < 1e-14);
    }
}

#[test]
fn flat_torus_eigenframe_is_dz() {
    let s = model_flat_torus();
    let ef = h_eigenframe(&s, &[0.3, 0.3, 0.9]).unwrap().unwrap();
    assert!((ef.lambda_h - 1.0).abs() < 1e-14);
    assert!(norm(sub(ef.e, [0.0, 0.0, 1.0])) < 1e-14);
    let jets = s.local(&[0.3, 0.3, 0.9]).unwrap().h_eigenframe_jets().unwrap().unwrap();
    assert!(jets.lambda_h.gradient().iter().all(|d| d.abs() < 1e-14));
    let fit = fit_kappa_mu_jacobi(&s, &[0.3, 0.3, 0.9]).unwrap();
    assert!(fit.kappa.abs() < 1e-14 && fit.mu.abs() < 1e-14 && fit.mu_identifiable);
}

#[test]
fn heisenberg_has_no_eigenframe() {
    let s = model_heisenberg_sasakian();
    let p = [0.2, -0.7, 0.4];
    assert!(max_abs(&h_tensor(&s, &p).unwrap()) < 1e-14);
    assert!(h_eigenframe(&s, &p).unwrap().is_none());
    let lc = s.local(&p).unwrap();
    let frame = lc.horizontal_frame().unwrap();
    assert!(!frame.from_h);
    assert!((lc.geo.norm(frame.e) - 1.0).abs() < 1e-14);
    assert!(lc.eta_of(frame.e).abs() < 1e-15);
    let fit = fit_kappa_mu_jacobi(&s, &p).unwrap();
    assert!((fit.kappa - 1.0).abs() < 1e-12 && !fit.mu_identifiable);
    let ee = fit_eta_einstein(&s, &p).unwrap();
    assert!((ee.lambda_ric + 2.0).abs() < 1e-12 && (ee.gamma - 4.0).abs() < 1e-12);
}

#[test]
fn classifiers_on_models() {
    let flat = model_flat_torus();
    let heis = model_heisenberg_sasakian();
    let (cf, ch) = (ctx_for(&flat, 120), ctx_for(&heis, 120));
    let zero = ScalarField::zero();
    let one = ScalarField::one();

    assert_verdict(&check_sasakian(&flat, &cf).unwrap(), Verdict::Fail);
    assert_verdict(&check_k_contact(&flat, &cf).unwrap(), Verdict::Fail);
    assert_verdict(&check_full_kmu(&flat, &cf, &zero, &zero).unwrap(), Verdict::Pass);
    assert_verdict(&check_q_formula_3d(&flat, &cf, &zero, &zero).unwrap(), Verdict::Pass);
    assert_verdict(&check_kmu_structural(&flat, &cf, &zero, &zero).unwrap(), Verdict::Pass);
    assert_verdict(&check_lemma32(&flat, &cf, &zero, &zero).unwrap(), Verdict::Pass);
    assert_verdict(&check_h_divergence(&flat, &cf).unwrap(), Verdict::Pass);
    assert_verdict(&check_eta_einstein_rigidity(&flat, &cf).unwrap(), Verdict::Pass);

    assert_verdict(&check_full_kmu(&heis, &ch, &one, &zero).unwrap(), Verdict::Pass);
    let q = check_q_formula_3d(&heis, &ch, &one, &zero).unwrap();
    assert_verdict(&q, Verdict::Pass);
    assert!(q.column("scalar_curvature").iter().all(|r| (r + 2.0).abs() < 1e-10));
    assert_verdict(&check_kmu_structural(&heis, &ch, &one, &zero).unwrap(), Verdict::Pass);
    assert_verdict(&check_h_divergence(&heis, &ch).unwrap(), Verdict::Pass);
    assert_verdict(&check_eta_einstein_rigidity(&heis, &ch).unwrap(), Verdict::NotApplicable);
    assert!(matches!(
        check_lemma32(&heis, &ch, &one, &zero),
        Err(Error::DegenerateEigenframe { .. })
    ));
}

#[test]
fn killing_fields_on_models() {
    let heis = model_heisenberg_sasakian();
    let r = killing_and_automorphism(&heis, &ctx_for(&heis, 100), &VectorField::coordinate(0)).unwrap();
    assert_verdict(&r, Verdict::Pass);
    assert_eq!(r.provenance["hypothesis_gamma_nonzero"], serde_json::json!(true));

    let flat = model_flat_torus();
    let r = killing_and_automorphism(&flat, &ctx_for(&flat, 100), &VectorField::coordinate(2)).unwrap();
    assert_verdict(&r, Verdict::Pass);
    assert_eq!(r.provenance["hypothesis_gamma_nonzero"], serde_json::json!(false));
    assert!(r.column_max("bracket") > 1.0);

    let dilation = VectorField::new([ScalarField::coordinate(0), ScalarField::zero(), ScalarField::zero()]);
    let r = killing_and_automorphism(&heis, &ctx_for(&heis, 20), &dilation).unwrap();
    assert_verdict(&r, Verdict::Fail);
}

#[test]
fn metric_identities_on_models() {
    for s in [model_flat_torus(), model_heisenberg_sasakian()] {
        let r = check_metric_identities(&s, &ctx_for(&s, 200)).unwrap();
        assert_verdict(&r, Verdict::Pass);
        assert!(r.column_max("christoffel_oracle") < ORACLE_LIMIT);
    }
}

#[test]
fn structure_file_matches_builtin_model() {
    let file = parse_structure(HEISENBERG_JSON).unwrap();
    let model = model_heisenberg_sasakian();
    assert_eq!(file.label, "heisenberg-file");
    assert!(matches!(file.phi, PhiSource::Solved));
    for p in [[0.1, 0.5, -0.3], [-0.9, 0.2, 0.7]] {
        let (a, b) = (file.local(&p).unwrap(), model.local(&p).unwrap());
        assert!(mat_gap(a.geo.metric_value(), b.geo.metric_value()) < 1e-15);
        assert!(mat_gap(a.phi_v(), b.phi_v()) < 1e-15);
        assert!(norm(sub(a.xi_v(), b.xi_v())) < 1e-15);
    }
    assert_verdict(&check_sasakian(&file, &ctx_for(&file, 50)).unwrap(), Verdict::Pass);
}

#[test]
fn structure_file_errors() {
    let wrong_xi = HEISENBERG_JSON.replace(r#""xi": ["0", "0", "2"]"#, r#""xi": ["0", "0", "1"]"#);
    let asym = HEISENBERG_JSON.replace(r#"["0", "0.25", "0"]"#, r#"["0.1", "0.25", "0"]"#);
    let unknown = HEISENBERG_JSON.replace(r#""label""#, r#""lable""#);
    let bad_expr = HEISENBERG_JSON.replace("-0.5*y", "-0.5*w");
    let not_periodic = HEISENBERG_JSON.replace(
        r#""periods": [null, null, null]"#,
        r#""periods": [null, 2, null]"#,
    );
    for text in [wrong_xi, asym, unknown, bad_expr, not_periodic] {
        assert!(matches!(parse_structure(&text), Err(Error::StructureFile(_))), "{text}");
    }
    let no_xi = HEISENBERG_JSON.replace(r#""xi": ["0", "0", "2"],"#, "");
    let s = parse_structure(&no_xi).unwrap();
    assert!(norm(sub(s.xi.eval(&[0.3, 0.3, 0.3]).unwrap(), [0.0, 0.0, 2.0])) < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn heisenberg_axioms_hold_everywhere(x in -3.0..3.0f64, y in -3.0..3.0f64, z in -3.0..3.0f64) {
        let s = model_heisenberg_sasakian();
        let lc = s.local(&[x, y, z]).unwrap();
        let (phi, xi, eta) = (lc.phi_v(), lc.xi_v(), lc.eta_v());
        let phi2 = crate::tensorlab::mat_mul(&phi, &phi);
        let target: Mat3 = std::array::from_fn(|k| std::array::from_fn(|j| {
            xi[k] * eta[j] - if k == j { 1.0 } else { 0.0 }
        }));
        prop_assert!(mat_gap(phi2, target) < 1e-12);
        prop_assert!(norm(lc.phi_of(xi)) < 1e-13);
        prop_assert!((lc.eta_of(xi) - 1.0).abs() < 1e-15);
        prop_assert!(max_abs(&lc.h_v()) < 1e-12);
        prop_assert!((lc.geo.scalar_curvature() + 2.0).abs() < 1e-10);
    }

    #[test]
    fn reeb_field_of_rotating_forms(k in 1u32..5, x in 0.0..3.0f64, z in 0.0..3.0f64) {
        let kz = ScalarField::coordinate(2) * f64::from(k);
        let eta = OneFormField::new([kz.cos(), kz.sin(), ScalarField::zero()]);
        let reeb = reeb_field(&eta, &MetricField::euclidean()).eval(&[x, 0.5, z]).unwrap();
        let want = [(f64::from(k) * z).cos(), (f64::from(k) * z).sin(), 0.0];
        prop_assert!(norm(sub(reeb, want)) < 1e-14);
    }

    #[test]
    fn flat_torus_h_is_symmetric_and_anticommutes(x in 0.0..3.0f64, y in 0.0..3.0f64, z in 0.0..3.0f64) {
        let lc = model_flat_torus().local(&[x, y, z]).unwrap();
        let (h, phi) = (lc.h_v(), lc.phi_v());
        let hphi = crate::tensorlab::mat_mul(&h, &phi);
        let phih = crate::tensorlab::mat_mul(&phi, &h);
        prop_assert!(max_abs(&std::array::from_fn(|i| crate::tensorlab::add(hphi[i], phih[i]))) < 1e-13);
        prop_assert!(mat_gap(h, std::array::from_fn(|i| std::array::from_fn(|j| h[j][i]))) < 1e-13);
        let h2 = crate::tensorlab::mat_mul(&h, &h);
        let phi2 = crate::tensorlab::mat_mul(&phi, &phi);
        prop_assert!(mat_gap(h2, std::array::from_fn(|i| std::array::from_fn(|j| -phi2[i][j]))) < 1e-13);
    }
}
