use nalgebra::{Matrix3, Vector3};

use super::*;
use crate::contactcore::{
    check_h_eigenframe, check_k_contact, check_kappa_mu_fit, check_prop41, check_sasakian,
};
use crate::jetcalc::{parse_expression, Point};
use crate::report::{CheckReport, Gate};
use crate::tensorlab::{norm, sub};

fn ctx_for(s: &ContactStructure, strategy: Strategy) -> CheckContext {
    CheckContext::sampled("test", s, strategy, 11, DEFAULT_TOLERANCE).unwrap()
}

fn f_const() -> ScalarField {
    ScalarField::constant(0.1)
}

fn f_sin() -> ScalarField {
    parse_expression("0.1*sin(2*z)").unwrap()
}

fn assert_pass(r: &CheckReport) {
    assert_eq!(r.verdict, Verdict::Pass, "{}: {:?}", r.scenario, r.summary());
}

#[test]
fn flat_torus_brackets_and_axioms() {
    let s = model_flat_torus();
    let ctx = ctx_for(&s, Strategy::Random(500));
    assert_pass(&check_flat_torus_brackets(&s, &ctx).unwrap());
    assert_pass(&check_contact_axioms(&s, &ctx).unwrap());
    assert_pass(&check_h_eigenframe(&s, &ctx).unwrap());
    let zero = ScalarField::zero();
    let fit = check_kappa_mu_fit(&s, &ctx, Some(&zero), Some(&zero)).unwrap();
    assert_pass(&fit);
    assert!(fit.column("lambda_h").iter().all(|l| (l - 1.0).abs() < 1e-12));
}

#[test]
fn flat_torus_bracket_values() {
    // [E, φE] = 2ξ: E = ∂z, φE = (sin 2z, −cos 2z, 0), so the bracket is
    // (2cos 2z, 2sin 2z, 0).
    let frame = flat_torus_frame();
    let b = crate::tensorlab::lie_bracket(&frame.e, &frame.phi_e);
    let p = [0.2, 0.4, 0.7];
    let v = b.eval(&p).unwrap();
    assert!((v[0] - 2.0 * (1.4_f64).cos()).abs() < 1e-15);
    assert!((v[1] - 2.0 * (1.4_f64).sin()).abs() < 1e-15);
    assert_eq!(v[2], 0.0);
}

#[test]
fn heisenberg_is_sasakian_eta_einstein() {
    let s = model_heisenberg_sasakian();
    let ctx = ctx_for(&s, Strategy::Random(200));
    assert_pass(&check_contact_axioms(&s, &ctx).unwrap());
    assert_pass(&check_sasakian(&s, &ctx).unwrap());
    assert_pass(&check_k_contact(&s, &ctx).unwrap());
    assert_pass(&check_prop41(&s, &ctx, Some((-2.0, 4.0))).unwrap());
}

#[test]
fn homothety_identity_at_a_one() {
    let s = model_heisenberg_sasakian();
    let t = d_homothety(&s, 1.0).unwrap();
    assert_eq!(t.eta, s.eta);
    assert_eq!(t.xi, s.xi);
    assert_eq!(t.g, s.g);
}

#[test]
fn homothety_rejects_bad_input() {
    let s = model_heisenberg_sasakian();
    assert!(d_homothety(&s, 0.0).is_err());
    assert!(d_homothety(&s, -1.0).is_err());
    let gf = gf_structure(&f_const(), GfVariant::PaperLiteral).unwrap();
    assert!(matches!(d_homothety(&gf.structure, 2.0), Err(Error::Construction(_))));
}

#[test]
fn homothety_preserves_axioms_on_both_models() {
    for s in [model_flat_torus(), model_heisenberg_sasakian()] {
        for a in [0.5, 1.0, 2.0, 3.0] {
            let t = d_homothety(&s, a).unwrap();
            let ctx = ctx_for(&t, Strategy::Random(64));
            assert_pass(&check_contact_axioms(&t, &ctx).unwrap());
            for p in &ctx.points {
                let lc = t.local(p).unwrap();
                assert!((lc.geo.inner(lc.xi_v(), lc.xi_v()) - 1.0).abs() < 1e-13);
            }
        }
    }
    let t = d_homothety(&model_heisenberg_sasakian(), 2.0).unwrap();
    assert_pass(&check_k_contact(&t, &ctx_for(&t, Strategy::Random(64))).unwrap());
}

#[test]
fn transform_law_values() {
    for a in [0.5, 2.0, 3.0, 7.0] {
        let (l, g) = ricci_transform_law(-2.0, a, 1);
        assert!((l + 2.0).abs() < 1e-15);
        assert!((g - 4.0).abs() < 1e-15);
    }
    assert_eq!(ricci_transform_law(1.5, 1.0, 1).0, 1.5);
}

#[test]
fn homothety_law_on_heisenberg() {
    let s = model_heisenberg_sasakian();
    let ctx = ctx_for(&s, Strategy::Random(100));
    for a in [0.5, 2.0] {
        let r = check_homothety_law(&s, &ctx, a).unwrap();
        assert_pass(&r);
        assert!(r.column("lambda_bar").iter().all(|l| (l + 2.0).abs() < 1e-7));
        assert!(r.column("gamma_bar").iter().all(|g| (g - 4.0).abs() < 1e-7));
    }
}

#[test]
fn homothety_law_not_applicable_on_flat_torus() {
    let s = model_flat_torus();
    let r = check_homothety_law(&s, &ctx_for(&s, Strategy::Random(20)), 2.0).unwrap();
    assert_eq!(r.verdict, Verdict::NotApplicable);
}

#[test]
fn ricci_identity_on_heisenberg() {
    let s = model_heisenberg_sasakian();
    let ctx = ctx_for(&s, Strategy::Random(100));
    let r = check_ricci_z_identity(&s, &ctx, &s.xi, 1.0).unwrap();
    assert_pass(&r);
    assert!(r.column("ricci_zz").iter().all(|v| (v - 2.0).abs() < 1e-10));
    for a in [0.5, 2.0] {
        for z in [VectorField::coordinate(0), s.xi.clone()] {
            assert_pass(&check_ricci_z_identity(&s, &ctx, &z, a).unwrap());
        }
    }
    let r = check_ricci_z_identity(&s, &ctx, &VectorField::zero(), 2.0).unwrap();
    assert!(r.column("ricci_zz").iter().chain(r.column("formula").iter()).all(|v| *v == 0.0));
}

#[test]
fn ricci_identity_rejects_non_killing_field() {
    let s = model_heisenberg_sasakian();
    let z = VectorField::new([ScalarField::coordinate(0), ScalarField::zero(), ScalarField::zero()]);
    let r = check_ricci_z_identity(&s, &ctx_for(&s, Strategy::Random(20)), &z, 2.0).unwrap();
    assert_eq!(r.verdict, Verdict::NotApplicable);
}

#[test]
fn variant_names_round_trip() {
    for v in GfVariant::ALL {
        assert_eq!(v.name().parse::<GfVariant>().unwrap(), v);
    }
    assert!("literal".parse::<GfVariant>().is_err());
}

#[test]
fn gf_zero_reproduces_flat_torus() {
    let flat = model_flat_torus();
    let ctx = ctx_for(&flat, Strategy::DEFAULT_GRID);
    for v in GfVariant::ALL {
        let gs = gf_structure(&ScalarField::zero(), v).unwrap();
        for (a, b) in gs.structure.g.components().iter().flatten().zip(flat.g.components().iter().flatten()) {
            assert_eq!(a.expr(), b.expr());
        }
        assert_pass(&check_structure_agreement(&gs.structure, &flat, &ctx).unwrap());
        assert_pass(&check_gf_h(&gs, &ctx).unwrap());
        assert_pass(&check_gf_proposition(&gs, &ctx).unwrap());
        assert_pass(&check_remark_condition(&gs, &ctx).unwrap());
    }
}

#[test]
fn gf_metric_on_frame() {
    let gs = gf_structure(&f_const(), GfVariant::PaperLiteral).unwrap();
    let p = [0.3, 0.1, 0.9];
    let frame = gs.frame();
    let g = &gs.structure.g;
    let ev = |f: ScalarField| f.eval(&p).unwrap();
    assert!((ev(g.inner(&frame.e, &frame.e)) - 1.105).abs() < 1e-15);
    assert!((ev(g.inner(&frame.phi_e, &frame.phi_e)) - 0.905).abs() < 1e-15);
    assert!((ev(g.inner(&frame.e, &frame.phi_e)) - 0.01).abs() < 1e-15);
    assert!(ev(g.inner(&gs.structure.xi, &frame.e)).abs() < 1e-15);
    assert!((ev(g.inner(&gs.structure.xi, &gs.structure.xi)) - 1.0).abs() < 1e-15);
    let half = gf_structure(&f_const(), GfVariant::HalfOffDiagonal).unwrap();
    assert!((ev(half.structure.g.inner(&frame.e, &frame.phi_e)) - 0.005).abs() < 1e-15);
}

#[test]
fn gf_closed_forms_at_constant_f() {
    let gs = gf_structure(&f_const(), GfVariant::DefinitionDerived).unwrap();
    let p = [0.0; 3];
    assert!((gs.kappa_closed_form().eval(&p).unwrap() - 0.180975).abs() < 1e-15);
    assert!((gs.mu_closed_form().eval(&p).unwrap() - 0.19).abs() < 1e-15);
}

/// φ^f solved by an LU factorisation of 2g^f Φ = dη, independent of the
/// engine's jet inverse, against the closed form
/// φ^f E = (−f²E + AφE)/(1 − ¾f⁴) and the engine's solved φ^f.
#[test]
fn derived_phi_matches_brute_force_solve() {
    for f in [f_const(), f_sin()] {
        let gs = gf_structure(&f, GfVariant::DefinitionDerived).unwrap();
        for p in [[0.3, 0.7, 0.0], [0.1, 0.2, 0.4], [1.0, 2.0, 2.9]] {
            let g = gs.structure.g.eval(&p).unwrap();
            let lc = gs.structure.local(&p).unwrap();
            let deta = lc.deta_v();
            let lu = (Matrix3::from_fn(|i, j| g[i][j]) * 2.0).lu();
            let phi = Matrix3::from_fn(|i, j| deta[i][j]);
            let solved = Matrix3::from_columns(&[0, 1, 2].map(|j| lu.solve(&phi.column(j).into_owned()).unwrap()));
            let fv = f.eval(&p).unwrap();
            let (a, det) = (1.0 + fv + 0.5 * fv * fv, 1.0 - 0.75 * fv.powi(4));
            let s2 = (2.0 * p[2]).sin();
            let c2 = (2.0 * p[2]).cos();
            let e = Vector3::new(0.0, 0.0, 1.0);
            let pe = Vector3::new(s2, -c2, 0.0);
            let closed = (e * -(fv * fv) + pe * a) / det;
            assert!((solved * e - closed).norm() < 1e-14, "{p:?}");
            let engine = Matrix3::from_fn(|i, j| lc.phi_v()[i][j]);
            assert!((engine - solved).norm() < 1e-13);
        }
    }
}

#[test]
fn literal_phi_matches_frame_formulas() {
    let gs = gf_structure(&f_sin(), GfVariant::PaperLiteral).unwrap();
    let p = [0.5, 0.5, 0.4];
    let lc = gs.structure.local(&p).unwrap();
    let fv = f_sin().eval(&p).unwrap();
    let (a, b) = (1.0 + fv + 0.5 * fv * fv, 1.0 - fv + 0.5 * fv * fv);
    let (s2, c2) = ((0.8_f64).sin(), (0.8_f64).cos());
    let (e, pe) = ([0.0, 0.0, 1.0], [s2, -c2, 0.0]);
    let lin = |x: f64, u: [f64; 3], y: f64, v: [f64; 3]| -> [f64; 3] { std::array::from_fn(|i| x * u[i] + y * v[i]) };
    assert!(norm(sub(lc.phi_of(e), lin(-fv * fv, e, a, pe))) < 1e-15);
    assert!(norm(sub(lc.phi_of(pe), lin(-b, e, fv * fv, pe))) < 1e-15);
    assert!(norm(lc.phi_of(lc.xi_v())) < 1e-15);
}

#[test]
fn defining_relation_by_variant() {
    let flat = model_flat_torus();
    let ctx = ctx_for(&flat, Strategy::Grid([4, 4, 16]));
    for f in [f_const(), f_sin()] {
        for v in [GfVariant::DefinitionDerived, GfVariant::HalfOffDiagonal] {
            assert_pass(&check_gf_defining_relation(&gf_structure(&f, v).unwrap(), &ctx).unwrap());
        }
        let literal = gf_structure(&f, GfVariant::PaperLiteral).unwrap();
        assert_eq!(check_gf_defining_relation(&literal, &ctx).unwrap().verdict, Verdict::Fail);
    }
}

fn remark_vector(gs: &GfStructure, p: &Point) -> [f64; 3] {
    let lc = gs.structure.local(p).unwrap();
    let pe = gs.frame().phi_e.eval(p).unwrap();
    lc.geo.riemann_apply(pe, lc.phi_of(pe), lc.xi_v())
}

/// Reference values from an independent symbolic computation of the
/// curvature of g^f.
#[test]
fn remark_vector_matches_symbolic_reference() {
    let cases = [
        (GfVariant::PaperLiteral, [-0.0008889502359848061, 0.0008633614484401286, 0.22415420931481717]),
        (GfVariant::DefinitionDerived, [-0.0008889678917481576, 0.000863378595975281, 0.22415866132294282]),
        (GfVariant::HalfOffDiagonal, [-0.00044445712166942897, 0.00043166324592843397, 0.22414513355020504]),
    ];
    for (v, want) in cases {
        let gs = gf_structure(&f_sin(), v).unwrap();
        let got = remark_vector(&gs, &[0.1, 0.2, 0.4]);
        assert!(norm(sub(got, want)) < 1e-10, "{v}: {got:?}");
        let at_zero = remark_vector(&gs, &[0.3, 0.7, 0.0]);
        assert!(norm(sub(at_zero, [0.0, 0.0, 0.4])) < 1e-10, "{v}: {at_zero:?}");
        let constant = gf_structure(&f_const(), v).unwrap();
        assert!(norm(remark_vector(&constant, &[0.1, 0.2, 0.4])) < 1e-12);
    }
}

/// Jacobi residuals R(X,ξ)ξ − κ(X − η(X)ξ) − μhX for X = E, φE, and the
/// residual of h(φE) = −(1 − f + ½f²)φE, from the same symbolic reference.
#[test]
fn proposition_and_h_residuals_match_symbolic_reference() {
    let p = [0.1, 0.2, 0.4];
    let cases = [
        (GfVariant::PaperLiteral, f_const(), [-2.0446182054313818e-07, 1.9857630538760822e-07, 2.6471360351998374e-05], [4.855968237763193e-07, -4.71618725298795e-07, 0.0], 0.0),
        (GfVariant::DefinitionDerived, f_const(), [0.0, 0.0, 1.3574143060746113e-05], [9.737494203351533e-06, -9.457196544059932e-06, 0.0], 6.788009100679912e-05),
        (GfVariant::DefinitionDerived, f_sin(), [0.0, 0.0, 2.6523212536821994e-06], [1.902658806507418e-06, -1.8478900129167974e-06, 0.0], 1.8487699318072554e-05),
        (GfVariant::HalfOffDiagonal, f_sin(), [0.0; 3], [0.0; 3], 0.0),
    ];
    for (v, f, jac_e, jac_pe, h_res) in cases {
        let gs = gf_structure(&f, v).unwrap();
        let lc = gs.structure.local(&p).unwrap();
        let (k, m) = (gs.kappa_closed_form().eval(&p).unwrap(), gs.mu_closed_form().eval(&p).unwrap());
        let xi = lc.xi_v();
        let residual = |x: [f64; 3]| {
            let hp = lc.horizontal_part(x);
            let hx = lc.h_of(x);
            let r = lc.geo.riemann_apply(x, xi, xi);
            std::array::from_fn::<f64, 3, _>(|i| r[i] - k * hp[i] - m * hx[i])
        };
        let (e, pe) = (gs.frame().e.eval(&p).unwrap(), gs.frame().phi_e.eval(&p).unwrap());
        assert!(norm(sub(residual(e), jac_e)) < 1e-12, "{v} {f}: {:?}", residual(e));
        assert!(norm(sub(residual(pe), jac_pe)) < 1e-12, "{v} {f}: {:?}", residual(pe));
        let b = gs.b_coefficient().eval(&p).unwrap();
        let h = norm(std::array::from_fn(|i| lc.h_of(pe)[i] + b * pe[i]));
        assert!((h - h_res).abs() < 1e-12, "{v} {f}: {h}");
    }
}

#[test]
fn refit_equals_closed_forms_at_zeros_of_f() {
    let flat = model_flat_torus();
    let ctx = ctx_for(&flat, Strategy::DEFAULT_GRID);
    for v in GfVariant::ALL {
        for f in [f_const(), f_sin()] {
            let r = check_gf_proposition(&gf_structure(&f, v).unwrap(), &ctx).unwrap();
            assert_pass(&r);
        }
    }
}

#[test]
fn remark_gating_distinguishes_constant_f() {
    let flat = model_flat_torus();
    let ctx = ctx_for(&flat, Strategy::DEFAULT_GRID);
    for v in GfVariant::ALL {
        let r = check_remark_condition(&gf_structure(&f_const(), v).unwrap(), &ctx).unwrap();
        assert_pass(&r);
        assert_eq!(r.columns[0].gate, Gate::Below);
        let r = check_remark_condition(&gf_structure(&f_sin(), v).unwrap(), &ctx).unwrap();
        assert_pass(&r);
        assert!(matches!(r.columns[0].gate, Gate::MaxAbove(_)));
        assert!(r.column_max("remark") > 0.1);
    }
}

#[test]
fn gf_rejects_inadmissible_f() {
    for text in ["1.08", "0.5*x", "0.1*sin(z)", "1.2*cos(2*z)"] {
        let f = parse_expression(text).unwrap();
        assert!(matches!(gf_structure(&f, GfVariant::DefinitionDerived), Err(Error::Construction(_))), "{text}");
    }
    assert!(gf_structure(&ScalarField::constant(1.07), GfVariant::HalfOffDiagonal).is_ok());
}

#[test]
fn paper_literal_phi_squared_defect_is_three_quarters_f4() {
    // At f-maximal points (z = π/4 on the default grid) the defect of
    // φ² + Id − η⊗ξ is ¾f⁴ = 7.5e−5.
    let flat = model_flat_torus();
    let ctx = ctx_for(&flat, Strategy::DEFAULT_GRID);
    for v in [GfVariant::PaperLiteral, GfVariant::DefinitionDerived] {
        let r = check_contact_axioms(&gf_structure(&f_sin(), v).unwrap().structure, &ctx).unwrap();
        assert!((r.column_max("phi_squared") - 7.5e-5).abs() < 1e-7, "{v}: {}", r.column_max("phi_squared"));
    }
    let r = check_contact_axioms(&gf_structure(&f_sin(), GfVariant::HalfOffDiagonal).unwrap().structure, &ctx).unwrap();
    assert!(r.column_max("phi_squared") < 1e-14);
}
