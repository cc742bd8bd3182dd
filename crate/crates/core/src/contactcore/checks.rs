//! Residual reports for the axioms, classifiers and identity suites.

use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{scalar_jet, ContactStructure, LocalContact, DEGENERACY_FLOOR};
use crate::jetcalc::{Jet, Point, ScalarField};
use crate::report::{collect_rows, CheckReport, Column, Gate, Row};
use crate::sampling::{point_rng, random_vector, sample_points, Strategy};
use crate::tensorlab::local;
use crate::tensorlab::{
    add, christoffel_finite_difference, dot, mat_mul, mat_vec, max_abs, norm, scale, sub,
    symmetric_eigenvalues, Mat3, Vec3, VectorField,
};
use crate::{Error, Result, ENGINE_VERSION};

pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// Step of the finite-difference Christoffel oracle, and the agreement it
/// must reach.
pub const ORACLE_STEP: f64 = 1e-5;
pub const ORACLE_LIMIT: f64 = 1e-6;

const BASIS: [Vec3; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

/// Where and how strictly a check is evaluated.
#[derive(Debug, Clone)]
pub struct CheckContext {
    pub scenario: String,
    pub points: Vec<Point>,
    pub tolerance: f64,
    pub seed: u64,
    pub sampling: String,
}

impl CheckContext {
    pub fn new(scenario: &str, points: Vec<Point>, tolerance: f64, seed: u64) -> Self {
        CheckContext {
            scenario: scenario.to_string(),
            sampling: format!("explicit {}", points.len()),
            points,
            tolerance,
            seed,
        }
    }

    /// Samples the structure's own domain.
    pub fn sampled(
        scenario: &str,
        s: &ContactStructure,
        strategy: Strategy,
        seed: u64,
        tolerance: f64,
    ) -> Result<Self> {
        Ok(CheckContext {
            scenario: scenario.to_string(),
            points: sample_points(&s.domain, strategy, seed)?,
            tolerance,
            seed,
            sampling: strategy.to_string(),
        })
    }
}

/// Evaluates `f` on the local structure at every point and assembles the
/// report with provenance.
pub(crate) fn run<F>(s: &ContactStructure, ctx: &CheckContext, columns: Vec<Column>, f: F) -> Result<CheckReport>
where
    F: Fn(&LocalContact, &mut ChaCha8Rng) -> Result<Vec<f64>> + Sync,
{
    let rows = collect_rows(&ctx.points, |i, p| {
        let lc = s.local(p)?;
        let mut rng = point_rng(ctx.seed, i);
        Ok(Row { residuals: f(&lc, &mut rng)?, trusted: lc.trusted() })
    })?;
    Ok(stamp(
        CheckReport::assemble(&ctx.scenario, columns, &ctx.points, rows, ctx.tolerance),
        s,
        ctx,
    ))
}

pub(crate) fn stamp(mut report: CheckReport, s: &ContactStructure, ctx: &CheckContext) -> CheckReport {
    report = report
        .with_provenance("seed", ctx.seed)
        .with_provenance("tolerance", ctx.tolerance)
        .with_provenance("sampling", ctx.sampling.clone())
        .with_provenance("structure", s.label.clone())
        .with_provenance("engine_version", ENGINE_VERSION);
    for (k, v) in &s.provenance {
        report.provenance.insert(k.clone(), v.clone());
    }
    report
}

fn outer(v: Vec3, w: Vec3) -> Mat3 {
    std::array::from_fn(|k| std::array::from_fn(|j| v[k] * w[j]))
}

fn mat_sub(a: &Mat3, b: &Mat3) -> Mat3 {
    std::array::from_fn(|i| sub(a[i], b[i]))
}

fn identity() -> Mat3 {
    BASIS
}

pub(crate) fn jet_basis(i: usize) -> [Jet; 3] {
    std::array::from_fn(|k| Jet::constant(if k == i { 1.0 } else { 0.0 }, 0))
}

/// Coordinate pairs plus one random pair: the check is bilinear, so the
/// coordinate pairs decide it and the random pair guards the assembly.
fn test_pairs(rng: &mut ChaCha8Rng) -> Vec<(Vec3, Vec3)> {
    let mut pairs: Vec<(Vec3, Vec3)> =
        BASIS.iter().flat_map(|&x| BASIS.iter().map(move |&y| (x, y))).collect();
    pairs.push((random_vector(rng), random_vector(rng)));
    pairs
}

pub(crate) fn test_vectors(rng: &mut ChaCha8Rng) -> Vec<Vec3> {
    let mut v = BASIS.to_vec();
    v.push(random_vector(rng));
    v
}

/// Residuals of η(ξ) = 1, φ² = −Id + η⊗ξ, φξ = 0, dη = 2g(·, φ·),
/// ι_ξ dη = 0, and nondegeneracy of η ∧ dη and of g.
fn axiom_residuals(lc: &LocalContact, rng: &mut ChaCha8Rng) -> [f64; 7] {
    let (eta, xi, phi, g, deta) = (lc.eta_v(), lc.xi_v(), lc.phi_v(), lc.geo.metric_value(), lc.deta_v());
    let eta_xi = (dot(eta, xi) - 1.0).abs();
    let phi2 = mat_mul(&phi, &phi);
    let target = mat_sub(&outer(xi, eta), &identity());
    let phi_squared = max_abs(&mat_sub(&phi2, &target));
    let phi_xi = norm(mat_vec(&phi, xi));
    let g_phi = mat_mul(&g, &phi);
    let mut compat = 0.0_f64;
    for (x, y) in test_pairs(rng) {
        let lhs = dot(x, mat_vec(&deta, y));
        let rhs = 2.0 * dot(x, mat_vec(&g_phi, y));
        compat = compat.max((lhs - rhs).abs());
    }
    let iota = norm(std::array::from_fn(|j| (0..3).map(|i| xi[i] * deta[i][j]).sum()));
    let volume = (eta[0] * deta[1][2] + eta[1] * deta[2][0] + eta[2] * deta[0][1]).abs();
    let min_eig = symmetric_eigenvalues(&g)[0];
    [eta_xi, phi_squared, phi_xi, compat, iota, volume, min_eig]
}

const AXIOM_GATED: usize = 5;

pub fn check_contact_axioms(s: &ContactStructure, ctx: &CheckContext) -> Result<CheckReport> {
    let columns = vec![
        Column::below("eta_xi"),
        Column::below("phi_squared"),
        Column::below("phi_xi"),
        Column::below("deta_metric"),
        Column::below("xi_reeb"),
        Column::min_above("contact_volume", DEGENERACY_FLOOR),
        Column::min_above("metric_min_eigenvalue", DEGENERACY_FLOOR),
    ];
    run(s, ctx, columns, |lc, rng| Ok(axiom_residuals(lc, rng).to_vec()))
}

/// Largest of the equality-type axiom residuals at a point.
pub(crate) fn axiom_defect(lc: &LocalContact, rng: &mut ChaCha8Rng) -> f64 {
    axiom_residuals(lc, rng)[..AXIOM_GATED].iter().copied().fold(0.0, f64::max)
}

/// Eigen-data of h: hE = λ_h E, h(φE) = −λ_h φE, E unit and horizontal,
/// and the algebraic properties of h.
pub fn check_h_eigenframe(s: &ContactStructure, ctx: &CheckContext) -> Result<CheckReport> {
    let columns = vec![
        Column::record("lambda_h"),
        Column::record("eigenframe_defined"),
        Column::below("eigen_e"),
        Column::below("eigen_phi_e"),
        Column::below("e_unit"),
        Column::below("e_horizontal"),
        Column::below("h_symmetric"),
        Column::below("h_anticommutes_phi"),
        Column::below("h_xi"),
    ];
    run(s, ctx, columns, |lc, _| {
        let h = lc.h_v();
        let gh = mat_mul(&lc.geo.metric_value(), &h);
        let sym = max_abs(&std::array::from_fn(|i| std::array::from_fn(|j| gh[i][j] - gh[j][i])));
        let phi = lc.phi_v();
        let anti = max_abs(&std::array::from_fn(|i| {
            add(mat_mul(&h, &phi)[i], mat_mul(&phi, &h)[i])
        }));
        let h_xi = norm(lc.h_of(lc.xi_v()));
        Ok(match lc.h_eigenframe() {
            Some(ef) => vec![
                ef.lambda_h,
                1.0,
                norm(sub(lc.h_of(ef.e), scale(ef.lambda_h, ef.e))),
                norm(add(lc.h_of(ef.phi_e), scale(ef.lambda_h, ef.phi_e))),
                (lc.geo.norm(ef.e) - 1.0).abs(),
                lc.eta_of(ef.e).abs(),
                sym,
                anti,
                h_xi,
            ],
            None => vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, sym, anti, h_xi],
        })
    })
}

/// The two Sasakian criteria: (∇_Xφ)Y = g(X,Y)ξ − η(Y)X and
/// R(X,Y)ξ = η(Y)X − η(X)Y.
pub fn check_sasakian(s: &ContactStructure, ctx: &CheckContext) -> Result<CheckReport> {
    let columns = vec![Column::below("nabla_phi"), Column::below("curvature_xi")];
    let mut report = run(s, ctx, columns, |lc, rng| {
        let nabla_phi: Vec<Mat3> = (0..3)
            .map(|i| local::mat_value(&lc.geo.covariant_endo(&jet_basis(i), &lc.phi)))
            .collect();
        let (xi, eta) = (lc.xi_v(), lc.eta_v());
        let (mut a, mut b) = (0.0_f64, 0.0_f64);
        for (x, y) in test_pairs(rng) {
            let mut lhs = [0.0; 3];
            for (i, t) in nabla_phi.iter().enumerate() {
                lhs = add(lhs, scale(x[i], mat_vec(t, y)));
            }
            let want = sub(scale(lc.geo.inner(x, y), xi), scale(dot(eta, y), x));
            a = a.max(norm(sub(lhs, want)));
            let r = lc.geo.riemann_apply(x, y, xi);
            let want = sub(scale(dot(eta, y), x), scale(dot(eta, x), y));
            b = b.max(norm(sub(r, want)));
        }
        Ok(vec![a, b])
    })?;
    note_agreement(&mut report, "nabla_phi", "curvature_xi");
    Ok(report)
}

fn note_agreement(report: &mut CheckReport, a: &str, b: &str) {
    let agree = report.column_passes(a) == report.column_passes(b);
    report.provenance.insert("criteria_agree".into(), json!(agree));
    if !agree {
        report.note(format!("criteria {a} and {b} disagree"));
    }
}

/// The two K-contact criteria: L_ξ g = 0 and R(X,ξ)ξ = X − η(X)ξ.
pub fn check_k_contact(s: &ContactStructure, ctx: &CheckContext) -> Result<CheckReport> {
    let columns = vec![Column::below("lie_xi_g"), Column::below("jacobi_xi")];
    let mut report = run(s, ctx, columns, |lc, rng| {
        let lie = max_abs(&local::mat_value(&lc.lie_xi_metric()));
        let xi = lc.xi_v();
        let jacobi = test_vectors(rng)
            .into_iter()
            .map(|x| norm(sub(lc.geo.riemann_apply(x, xi, xi), lc.horizontal_part(x))))
            .fold(0.0, f64::max);
        Ok(vec![lie, jacobi])
    })?;
    note_agreement(&mut report, "lie_xi_g", "jacobi_xi");
    Ok(report)
}

/// Pointwise (κ, μ) fit of the Jacobi condition, optionally compared with
/// expected fields. μ is compared only where it is identifiable.
pub fn check_kappa_mu_fit(
    s: &ContactStructure,
    ctx: &CheckContext,
    expected_kappa: Option<&ScalarField>,
    expected_mu: Option<&ScalarField>,
) -> Result<CheckReport> {
    let mut columns = vec![
        Column::record("kappa"),
        Column::record("mu"),
        Column::record("mu_identifiable"),
        Column::record("lambda_h"),
        Column::below("fit_residual"),
    ];
    if expected_kappa.is_some() {
        columns.push(Column::below("kappa_error"));
    }
    if expected_mu.is_some() {
        columns.push(Column::below("mu_error"));
    }
    run(s, ctx, columns, |lc, _| {
        let fit = lc.fit_kappa_mu();
        let p = lc.point();
        let mut row = vec![
            fit.kappa,
            fit.mu,
            f64::from(u8::from(fit.mu_identifiable)),
            fit.lambda_h,
            fit.residual,
        ];
        if let Some(k) = expected_kappa {
            row.push((fit.kappa - k.eval(&p)?).abs());
        }
        if let Some(m) = expected_mu {
            row.push(if fit.mu_identifiable { (fit.mu - m.eval(&p)?).abs() } else { 0.0 });
        }
        Ok(row)
    })
}

/// R(X,Y)ξ = κ(η(Y)X − η(X)Y) + μ(η(Y)hX − η(X)hY) over the frame
/// {E, φE, ξ}, and R(E, φE)ξ = 0 for the horizontal pair.
pub fn check_full_kmu(
    s: &ContactStructure,
    ctx: &CheckContext,
    kappa: &ScalarField,
    mu: &ScalarField,
) -> Result<CheckReport> {
    let columns = vec![Column::below("full_kmu"), Column::below("horizontal_r_xi")];
    run(s, ctx, columns, |lc, _| {
        let p = lc.point();
        let (k, m) = (kappa.eval(&p)?, mu.eval(&p)?);
        let frame = lc.horizontal_frame()?;
        let xi = lc.xi_v();
        let vectors = [frame.e, frame.phi_e, xi];
        let mut worst = 0.0_f64;
        for &x in &vectors {
            for &y in &vectors {
                let (ex, ey) = (lc.eta_of(x), lc.eta_of(y));
                let model = add(
                    scale(k, sub(scale(ey, x), scale(ex, y))),
                    scale(m, sub(scale(ey, lc.h_of(x)), scale(ex, lc.h_of(y)))),
                );
                worst = worst.max(norm(sub(lc.geo.riemann_apply(x, y, xi), model)));
            }
        }
        let horizontal = norm(lc.geo.riemann_apply(frame.e, frame.phi_e, xi));
        Ok(vec![worst, horizontal])
    })
}

/// QX = (r/2 − κ)X + (3κ − r/2)η(X)ξ + μhX and Qξ = 2κξ.
pub fn check_q_formula_3d(
    s: &ContactStructure,
    ctx: &CheckContext,
    kappa: &ScalarField,
    mu: &ScalarField,
) -> Result<CheckReport> {
    let columns = vec![
        Column::below("q_formula"),
        Column::below("q_xi"),
        Column::record("scalar_curvature"),
        Column::record("r_minus_2kappa"),
    ];
    run(s, ctx, columns, |lc, rng| {
        let p = lc.point();
        let (k, m) = (kappa.eval(&p)?, mu.eval(&p)?);
        let r = lc.geo.scalar_curvature();
        let xi = lc.xi_v();
        let frame = lc.horizontal_frame()?;
        let mut vectors = vec![frame.e, frame.phi_e, xi];
        vectors.extend(test_vectors(rng));
        let q_formula = vectors
            .iter()
            .map(|&x| {
                let model = add(
                    add(scale(0.5 * r - k, x), scale((3.0 * k - 0.5 * r) * lc.eta_of(x), xi)),
                    scale(m, lc.h_of(x)),
                );
                norm(sub(lc.geo.q_apply(x), model))
            })
            .fold(0.0, f64::max);
        let q_xi = norm(sub(lc.geo.q_apply(xi), scale(2.0 * k, xi)));
        Ok(vec![q_formula, q_xi, r, (r - 2.0 * k).abs()])
    })
}

/// ∇_ξ h = μhφ and h² = (κ − 1)φ². Reported as not applicable when the
/// contact metric axioms fail somewhere.
pub fn check_kmu_structural(
    s: &ContactStructure,
    ctx: &CheckContext,
    kappa: &ScalarField,
    mu: &ScalarField,
) -> Result<CheckReport> {
    let columns = vec![
        Column::below("nabla_xi_h"),
        Column::below("h_squared"),
        Column::record("axiom_defect"),
    ];
    let mut report = run(s, ctx, columns, |lc, rng| {
        let p = lc.point();
        let (k, m) = (kappa.eval(&p)?, mu.eval(&p)?);
        let xi = local::truncate_vec(&lc.xi, 0);
        let nabla = local::mat_value(&lc.geo.covariant_endo(&xi, &lc.h));
        let (h, phi) = (lc.h_v(), lc.phi_v());
        let hphi = mat_mul(&h, &phi);
        let a = max_abs(&std::array::from_fn(|i| sub(nabla[i], scale(m, hphi[i]))));
        let (h2, phi2) = (mat_mul(&h, &h), mat_mul(&phi, &phi));
        let b = max_abs(&std::array::from_fn(|i| sub(h2[i], scale(k - 1.0, phi2[i]))));
        Ok(vec![a, b, axiom_defect(lc, rng)])
    })?;
    if report.column_max("axiom_defect") >= ctx.tolerance {
        report.mark_not_applicable("contact metric axioms fail on the sample");
    }
    Ok(report)
}

/// Σ (∇_{E_i} h)E_i = φQξ for an orthonormal frame {E_i}.
pub fn check_h_divergence(s: &ContactStructure, ctx: &CheckContext) -> Result<CheckReport> {
    run(s, ctx, vec![Column::below("h_divergence")], |lc, _| Ok(vec![h_divergence_residual(lc)]))
}

fn h_divergence_residual(lc: &LocalContact) -> f64 {
    let rhs = lc.phi_of(lc.geo.q_apply(lc.xi_v()));
    norm(sub(lc.h_divergence(), rhs))
}

/// The identities satisfied by a generalized (κ, μ)-space with κ < 1:
/// dκ(ξ) = dr(ξ) = 0, ∇_E E = (dλ(φE)/2λ)φE, ∇_{φE}φE = (dλ(E)/2λ)E,
/// dμ(E) = −2dλ(E), dμ(φE) = 2dλ(φE) with λ = √(1 − κ), and the
/// h-divergence identity.
pub fn check_lemma32(
    s: &ContactStructure,
    ctx: &CheckContext,
    kappa: &ScalarField,
    mu: &ScalarField,
) -> Result<CheckReport> {
    let columns = vec![
        Column::below("dkappa_xi"),
        Column::below("dr_xi"),
        Column::below("nabla_e_e"),
        Column::below("nabla_phie_phie"),
        Column::below("dmu_e"),
        Column::below("dmu_phie"),
        Column::below("h_divergence"),
        Column::record("lambda_h_gap"),
    ];
    run(s, ctx, columns, |lc, _| {
        let p = lc.point();
        let ef = lc
            .h_eigenframe_jets()?
            .ok_or(Error::DegenerateEigenframe { point: p })?;
        let k = scalar_jet(kappa, &p, 1)?;
        let dmu = scalar_jet(mu, &p, 1)?.gradient();
        let lambda = (Jet::constant(1.0, 1) - k).sqrt()?;
        let dl = lambda.gradient();
        let l = lambda.value();
        let (e, phi_e) = (local::vec_value(&ef.e), local::vec_value(&ef.phi_e));
        let xi = lc.xi_v();
        let nabla_e_e = local::vec_value(&lc.geo.covariant_vector(&ef.e, &ef.e));
        let nabla_pe_pe = local::vec_value(&lc.geo.covariant_vector(&ef.phi_e, &ef.phi_e));
        Ok(vec![
            dot(k.gradient(), xi).abs(),
            dot(lc.geo.r.gradient(), xi).abs(),
            norm(sub(nabla_e_e, scale(dot(dl, phi_e) / (2.0 * l), phi_e))),
            norm(sub(nabla_pe_pe, scale(dot(dl, e) / (2.0 * l), e))),
            (dot(dmu, e) + 2.0 * dot(dl, e)).abs(),
            (dot(dmu, phi_e) - 2.0 * dot(dl, phi_e)).abs(),
            h_divergence_residual(lc),
            (ef.lambda_h.value() - l).abs(),
        ])
    })
}

/// η-Einstein fit QX = λX + γη(X)ξ with its trace identity, and the
/// differential identities (1 − 2n)dλ = dγ, dλ(ξ) = dγ(ξ) = 0 for n = 1.
/// With `expected`, the fitted pair is also compared with it.
pub fn check_prop41(
    s: &ContactStructure,
    ctx: &CheckContext,
    expected: Option<(f64, f64)>,
) -> Result<CheckReport> {
    let mut columns = vec![
        Column::record("lambda_ric"),
        Column::record("gamma"),
        Column::below("fit_residual"),
        Column::below("trace_identity"),
        Column::below("prop41"),
        Column::below("dlambda_xi"),
        Column::below("dgamma_xi"),
    ];
    if expected.is_some() {
        columns.push(Column::below("lambda_error"));
        columns.push(Column::below("gamma_error"));
    }
    run(s, ctx, columns, |lc, _| {
        let (l, gm) = lc.eta_einstein_jets();
        let fit = lc.fit_eta_einstein();
        let (dl, dg) = (l.gradient(), gm.gradient());
        let xi = lc.xi_v();
        let n = 1.0;
        let prop = (0..3).map(|k| ((1.0 - 2.0 * n) * dl[k] - dg[k]).abs()).fold(0.0, f64::max);
        let mut row = vec![
            fit.lambda_ric,
            fit.gamma,
            fit.residual,
            (3.0 * fit.lambda_ric + fit.gamma - lc.geo.scalar_curvature()).abs(),
            prop,
            dot(dl, xi).abs(),
            dot(dg, xi).abs(),
        ];
        if let Some((el, eg)) = expected {
            row.push((fit.lambda_ric - el).abs());
            row.push((fit.gamma - eg).abs());
        }
        Ok(row)
    })
}

/// On a non-K-contact η-Einstein structure the fitted λ_ric vanishes and γ
/// is locally constant. Not applicable unless both hypotheses hold on the
/// sample.
pub fn check_eta_einstein_rigidity(s: &ContactStructure, ctx: &CheckContext) -> Result<CheckReport> {
    let columns = vec![
        Column::below("lambda_ric"),
        Column::below("dgamma"),
        Column::record("eta_einstein_residual"),
        Column::record("lie_xi_g"),
    ];
    let mut report = run(s, ctx, columns, |lc, _| {
        let (_, gm) = lc.eta_einstein_jets();
        let fit = lc.fit_eta_einstein();
        let dgamma = gm.gradient().iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let lie = max_abs(&local::mat_value(&lc.lie_xi_metric()));
        Ok(vec![fit.lambda_ric.abs(), dgamma, fit.residual, lie])
    })?;
    let eta_einstein = report.column_max("eta_einstein_residual") < ctx.tolerance;
    let k_contact = report.column_max("lie_xi_g") < ctx.tolerance;
    report.provenance.insert("hypothesis_eta_einstein".into(), json!(eta_einstein));
    report.provenance.insert("hypothesis_not_k_contact".into(), json!(!k_contact));
    if !eta_einstein || k_contact {
        report.mark_not_applicable("requires an η-Einstein structure that is not K-contact");
    }
    Ok(report)
}

/// Killing equation for Z, the horizontality of [Z, ξ], and the
/// automorphism conditions [Z, ξ] = 0, L_Z η = 0, Z(λ_ric) = Z(γ) = 0. The
/// latter are gated only when the fitted γ is nonzero on the sample.
pub fn killing_and_automorphism(
    s: &ContactStructure,
    ctx: &CheckContext,
    z: &VectorField,
) -> Result<CheckReport> {
    let names = ["killing", "eta_bracket", "bracket", "lie_eta", "z_lambda", "z_gamma", "gamma"];
    let columns = names.iter().map(|n| Column::record(n)).collect();
    let mut report = run(s, ctx, columns, |lc, _| {
        let p = lc.point();
        let zj = z.jets(&p, 3)?;
        let killing = max_abs(&local::mat_value(&local::lie_derivative_metric(&zj, &lc.geo.g)));
        let bracket = local::vec_value(&local::lie_bracket(&zj, &lc.xi));
        // (L_Z η)_j = Z^i ∂_i η_j + η_i ∂_j Z^i
        let lie_eta: Vec3 = std::array::from_fn(|j| {
            let mut acc = local::directional(&zj, &lc.eta[j]);
            for i in 0..3 {
                acc += lc.eta[i] * zj[i].derivative(j);
            }
            acc.value()
        });
        let (l, gm) = lc.eta_einstein_jets();
        let zv = local::vec_value(&zj);
        Ok(vec![
            killing,
            lc.eta_of(bracket).abs(),
            lc.geo.norm(bracket),
            norm(lie_eta),
            dot(l.gradient(), zv).abs(),
            dot(gm.gradient(), zv).abs(),
            gm.value(),
        ])
    })?;
    let gamma = report.column("gamma");
    let gamma_nonzero = !gamma.is_empty() && gamma.iter().all(|g| g.abs() > ctx.tolerance);
    report.provenance.insert("hypothesis_gamma_nonzero".into(), json!(gamma_nonzero));
    report.set_gate("killing", Gate::Below);
    report.set_gate("eta_bracket", Gate::Below);
    if gamma_nonzero {
        for name in ["bracket", "lie_eta", "z_lambda", "z_gamma"] {
            report.set_gate(name, Gate::Below);
        }
    }
    Ok(report)
}

/// Universal identities of the Levi-Civita connection of g: torsion,
/// metric compatibility, contracted Bianchi, the three-dimensional
/// curvature decomposition, curvature symmetries, Ricci symmetry, and the
/// finite-difference Christoffel oracle.
pub fn check_metric_identities(s: &ContactStructure, ctx: &CheckContext) -> Result<CheckReport> {
    let columns = vec![
        Column::below("torsion"),
        Column::below("metric_compatibility"),
        Column::below("contracted_bianchi"),
        Column::below("petersen"),
        Column::below("curvature_symmetries"),
        Column::below("ricci_symmetry"),
        Column::below_limit("christoffel_oracle", ORACLE_LIMIT),
        Column::record("curvature_scale"),
    ];
    let rows = collect_rows(&ctx.points, |i, p| {
        let geo = crate::tensorlab::christoffel(&s.g).at(p)?;
        let mut rng = point_rng(ctx.seed, i);
        let (x, y, z, w) = (
            random_vector(&mut rng),
            random_vector(&mut rng),
            random_vector(&mut rng),
            random_vector(&mut rng),
        );
        let ric = geo.ricci_value();
        let ric_sym = max_abs(&std::array::from_fn(|a| std::array::from_fn(|b| ric[a][b] - ric[b][a])));
        let exact: [[[f64; 3]; 3]; 3] = std::array::from_fn(|k| {
            std::array::from_fn(|a| std::array::from_fn(|b| geo.gamma[k][a][b].value()))
        });
        let fd = christoffel_finite_difference(&s.g, p, ORACLE_STEP)?;
        let mut oracle = 0.0_f64;
        for k in 0..3 {
            for a in 0..3 {
                for b in 0..3 {
                    oracle = oracle.max((exact[k][a][b] - fd[k][a][b]).abs());
                }
            }
        }
        Ok(Row {
            residuals: vec![
                geo.torsion_residual(),
                geo.metric_compatibility_residual(),
                geo.contracted_bianchi_residual(),
                geo.petersen_residual(x, y, z),
                geo.curvature_symmetry_residual(x, y, z, w),
                ric_sym,
                oracle,
                geo.curvature_scale(),
            ],
            trusted: geo.trusted(),
        })
    })?;
    Ok(stamp(
        CheckReport::assemble(&ctx.scenario, columns, &ctx.points, rows, ctx.tolerance),
        s,
        ctx,
    ))
}
