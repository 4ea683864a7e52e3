use nalgebra::{DMatrix, DVector};
use serde_json::{json, Value};

use super::input::{load_algebra, load_matrix, load_metric, load_spec, InputDigest, LoadedAlgebra};
use super::{Check, Cli, CliError, Command, Report, Source};
use crate::geometry::{
    conformal_flatness, conformal_killing_check, curvature, Chart, KillingReport, KillingTolerances, KillingVerdict, MetricField,
    ProbeGrid, VectorField,
};
use crate::liealg::{
    eigenspace_decompose, eigenspace_decompose_element, grade_so, invariance_defect, invariant_null_lines,
    jordan_decompose, sigma_b_spectrum, GradedDecomposition, MinkowskiFrame, GRADING_TOL, NULL_TOL,
};
use crate::penrose::{
    brinkmann_to_rosen, default_ladder, penrose_limit, penrose_of_conformal, plane_wave_limit_dichotomy,
    rescale_convergence, validate_adapted, RescaleTable, RosenWave, CONJUGATE_DET, FLAT_LIMIT_TOL, GEODESIC_TOL,
    INVERSE_TOL, RATIO_BOUND, SELF_LIMIT_TOL, SHAPE_TOL,
};
use crate::planewave::{
    check_prop_pwkilling, extra_field, homothety_field, killing_basis, verify_plane_wave_tol, PlaneWaveSpec,
    PlaneWaveVerdict, BRACKET_TOL, PLANE_WAVE_TOL,
};
use crate::Error;

const CURVATURE_TOL: f64 = 1e-8;
const WEYL_TOL: f64 = 1e-8;
const ROSEN_PULLBACK_TOL: f64 = 1e-8;
const JORDAN_TOL: f64 = 1e-10;
const JORDAN_PART_TOL: f64 = 1e-8;
const SO_GRADING_TOL: f64 = 1e-10;
const SAMPLES: usize = 11;

type Outcome = (Vec<Check>, Value);

fn engine(what: &'static str) -> impl Fn(Error) -> CliError {
    move |e| CliError(format!("{what}: {e}"))
}

fn mat(m: &DMatrix<f64>) -> Value {
    let rows: Vec<Vec<f64>> = (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
    json!(rows)
}

fn probe_points(spec: Option<&String>, default: &ProbeGrid, dim: usize, digest: &mut InputDigest) -> Result<Vec<Vec<f64>>, CliError> {
    let grid = match spec {
        Some(s) => {
            digest.add("probes", s.as_bytes());
            ProbeGrid::parse(s).map_err(engine("--probes"))?
        }
        None => default.clone(),
    };
    grid.points(dim).map_err(engine("--probes"))
}

fn load_source(src: &Source, digest: &mut InputDigest) -> Result<(MetricField, Vec<Vec<f64>>), CliError> {
    let (g, grid) = match (&src.metric, &src.spec) {
        (Some(path), _) => {
            let lm = load_metric(path, digest)?;
            (lm.metric, lm.default_grid)
        }
        (None, Some(path)) => {
            let spec = load_spec(path, digest)?;
            let (lo, hi) = spec.domain();
            (spec.brinkmann_metric().map_err(engine("Brinkmann metric"))?, ProbeGrid::default_null_on(lo, hi))
        }
        (None, None) => return Err(CliError::input("one of --metric or --spec is required")),
    };
    let pts = probe_points(src.probes.as_ref(), &grid, g.dim(), digest)?;
    Ok((g, pts))
}

fn parse_field(chart: &Chart, src: &str, digest: &mut InputDigest) -> Result<VectorField, CliError> {
    digest.add("field", src.as_bytes());
    let comps: Vec<&str> = src.split(';').map(str::trim).collect();
    if comps.len() != chart.dim() {
        return Err(CliError::input(format!(
            "--field has {} components, the chart ({}) has {}",
            comps.len(),
            chart.names().join(", "),
            chart.dim()
        )));
    }
    VectorField::from_exprs(chart.clone(), &comps).map_err(engine("--field"))
}

pub(super) fn execute(cli: &Cli, arguments: Vec<String>) -> Result<Report, CliError> {
    let mut digest = InputDigest::default();
    let d = &mut digest;
    let (checks, result) = match &cli.command {
        Command::Curvature { source, tol } => cmd_curvature(source, tol.unwrap_or(CURVATURE_TOL), d)?,
        Command::Weyl { source, tol } => cmd_weyl(source, tol.unwrap_or(WEYL_TOL), d)?,
        Command::KillingCheck { source, field, tol } => cmd_killing(source, field, *tol, d)?,
        Command::PlanewaveVerify {
            spec,
            metric,
            field,
            probes,
            tol,
        } => cmd_planewave(spec.as_ref(), metric.as_ref(), field.as_deref(), probes.as_ref(), tol.unwrap_or(PLANE_WAVE_TOL), d)?,
        Command::Penrose {
            metric,
            probes,
            ladder,
            tol,
        } => cmd_penrose(metric, probes.as_ref(), *ladder, tol.unwrap_or(RATIO_BOUND), d)?,
        Command::PenroseConformal {
            metric,
            sigma,
            probes,
            tol,
        } => cmd_conformal(metric, sigma, probes.as_ref(), tol.unwrap_or(crate::penrose::CONFORMAL_TOL), d)?,
        Command::RosenConvert { spec, tol } => cmd_rosen(spec, tol.unwrap_or(ROSEN_PULLBACK_TOL), d)?,
        Command::Grade {
            n,
            algebra,
            matrix,
            derivation,
            tol,
        } => match (n, algebra, matrix) {
            (Some(n), _, _) => cmd_grade_so(*n, tol.unwrap_or(SO_GRADING_TOL), d)?,
            (None, Some(a), Some(m)) => cmd_grade(a, m, *derivation, tol.unwrap_or(GRADING_TOL), d)?,
            _ => return Err(CliError::input("grade needs --n, or --algebra with --matrix")),
        },
        Command::Jordan { matrix, tol } => cmd_jordan(matrix, tol.unwrap_or(JORDAN_TOL), d)?,
        Command::Spectrum { alpha } => cmd_spectrum(*alpha, d),
        Command::NullLines { algebra, tol } => cmd_null_lines(algebra, cli.seed, tol.unwrap_or(NULL_TOL), d)?,
    };
    let pass = checks.iter().all(|c| c.pass);
    Ok(Report {
        command: cli.command.name().to_string(),
        arguments,
        engine: format!("confwave {}", env!("CARGO_PKG_VERSION")),
        input_sha256: digest.hex(),
        seed: cli.seed,
        checks,
        result,
        pass,
    })
}

fn cmd_curvature(source: &Source, tol: f64, digest: &mut InputDigest) -> Result<Outcome, CliError> {
    let (g, pts) = load_source(source, digest)?;
    let (mut sym, mut trace, mut bianchi) = (0.0f64, 0.0f64, 0.0f64);
    let mut rows = Vec::with_capacity(pts.len());
    for p in &pts {
        let b = curvature(&g, p).map_err(engine("curvature"))?;
        sym = sym.max(b.symmetry_residual());
        trace = trace.max(b.weyl_trace_residual());
        bianchi = bianchi.max(b.second_bianchi_residual().unwrap_or(0.0));
        rows.push(json!({
            "point": p,
            "scalar": b.scalar,
            "max_abs_riemann": b.max_abs_riemann(),
            "max_abs_weyl": b.max_abs_weyl(),
            "ricci": mat(&b.ricci),
        }));
    }
    Ok((
        vec![
            Check::at_most("riemann symmetries", sym, tol),
            Check::at_most("weyl traces", trace, tol),
            Check::at_most("second bianchi", bianchi, tol),
        ],
        json!({"chart": g.chart().names(), "probes": pts.len(), "points": rows}),
    ))
}

fn cmd_weyl(source: &Source, tol: f64, digest: &mut InputDigest) -> Result<Outcome, CliError> {
    let (g, pts) = load_source(source, digest)?;
    let rep = conformal_flatness(&g, &pts, tol).map_err(engine("weyl"))?;
    let per_point: Vec<Value> = pts
        .iter()
        .zip(&rep.per_point)
        .map(|(p, w)| json!({"point": p, "max_abs_weyl": w}))
        .collect();
    let mut result = json!({
        "chart": g.chart().names(),
        "conformally_flat": rep.conformally_flat,
        "max_abs_weyl": rep.max_weyl,
        "points": per_point,
    });
    if g.dim() == 3 {
        result["note"] = json!("the Weyl tensor vanishes identically in dimension 3");
    }
    Ok((vec![Check::at_most("max |W|", rep.max_weyl, tol)], result))
}

fn cmd_killing(source: &Source, field: &str, tol: Option<f64>, digest: &mut InputDigest) -> Result<Outcome, CliError> {
    let (g, pts) = load_source(source, digest)?;
    let x = parse_field(g.chart(), field, digest)?;
    let mut tols = KillingTolerances::default();
    if let Some(t) = tol {
        tols.residual = t;
    }
    let rep = conformal_killing_check(&g, &x, &pts, tols).map_err(engine("killing-check"))?;
    let checks = vec![Check::at_most("|L_X g - lambda g| / |g|", rep.max_residual, tols.residual)];
    let result = json!({
        "verdict": rep.verdict,
        "lambda_mean": rep.lambda_mean,
        "lambda_std": rep.lambda_std,
        "lambda_deviation": rep.lambda_deviation,
        "failed_points": rep.failed_points(),
        "tolerances": rep.tolerances,
        "points": rep.points,
    });
    Ok((checks, result))
}

fn plane_wave_checks(v: &PlaneWaveVerdict) -> Vec<Check> {
    vec![
        Check::at_most("nabla xi and g(xi, xi)", v.parallel_null_residual, v.tolerance),
        Check::at_most("R on xi-perp", v.curvature_flat_on_perp_residual, v.tolerance),
        Check::at_most("nabla R on xi-perp", v.nabla_r_on_perp_residual, v.tolerance),
    ]
}

fn cmd_planewave(
    spec: Option<&std::path::PathBuf>,
    metric: Option<&std::path::PathBuf>,
    field: Option<&str>,
    probes: Option<&String>,
    tol: f64,
    digest: &mut InputDigest,
) -> Result<Outcome, CliError> {
    if let Some(path) = metric {
        let lm = load_metric(path, digest)?;
        let g = lm.metric;
        let pts = probe_points(probes, &lm.default_grid, g.dim(), digest)?;
        let xi = parse_field(g.chart(), field.unwrap_or_default(), digest)?;
        let v = verify_plane_wave_tol(&g, &xi, &pts, tol).map_err(engine("planewave-verify"))?;
        let checks = plane_wave_checks(&v);
        return Ok((checks, json!({ "plane_wave": v })));
    }
    let path = spec.ok_or_else(|| CliError::input("one of --spec or --metric is required"))?;
    let spec: PlaneWaveSpec = load_spec(path, digest)?;
    let g = spec.brinkmann_metric().map_err(engine("Brinkmann metric"))?;
    let (lo, hi) = spec.domain();
    let pts = probe_points(probes, &ProbeGrid::default_null_on(lo, hi), g.dim(), digest)?;
    let chart = g.chart().clone();
    let xi = VectorField::coordinate(chart.clone(), 1);
    let v = verify_plane_wave_tol(&g, &xi, &pts, tol).map_err(engine("planewave-verify"))?;
    let mut checks = plane_wave_checks(&v);

    let kb = killing_basis(&spec).map_err(engine("Killing basis"))?;
    let prop = check_prop_pwkilling(&kb.heisenberg(), &g, &pts).map_err(engine("Killing characterization"))?;
    let h = &prop.hypotheses;
    let killing_res = h.killing.iter().map(|k| k.1).fold(0.0, f64::max);
    let not_killing = h.killing.iter().filter(|k| k.0 != KillingVerdict::Killing).count();
    let ktol = KillingTolerances::default().residual;
    checks.push(Check::at_most("heisenberg fields: L_X g", killing_res, ktol));
    checks.push(Check::at_most("heisenberg fields: non-Killing count", not_killing as f64, 0.0));
    checks.push(Check::at_most("g(xi_0, xi_i)", h.orthogonality_residual, BRACKET_TOL));
    checks.push(Check::at_most(
        "rank deficit of span(xi_i)",
        (g.dim() - 1).saturating_sub(h.min_rank) as f64,
        0.0,
    ));
    checks.push(Check::at_most("[xi_0, xi_i]", h.central_bracket_residual, BRACKET_TOL));
    checks.push(Check::at_most("[xi_i, xi_j] off R xi_0", h.heisenberg_bracket_residual, BRACKET_TOL));

    let mut extras = serde_json::Map::new();
    if let Some(x) = extra_field(&spec, &chart) {
        let r = conformal_killing_check(&g, &x, &pts, KillingTolerances::default()).map_err(engine("extra field"))?;
        checks.push(Check::at_most("extra field: L_X g", r.max_residual, ktol));
        checks.push(Check::at_most("extra field: max |lambda|", max_lambda_dev(&r, 0.0), ktol));
        extras.insert("extra".into(), json!({"verdict": r.verdict, "max_residual": r.max_residual}));
    }
    let r = conformal_killing_check(&g, &homothety_field(&chart), &pts, KillingTolerances::default())
        .map_err(engine("homothety"))?;
    checks.push(Check::at_most("homothety: L_X g", r.max_residual, ktol));
    checks.push(Check::at_most("homothety: max |lambda - 2|", max_lambda_dev(&r, 2.0), ktol));
    extras.insert("homothety".into(), json!({"verdict": r.verdict, "lambda_mean": r.lambda_mean}));

    let w = kb.wronskian_constants();
    Ok((
        checks,
        json!({
            "family": spec.family(),
            "n": spec.n(),
            "domain": [lo, hi],
            "t0": kb.t0,
            "probes": pts.len(),
            "plane_wave": v,
            "heisenberg_fields": h
                .killing
                .iter()
                .map(|(v, r)| json!({"verdict": v, "max_residual": r}))
                .collect::<Vec<_>>(),
            "min_rank": h.min_rank,
            "wronskian_constants": mat(&w),
            "conclusions_pass": prop.pass,
            "companions": Value::Object(extras),
        }),
    ))
}

/// `max |λ − target|` over the evaluated points; NaN when none were.
fn max_lambda_dev(r: &KillingReport, target: f64) -> f64 {
    let good: Vec<f64> = r.points.iter().filter(|p| p.error.is_none()).map(|p| (p.lambda - target).abs()).collect();
    if good.is_empty() {
        f64::NAN
    } else {
        good.into_iter().fold(0.0, f64::max)
    }
}

fn samples_json(w: &RosenWave) -> Result<Vec<Value>, CliError> {
    Ok(w.samples(SAMPLES)
        .map_err(engine("samples"))?
        .iter()
        .map(|(u, c)| json!({"u": u, "c_bar": mat(c)}))
        .collect())
}

fn rescale_checks(t: &RescaleTable, bound: f64) -> Vec<Check> {
    if t.fixed_point {
        let dev = t.rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
        return vec![Check::at_most("rescaled deviation (fixed point)", dev, 0.0)];
    }
    let rising = t
        .rows
        .windows(2)
        .filter(|w| w[1].deviation > w[0].deviation)
        .count();
    vec![
        Check::at_most("rescale: increasing steps", rising as f64, 0.0),
        Check::at_most("rescale: asymptotic ratio", t.asymptotic_ratio, bound),
    ]
}

fn cmd_penrose(
    path: &std::path::Path,
    probes: Option<&String>,
    ladder: usize,
    bound: f64,
    digest: &mut InputDigest,
) -> Result<Outcome, CliError> {
    let lm = load_metric(path, digest)?;
    let g = &lm.metric;
    let pts = probe_points(probes, &lm.default_grid, g.dim(), digest)?;
    let am = validate_adapted(g, &pts).map_err(engine("adapted shape"))?;
    let pl = penrose_limit(&am).map_err(engine("penrose limit"))?;
    let mut checks = vec![
        Check::at_most("adapted shape", am.shape_residual, SHAPE_TOL),
        Check::at_most("geodesic Gamma^k_uu", am.geodesic_residual, GEODESIC_TOL),
    ];
    // the limit against the input's own transverse block on the geodesic
    let n = am.n();
    let mut profile = 0.0f64;
    for u in pl.sample_points(SAMPLES) {
        let input = match &lm.rosen {
            Some(w) => w.c_bar(u),
            None => {
                let mut p = vec![0.0; n + 2];
                p[0] = u;
                g.matrix_at(&p).map(|m| m.view((2, 2), (n, n)).into_owned())
            }
        }
        .map_err(engine("input profile"))?;
        profile = profile.max((pl.c_bar(u).map_err(engine("limit profile"))? - input).amax());
    }
    checks.push(Check::at_most("limit profile vs input", profile, 0.0));
    let table = rescale_convergence(&am, &default_ladder(ladder)).map_err(engine("rescaling"))?;
    checks.extend(rescale_checks(&table, bound));
    Ok((
        checks,
        json!({
            "chart": g.chart().names(),
            "probes": pts.len(),
            "shape_residual": am.shape_residual,
            "geodesic_residual": am.geodesic_residual,
            "domain": [pl.domain().0, pl.domain().1],
            "samples": samples_json(&pl)?,
            "rescale": table,
        }),
    ))
}

fn cmd_conformal(
    path: &std::path::Path,
    sigma: &str,
    probes: Option<&String>,
    tol: f64,
    digest: &mut InputDigest,
) -> Result<Outcome, CliError> {
    let lm = load_metric(path, digest)?;
    let g = &lm.metric;
    let pts = probe_points(probes, &lm.default_grid, g.dim(), digest)?;
    digest.add("sigma", sigma.as_bytes());
    let s = g.chart().parse(sigma).map_err(engine("--sigma"))?;
    let am = validate_adapted(g, &pts).map_err(engine("adapted shape"))?;
    let res = penrose_of_conformal(&am, &s).map_err(engine("conformal limit"))?;
    let r = &res.report;
    let checks = vec![
        Check::at_most("adapted shape of G^* e^sigma g", r.shape_residual, SHAPE_TOL),
        Check::at_most("geodesic Gamma^k_uu of G^* e^sigma g", r.geodesic_residual, GEODESIC_TOL),
        Check::at_most("f(h(u, v, x), v, x) - u", r.inverse_residual, INVERSE_TOL.max(tol)),
        Check::at_most("limit vs K c along the geodesic", r.formula_residual, tol),
        Check::at_most("phi^* PL(e^sigma g) - K PL(g)", r.pullback_residual, tol),
    ];
    let d = g.dim();
    let mut rows = Vec::new();
    for u in res.limit.sample_points(SAMPLES) {
        let mut p = vec![0.0; d];
        p[0] = u;
        let k = res.change.k.eval(&p).map_err(engine("K"))?;
        let f = res.change.phi[0].eval(&p).map_err(engine("f"))?;
        rows.push(json!({
            "u": u,
            "K": k,
            "f": f,
            "c_bar": mat(&res.limit.c_bar(u).map_err(engine("limit"))?),
            "c_bar_sigma": mat(&res.limit_sigma.c_bar(u).map_err(engine("limit"))?),
        }));
    }
    Ok((checks, json!({"sigma": sigma, "probes": pts.len(), "samples": rows})))
}

fn cmd_rosen(path: &std::path::Path, tol: f64, digest: &mut InputDigest) -> Result<Outcome, CliError> {
    let spec = load_spec(path, digest)?;
    let conv = brinkmann_to_rosen(&spec).map_err(engine("rosen-convert"))?;
    let n = spec.n();
    let brinkmann = spec.brinkmann_metric().map_err(engine("Brinkmann metric"))?;
    let pulled = brinkmann
        .pullback(Chart::adapted(n).map_err(engine("chart"))?, &conv.map)
        .map_err(engine("pullback"))?;
    let rm = conv.rosen.metric().map_err(engine("Rosen metric"))?;
    let (lo, hi) = spec.domain();
    let pts = ProbeGrid::default_null_on(lo, hi).points(n + 2).map_err(engine("probes"))?;
    let mut pull_res = 0.0f64;
    for p in &pts {
        let a = pulled.matrix_at(p).map_err(engine("pullback"))?;
        let b = rm.matrix_at(p).map_err(engine("Rosen metric"))?;
        pull_res = pull_res.max((a - b).amax());
    }
    let dich = plane_wave_limit_dichotomy(&spec).map_err(engine("limits"))?;
    let r = &dich.report;
    let checks = vec![
        Check::above("min det E", conv.min_det, CONJUGATE_DET),
        Check::at_most("J^* g_Brinkmann - g_Rosen", pull_res, tol),
        Check::at_most("limit along xi: max |R|", r.flat_limit_curvature, FLAT_LIMIT_TOL),
        Check::at_most("transversal limit: R vs J^* R", r.self_limit_curvature_residual, SELF_LIMIT_TOL),
        Check::at_most("transversal limit: profile", r.self_limit_profile_residual, 0.0),
    ];
    Ok((
        checks,
        json!({
            "family": spec.family(),
            "n": n,
            "t0": conv.t0,
            "domain": [lo, hi],
            "min_det": conv.min_det,
            "samples": samples_json(&conv.rosen)?,
            "limits": r,
        }),
    ))
}

fn grading_json(dec: &GradedDecomposition) -> Value {
    json!({
        "spectrum": dec.spectrum.iter().map(|(mu, k)| json!({"eigenvalue": mu, "multiplicity": k})).collect::<Vec<_>>(),
        "components": dec.components,
        "derivation_matrix": mat(&dec.derivation_matrix),
    })
}

fn cmd_grade_so(n: usize, tol: f64, digest: &mut InputDigest) -> Result<Outcome, CliError> {
    digest.add("n", n.to_string().as_bytes());
    let frame = MinkowskiFrame::new(n + 2).map_err(engine("frame"))?;
    let gr = grade_so(&frame);
    let (m, z, p) = gr.dims();
    let expected = (n, 1 + n * (n - 1) / 2, n);
    let deficit = m.abs_diff(expected.0) + z.abs_diff(expected.1) + p.abs_diff(expected.2);
    let checks = vec![
        Check::at_most("dimension counts", deficit as f64, 0.0),
        Check::at_most("[s^a, s^b] in s^(a+b)", gr.bracket_residual(&frame), tol),
    ];
    let mats = |v: &[DMatrix<f64>]| v.iter().map(mat).collect::<Vec<_>>();
    Ok((
        checks,
        json!({
            "n": n,
            "dims": {"minus": m, "zero": z, "plus": p},
            "grading_element": mat(&frame.grading_element()),
            "minus": mats(&gr.minus),
            "zero": mats(&gr.zero),
            "plus": mats(&gr.plus),
        }),
    ))
}

fn cmd_grade(
    algebra: &std::path::Path,
    matrix: &std::path::Path,
    derivation: bool,
    tol: f64,
    digest: &mut InputDigest,
) -> Result<Outcome, CliError> {
    let alg = load_algebra(algebra, digest)?;
    let b = load_matrix(matrix, digest)?;
    let dec = match &alg {
        LoadedAlgebra::Matrix(ma) if !derivation => {
            if b.nrows() != ma.frame().dim() {
                return Err(CliError::input(format!(
                    "element must be {0}x{0}; pass --derivation for a matrix on the algebra's coordinates",
                    ma.frame().dim()
                )));
            }
            eigenspace_decompose_element(ma, &b)
        }
        LoadedAlgebra::Matrix(ma) => eigenspace_decompose(ma.lie(), &b),
        LoadedAlgebra::Abstract(la) => eigenspace_decompose(la, &b),
    }
    .map_err(engine("grade"))?;
    let dim = match &alg {
        LoadedAlgebra::Matrix(ma) => ma.dim(),
        LoadedAlgebra::Abstract(la) => la.dim(),
    };
    let checks = vec![
        Check::at_most("derivation (Leibniz) defect", dec.derivation_defect, tol),
        Check::at_most("[g^mu, g^nu] in g^(mu+nu)", dec.grading_residual, tol),
        Check::at_most("dim algebra - sum dim g^mu", dim.abs_diff(dec.total_dim()) as f64, 0.0),
    ];
    Ok((checks, grading_json(&dec)))
}

fn cmd_jordan(path: &std::path::Path, tol: f64, digest: &mut InputDigest) -> Result<Outcome, CliError> {
    let b = load_matrix(path, digest)?;
    let parts = jordan_decompose(&b).map_err(engine("jordan"))?;
    let checks = vec![
        Check::at_most("|B_h B_e B_u - B| / |B|", parts.reconstruction_error(&b), tol),
        Check::at_most("commutators of the parts", parts.commutation_defect(), JORDAN_PART_TOL),
        Check::at_most("(B_u - I)^dim", parts.nilpotency_defect(), JORDAN_PART_TOL),
    ];
    Ok((
        checks,
        json!({
            "b_s": mat(&parts.b_s),
            "b_u": mat(&parts.b_u),
            "b_h": mat(&parts.b_h),
            "b_e": mat(&parts.b_e),
            "eigenvalues": parts.clusters,
            "condition": parts.condition,
            "hyperbolic": parts.is_hyperbolic(),
            "elliptic": parts.is_elliptic(),
            "unipotent": parts.is_unipotent(),
            "semisimple": parts.is_semisimple(),
        }),
    ))
}

fn cmd_spectrum(alpha: f64, digest: &mut InputDigest) -> Outcome {
    digest.add("alpha", format!("{alpha:?}").as_bytes());
    let s = sigma_b_spectrum(alpha);
    (
        Vec::new(),
        json!({
            "alpha": s.alpha,
            "values": s.values.iter().map(|(v, k)| json!({"value": v, "multiplicity": k})).collect::<Vec<_>>(),
            "branch": s.branch,
        }),
    )
}

fn cmd_null_lines(path: &std::path::Path, seed: u64, tol: f64, digest: &mut InputDigest) -> Result<Outcome, CliError> {
    let ma = match load_algebra(path, digest)? {
        LoadedAlgebra::Matrix(ma) => ma,
        LoadedAlgebra::Abstract(_) => {
            return Err(CliError::input("null-lines needs a matrix algebra (`frame_dim` and `basis`)"))
        }
    };
    let frame = *ma.frame();
    let lines = invariant_null_lines(ma.basis(), &frame, seed).map_err(engine("null-lines"))?;
    let (mut inv, mut null) = (0.0f64, 0.0f64);
    for v in &lines {
        inv = inv.max(invariance_defect(v, ma.basis()));
        null = null.max(frame.inner(v, v).abs() / v.norm_squared());
    }
    let reps: Vec<Vec<f64>> = lines.iter().map(|v: &DVector<f64>| v.iter().copied().collect()).collect();
    Ok((
        vec![
            Check::at_most("invariance defect", inv, tol),
            Check::at_most("G(v, v) / |v|^2", null, tol),
        ],
        json!({"frame_dim": frame.dim(), "count": reps.len(), "lines": reps}),
    ))
}
