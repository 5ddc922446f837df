//! Command implementations behind the `aqrm` binary. Every run creates its
//! output directory, drops a `resolved_config.cfg` echo, and writes results
//! atomically (temp file + rename).

use crate::config::RunConfig;
use crate::svg::CurvePlot;
use aqrm_core::error::CoreError;
use aqrm_core::fock::{self, ModelParams, Parity};
use aqrm_core::partition;
use aqrm_core::serial::{canon_f64, emit_csv, Json};
use aqrm_core::simplex::{Sampler, SeriesConfig};
use aqrm_core::zeta::{self, MellinSettings, ZetaResult};
use num_complex::Complex64;
use std::path::{Path, PathBuf};

/// Failure modes with their exit-code contract: usage/assertion failures
/// exit 2, numerical non-convergence exits 3.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Assertion(String),
    Convergence(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Convergence(_) => 3,
            _ => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Assertion(m) | CliError::Convergence(m) | CliError::Io(m) => m,
        }
    }
}

fn numerical(e: CoreError) -> CliError {
    match e {
        CoreError::TruncationNotConverged { .. } | CoreError::EigenConvergence { .. } => {
            CliError::Convergence(e.to_string())
        }
        other => CliError::Usage(other.to_string()),
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes).map_err(|e| CliError::Io(format!("{}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn prepare_out(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let dir = PathBuf::from(&cfg.out_dir);
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    write_atomic(&dir.join("resolved_config.cfg"), cfg.echo().as_bytes())?;
    Ok(dir)
}

fn params_of(cfg: &RunConfig) -> Result<ModelParams, CliError> {
    ModelParams::new(cfg.g, cfg.delta, cfg.eps).map_err(|e| CliError::Usage(e.to_string()))
}

fn series_of(cfg: &RunConfig) -> Result<SeriesConfig, CliError> {
    let sampler = match cfg.sampler.as_str() {
        "qmc" => Sampler::Qmc { points_per_lambda: cfg.points, seed: cfg.seed },
        "nested_quadrature" => Sampler::NestedQuadrature { order: cfg.order, max_dim: cfg.max_dim },
        other => return Err(CliError::Usage(format!("unknown sampler {other}"))),
    };
    let series = SeriesConfig {
        lambda_max: cfg.lambda_max,
        sampler,
        target_rel_err: cfg.target_rel_err,
    };
    series.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(series)
}

fn zeta_result_json(r: &ZetaResult) -> Json {
    let mut pairs = vec![
        ("value_re", Json::Num(r.value.re)),
        ("value_im", Json::Num(r.value.im)),
        ("err_bracket", Json::Num(r.err_bracket)),
        ("tail_estimate", Json::Num(r.tail_estimate)),
        (
            "method",
            Json::Str(
                match r.method {
                    zeta::ZetaMethod::EigenSum => "eigen_sum",
                    zeta::ZetaMethod::Mellin => "mellin",
                    zeta::ZetaMethod::ClosedFormLimit => "closed_form_limit",
                }
                .into(),
            ),
        ),
    ];
    if let Some(j) = r.j_cut {
        pairs.push(("j_cut", Json::Int(j as i64)));
    }
    if let Some(m) = r.truncation_dim {
        pairs.push(("truncation_dim", Json::Int(m as i64)));
    }
    if let Some(l) = r.lambda_max {
        pairs.push(("lambda_max", Json::Int(l as i64)));
    }
    if let Some(n) = r.nodes {
        pairs.push(("nodes", Json::Int(n as i64)));
    }
    Json::obj(pairs)
}

/// `spectrum`: adaptive eigenvalues to CSV and JSON; exits 2 when the
/// truncation fails to converge.
pub fn cmd_spectrum(cfg: &RunConfig, trunc: Option<&str>) -> Result<(), CliError> {
    let dir = prepare_out(cfg)?;
    let params = params_of(cfg)?;
    let spec = fock::spectrum(&params, cfg.j_max, cfg.tol).map_err(|e| match e {
        CoreError::TruncationNotConverged { .. } => CliError::Assertion(e.to_string()),
        other => CliError::Usage(other.to_string()),
    })?;
    let eigenvalues = match trunc {
        None => spec.eigenvalues.clone(),
        Some("2x") => {
            let mut v = fock::eigenvalues_at(&params, 2 * spec.truncation_dim)
                .map_err(numerical)?;
            v.truncate(cfg.j_max);
            v
        }
        Some(other) => return Err(CliError::Usage(format!("unsupported --trunc {other}"))),
    };
    let mut rows = vec![vec!["j".to_string(), "eigenvalue".to_string()]];
    for (j, e) in eigenvalues.iter().enumerate() {
        rows.push(vec![j.to_string(), canon_f64(*e)]);
    }
    write_atomic(&dir.join("spectrum.csv"), emit_csv(&rows).as_bytes())?;
    let json = Json::obj(vec![
        ("g", Json::Num(cfg.g)),
        ("delta", Json::Num(cfg.delta)),
        ("eps", Json::Num(cfg.eps)),
        ("tol", Json::Num(cfg.tol)),
        ("truncation_dim", Json::Int(spec.truncation_dim as i64)),
        ("converged_count", Json::Int(spec.converged_count as i64)),
        ("eigenvalues", Json::arr_f64(&eigenvalues)),
    ]);
    write_atomic(&dir.join("spectrum.json"), json.emit().as_bytes())
}

fn resolve_grid(cfg: &RunConfig) -> Vec<f64> {
    if !cfg.grid.is_empty() {
        return cfg.grid.clone();
    }
    let n = cfg.steps.max(1);
    (0..=n)
        .map(|i| cfg.g_min + (cfg.g_max - cfg.g_min) * i as f64 / n as f64)
        .collect()
}

/// `curves`: g-sweep of the g²-shifted spectrum, CSV/JSON and optional SVG
/// with the N ± ε baselines dashed.
pub fn cmd_curves(cfg: &RunConfig, svg: bool) -> Result<(), CliError> {
    let dir = prepare_out(cfg)?;
    let grid = resolve_grid(cfg);
    let table = fock::curve_table(cfg.delta, cfg.eps, &grid, cfg.j_max, cfg.tol)
        .map_err(numerical)?;
    let mut header = vec!["g".to_string()];
    for j in 0..cfg.j_max {
        header.push(format!("E{j}"));
    }
    let mut rows = vec![header];
    for (g, levels) in table.g_grid.iter().zip(&table.shifted_levels) {
        let mut row = vec![canon_f64(*g)];
        row.extend(levels.iter().map(|v| canon_f64(*v)));
        rows.push(row);
    }
    write_atomic(&dir.join("curves.csv"), emit_csv(&rows).as_bytes())?;
    let json = Json::obj(vec![
        ("delta", Json::Num(cfg.delta)),
        ("eps", Json::Num(cfg.eps)),
        ("g_grid", Json::arr_f64(&table.g_grid)),
        (
            "shifted_levels",
            Json::Arr(table.shifted_levels.iter().map(|r| Json::arr_f64(r)).collect()),
        ),
    ]);
    write_atomic(&dir.join("curves.json"), json.emit().as_bytes())?;
    if svg {
        let series: Vec<Vec<f64>> = (0..cfg.j_max)
            .map(|j| table.shifted_levels.iter().map(|r| r[j]).collect())
            .collect();
        let top = series
            .iter()
            .flat_map(|s| s.iter().copied())
            .fold(f64::NEG_INFINITY, f64::max);
        let mut baselines = Vec::new();
        let mut n = 0.0f64;
        while n - cfg.eps.abs() <= top + 0.5 {
            baselines.push(n + cfg.eps);
            if cfg.eps != 0.0 {
                baselines.push(n - cfg.eps);
            }
            n += 1.0;
        }
        let plot = CurvePlot {
            x: &table.g_grid,
            series: &series,
            baselines: &baselines,
            x_label: "g",
            y_label: "E + g^2",
            title: &format!("spectral curves, delta={} eps={}", cfg.delta, cfg.eps),
        };
        write_atomic(&dir.join("curves.svg"), plot.render().as_bytes())?;
    }
    Ok(())
}

/// `partition`: the explicit series at each requested β.
pub fn cmd_partition(cfg: &RunConfig) -> Result<(), CliError> {
    let dir = prepare_out(cfg)?;
    let params = params_of(cfg)?;
    let series = series_of(cfg)?;
    let mut entries = Vec::new();
    for &beta in &cfg.beta {
        let z = partition::partition_full(&params, beta, &series).map_err(numerical)?;
        entries.push(Json::obj(vec![
            ("beta", Json::Num(beta)),
            ("value", Json::Num(z.value)),
            ("per_lambda_terms", Json::arr_f64(&z.per_lambda_terms)),
            ("stat_err", Json::Num(z.stat_err)),
            ("trunc_err", Json::Num(z.trunc_err)),
            ("truncation_warning", Json::Bool(z.truncation_warning)),
        ]));
    }
    let json = Json::obj(vec![
        ("g", Json::Num(cfg.g)),
        ("delta", Json::Num(cfg.delta)),
        ("eps", Json::Num(cfg.eps)),
        ("results", Json::Arr(entries)),
    ]);
    write_atomic(&dir.join("partition.json"), json.emit().as_bytes())
}

/// `zeta`: one or both routes; with `--route both` the run fails (exit 2)
/// unless the routes overlap within their combined brackets.
pub fn cmd_zeta(cfg: &RunConfig, route: &str) -> Result<(), CliError> {
    let dir = prepare_out(cfg)?;
    let params = params_of(cfg)?;
    let s = Complex64::new(cfg.s_re, cfg.s_im);
    let tau = cfg.tau.unwrap_or_else(|| zeta::default_tau(&params));
    let mut pairs = vec![
        ("g", Json::Num(cfg.g)),
        ("delta", Json::Num(cfg.delta)),
        ("eps", Json::Num(cfg.eps)),
        ("s_re", Json::Num(cfg.s_re)),
        ("s_im", Json::Num(cfg.s_im)),
        ("tau", Json::Num(tau)),
    ];
    let series = series_of(cfg)?;
    let quad = MellinSettings::default();
    let run = |method: zeta::ZetaMethod| -> Result<ZetaResult, CliError> {
        let query = zeta::ZetaQuery { s, tau, method };
        zeta::spectral_zeta(&params, &query, &series, &quad, cfg.j_cut).map_err(numerical)
    };
    let mut eigen = None;
    let mut mellin = None;
    if route == "eigen" || route == "both" {
        let r = run(zeta::ZetaMethod::EigenSum)?;
        pairs.push(("eigen", zeta_result_json(&r)));
        eigen = Some(r);
    }
    if route == "mellin" || route == "both" {
        let r = run(zeta::ZetaMethod::Mellin)?;
        pairs.push(("mellin", zeta_result_json(&r)));
        mellin = Some(r);
    }
    if route != "eigen" && route != "mellin" && route != "both" {
        return Err(CliError::Usage(format!("unknown route {route}")));
    }
    let mut agree = true;
    if let (Some(e), Some(m)) = (&eigen, &mellin) {
        let diff = (e.value - m.value).norm();
        agree = diff <= e.err_bracket + m.err_bracket;
        pairs.push(("routes_agree", Json::Bool(agree)));
        pairs.push(("route_difference", Json::Num(diff)));
    }
    write_atomic(&dir.join("zeta.json"), Json::obj(pairs).emit().as_bytes())?;
    if !agree {
        return Err(CliError::Assertion(
            "eigen and mellin routes disagree beyond combined brackets".into(),
        ));
    }
    Ok(())
}

fn limit_scenario(cfg: &RunConfig, scenario: &str) -> Result<Vec<zeta::LimitReport>, CliError> {
    let s = Complex64::new(cfg.s_re, cfg.s_im);
    let series = series_of(cfg)?;
    let reports = match scenario {
        "g0" => {
            let grid = if cfg.grid.is_empty() { vec![0.1, 0.01] } else { cfg.grid.clone() };
            vec![zeta::zeta_limit_g0(cfg.delta, cfg.eps, s, &grid, &series).map_err(numerical)?]
        }
        "ginf" => {
            let grid = if cfg.grid.is_empty() { vec![1.0, 2.0, 4.0, 8.0] } else { cfg.grid.clone() };
            vec![zeta::zeta_limit_g_inf(cfg.delta, cfg.eps, s, &grid, cfg.j_cut)
                .map_err(numerical)?]
        }
        "delta0" => {
            let grid = if cfg.grid.is_empty() { vec![0.1, 0.01] } else { cfg.grid.clone() };
            vec![zeta::zeta_limit_delta0(cfg.g, cfg.eps, s, &grid, &series).map_err(numerical)?]
        }
        "parity_g0" => {
            let grid = if cfg.grid.is_empty() { vec![0.1, 0.01] } else { cfg.grid.clone() };
            let mut out = Vec::new();
            for sector in [Parity::Plus, Parity::Minus] {
                out.push(
                    zeta::parity_limit_report(sector, cfg.delta, s, false, &grid, cfg.j_cut)
                        .map_err(numerical)?,
                );
            }
            out
        }
        "parity_ginf" => {
            let grid = if cfg.grid.is_empty() { vec![1.0, 2.0, 4.0, 8.0] } else { cfg.grid.clone() };
            let mut out = Vec::new();
            for sector in [Parity::Plus, Parity::Minus] {
                out.push(
                    zeta::parity_limit_report(sector, cfg.delta, s, true, &grid, cfg.j_cut)
                        .map_err(numerical)?,
                );
            }
            out
        }
        other => return Err(CliError::Usage(format!("unknown limit scenario {other}"))),
    };
    Ok(reports)
}

/// `limits`: one of the closed-form limit scenarios; exits 2 when any
/// distance fails to shrink toward the target.
pub fn cmd_limits(cfg: &RunConfig, scenario: &str) -> Result<(), CliError> {
    let dir = prepare_out(cfg)?;
    if scenario == "jc" {
        return cmd_limits_jc(cfg, &dir);
    }
    let reports = limit_scenario(cfg, scenario)?;
    let json = Json::obj(vec![(
        "reports",
        Json::Arr(reports.iter().map(|r| r.to_json()).collect()),
    )]);
    write_atomic(
        &dir.join(format!("limits_{scenario}.json")),
        json.emit().as_bytes(),
    )?;
    if reports.iter().any(|r| !r.pass) {
        return Err(CliError::Assertion(format!(
            "limit scenario {scenario} did not approach its target"
        )));
    }
    Ok(())
}

fn cmd_limits_jc(cfg: &RunConfig, dir: &Path) -> Result<(), CliError> {
    let s = Complex64::new(cfg.s_re, cfg.s_im);
    let tau = cfg.tau.unwrap_or(1.0);
    let n_cut = 200_000;
    let small_g = zeta::jc_zeta(1e-4, cfg.delta, s, tau, n_cut).map_err(numerical)?;
    let g0_target = zeta::jc_g0_closed(cfg.delta, s, tau).map_err(numerical)?;
    let rel_g0 = (small_g.value - g0_target).norm() / g0_target.norm();
    let small_d = zeta::jc_zeta(cfg.g, 1e-4, s, tau, n_cut).map_err(numerical)?;
    let d0_target = zeta::jc_delta0_reference(cfg.g, s, tau, n_cut).map_err(numerical)?;
    let rel_d0 = (small_d.value - d0_target.value).norm() / d0_target.value.norm();
    let pass = rel_g0 <= 1e-5 && rel_d0 <= 1e-5;
    let json = Json::obj(vec![
        ("tau", Json::Num(tau)),
        ("s_re", Json::Num(cfg.s_re)),
        ("g0_value", Json::Num(small_g.value.re)),
        ("g0_target", Json::Num(g0_target.re)),
        ("g0_rel_err", Json::Num(rel_g0)),
        ("delta0_value", Json::Num(small_d.value.re)),
        ("delta0_target", Json::Num(d0_target.value.re)),
        ("delta0_rel_err", Json::Num(rel_d0)),
        ("pass", Json::Bool(pass)),
    ]);
    write_atomic(&dir.join("limits_jc.json"), json.emit().as_bytes())?;
    if !pass {
        return Err(CliError::Assertion("jc limit displays not reproduced".into()));
    }
    Ok(())
}

/// `rb`: Rabi–Bernoulli polynomials, symbolic table and numeric extraction.
pub fn cmd_rb(cfg: &RunConfig, kmax: usize) -> Result<(), CliError> {
    let dir = prepare_out(cfg)?;
    if !(1..=5).contains(&kmax) {
        return Err(CliError::Usage("rb needs --kmax in 1..=5".into()));
    }
    let params = ModelParams::new(cfg.g, cfg.delta, 0.0).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut entries = Vec::new();
    let mut all_match = true;
    for k in 1..=kmax {
        let numeric = zeta::rb_polynomial(k, &params).map_err(numerical)?;
        let mut pairs = vec![
            ("k", Json::Int(k as i64)),
            ("numeric", Json::Num(numeric)),
            ("special_value", Json::Num(-2.0 / k as f64 * numeric)),
        ];
        if k <= 3 {
            let sym = zeta::rb_symbolic(k);
            let value = sym.eval(params.g, params.delta);
            let matched = (numeric - value).abs() <= 1e-6;
            all_match &= matched;
            pairs.push(("symbolic", Json::Num(value)));
            pairs.push(("matches_symbolic", Json::Bool(matched)));
            pairs.push((
                "coefficients",
                Json::Arr(
                    sym.coeffs
                        .iter()
                        .map(|(i, j, c)| {
                            Json::obj(vec![
                                ("g2_pow", Json::Int(*i as i64)),
                                ("delta2_pow", Json::Int(*j as i64)),
                                ("coeff", Json::Str(c.to_string())),
                            ])
                        })
                        .collect(),
                ),
            ));
        }
        entries.push(Json::obj(pairs));
    }
    let json = Json::obj(vec![
        ("g", Json::Num(params.g)),
        ("delta", Json::Num(params.delta)),
        ("table", Json::Arr(entries)),
    ]);
    write_atomic(&dir.join("rb.json"), json.emit().as_bytes())?;
    if !all_match {
        return Err(CliError::Assertion(
            "numeric Rabi-Bernoulli extraction disagrees with the symbolic table".into(),
        ));
    }
    Ok(())
}

/// `heatkernel`: the λ = 0 trace identity at the given time.
pub fn cmd_heatkernel(cfg: &RunConfig, t: f64, order: usize) -> Result<(), CliError> {
    let dir = prepare_out(cfg)?;
    if !(t > 0.0) {
        return Err(CliError::Usage("heatkernel needs --t > 0".into()));
    }
    let params = params_of(cfg)?;
    let quadrature = partition::heat_trace_quadrature(&params, t, order).map_err(numerical)?;
    let closed = partition::heat_trace_closed_form(params.eps, t);
    let rel = (quadrature - closed).abs() / closed.abs();
    let json = Json::obj(vec![
        ("g", Json::Num(params.g)),
        ("eps", Json::Num(params.eps)),
        ("t", Json::Num(t)),
        ("order", Json::Int(order as i64)),
        ("quadrature", Json::Num(quadrature)),
        ("closed_form", Json::Num(closed)),
        ("rel_err", Json::Num(rel)),
        ("pass", Json::Bool(rel <= 1e-8)),
    ]);
    write_atomic(&dir.join("heatkernel.json"), json.emit().as_bytes())?;
    if rel > 1e-8 {
        return Err(CliError::Assertion(format!(
            "heat-kernel trace identity violated: rel err {rel:.3e}"
        )));
    }
    Ok(())
}

/// `jzeta`: the Jaynes–Cummings zeta with its tail bracket.
pub fn cmd_jzeta(cfg: &RunConfig, n_cut: usize) -> Result<(), CliError> {
    let dir = prepare_out(cfg)?;
    let s = Complex64::new(cfg.s_re, cfg.s_im);
    let tau = cfg.tau.unwrap_or(1.0);
    let r = zeta::jc_zeta(cfg.g, cfg.delta, s, tau, n_cut).map_err(numerical)?;
    let json = Json::obj(vec![
        ("g", Json::Num(cfg.g)),
        ("delta", Json::Num(cfg.delta)),
        ("s_re", Json::Num(cfg.s_re)),
        ("s_im", Json::Num(cfg.s_im)),
        ("tau", Json::Num(tau)),
        ("result", zeta_result_json(&r)),
    ]);
    write_atomic(&dir.join("jzeta.json"), json.emit().as_bytes())
}
