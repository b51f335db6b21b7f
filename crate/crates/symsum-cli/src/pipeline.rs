//! Table construction, caching, file emission and the verification suites
//! behind the subcommands.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::json;

use symsum::asymptotics::{
    attach_constant, convergence_report, dyadic_checkpoints, weighted_sum, write_sum_csv,
    AsymptoticReport, ConvergenceDiagnostics,
};
use symsum::dirichlet::{quotient_series, verify_factorization, Side};
use symsum::error::Error;
use symsum::lattice::{verify_r6_identity_with, weight_tables_with, write_weights_csv};
use symsum::lvalues::{
    beta_l_chi, beta_l_chi_terms, constant_c, h_value, sympow_l, twisted_h_value, LValueEstimate,
    Twist,
};
use symsum::modform::{
    delta_qexpansion_with, divisor_function, first_oracle_mismatch, normalize, read_tau_cache,
    verify_hecke_relations, write_tau_cache, write_tau_csv, ExpansionOptions, HeckeEigenform,
};
use symsum::sympow::{satake_angles, sympow_table, verify_square_identity, write_sympow_csv,
    SatakeAngles, SymPowTable};
use symsum::Limits;

use crate::config::RunConfig;

pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    fn runtime(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::ResourceCap { .. } => 3,
            Error::InvalidArgument(_)
            | Error::NonInvertible(_)
            | Error::OutOfDomain(_)
            | Error::CacheMismatch { .. } => 2,
            Error::Io { .. } | Error::NumericIntegrity(_) | Error::Integrity(_) => 1,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

pub struct Outcome {
    pub verification_ok: bool,
}

const OK: Outcome = Outcome {
    verification_ok: true,
};

fn ensure_out_dir(cfg: &RunConfig) -> Result<(), CliError> {
    fs::create_dir_all(&cfg.output_dir)
        .map_err(|e| CliError::usage(format!("cannot create {}: {e}", cfg.output_dir.display())))
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Writes `# generated <unix seconds>` then the deterministic body, so
/// reruns differ only in that one header line.
fn write_stamped(path: &Path, body: &[u8]) -> Result<(), CliError> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    writeln!(w, "# generated {}", unix_now()).map_err(|e| Error::io(path, e))?;
    w.write_all(body).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// tau table for n <= bound, reusing the binary cache in the output
/// directory when its header matches; recomputes (and rewrites) otherwise.
fn build_form(cfg: &RunConfig, bound: u64) -> Result<HeckeEigenform, CliError> {
    let path = cfg.output_dir.join(format!("tau_{bound}.bin"));
    if path.exists() {
        if let Ok(series) = read_tau_cache(&path) {
            if series.bound() as u64 == bound {
                return Ok(normalize(series)?);
            }
        }
    }
    let opts = ExpansionOptions {
        limits: Limits::default(),
        threads: cfg.resolved_threads(),
    };
    let series = delta_qexpansion_with(bound as usize, &opts)?;
    ensure_out_dir(cfg)?;
    write_tau_cache(&path, &series)?;
    Ok(normalize(series)?)
}

pub fn cmd_tau(cfg: &RunConfig, n: u64, json: bool) -> Result<Outcome, CliError> {
    ensure_out_dir(cfg)?;
    let started = Instant::now();
    let form = build_form(cfg, n)?;
    let mut body = Vec::new();
    write_tau_csv(&form, &mut body).map_err(|e| CliError::runtime(e.to_string()))?;
    let csv_path = cfg.output_dir.join(format!("tau_{n}.csv"));
    write_stamped(&csv_path, &body)?;
    let cache_path = cfg.output_dir.join(format!("tau_{n}.bin"));
    if json {
        println!(
            "{}",
            json!({"n": n, "csv": csv_path, "cache": cache_path, "seconds": started.elapsed().as_secs_f64()})
        );
    } else {
        println!(
            "tau table for n <= {n}: {} and {} ({:.2?})",
            csv_path.display(),
            cache_path.display(),
            started.elapsed()
        );
    }
    Ok(OK)
}

pub fn cmd_sympow(cfg: &RunConfig, j: u32, n: u64, json: bool) -> Result<Outcome, CliError> {
    ensure_out_dir(cfg)?;
    let form = build_form(cfg, n)?;
    let angles = satake_angles(&form, n as usize)?;
    let table = sympow_table(j, n as usize, &angles)?;
    let mut body = Vec::new();
    write_sympow_csv(&table, &mut body).map_err(|e| CliError::runtime(e.to_string()))?;
    let path = cfg.output_dir.join(format!("sympow_j{j}_{n}.csv"));
    write_stamped(&path, &body)?;
    if json {
        println!("{}", json!({"j": j, "n": n, "csv": path}));
    } else {
        println!("sym^{j} table for n <= {n}: {}", path.display());
    }
    Ok(OK)
}

pub fn cmd_r6(cfg: &RunConfig, n: u64, json: bool) -> Result<Outcome, CliError> {
    ensure_out_dir(cfg)?;
    let tables = weight_tables_with(n as usize, &Limits::default())?;
    let mut body = Vec::new();
    write_weights_csv(&tables, &mut body).map_err(|e| CliError::runtime(e.to_string()))?;
    let path = cfg.output_dir.join(format!("r6_{n}.csv"));
    write_stamped(&path, &body)?;
    if json {
        println!("{}", json!({"n": n, "csv": path}));
    } else {
        println!("r6/l/v table for n <= {n}: {}", path.display());
    }
    Ok(OK)
}

#[derive(Serialize)]
struct CheckOutcome {
    name: String,
    passed: bool,
    detail: serde_json::Value,
}

#[derive(Serialize)]
struct VerifyReport {
    suites: Vec<String>,
    passed: bool,
    checks: Vec<CheckOutcome>,
}

fn push_check(
    checks: &mut Vec<CheckOutcome>,
    json_mode: bool,
    name: &str,
    passed: bool,
    detail: serde_json::Value,
) {
    if !json_mode {
        println!("[{}] {name}: {detail}", if passed { "PASS" } else { "FAIL" });
    }
    checks.push(CheckOutcome {
        name: name.to_string(),
        passed,
        detail,
    });
}

pub fn cmd_verify(cfg: &RunConfig, suites: &[&str], json: bool) -> Result<Outcome, CliError> {
    ensure_out_dir(cfg)?;
    let tol = cfg.tolerances();
    let limits = Limits::default();
    let mut checks: Vec<CheckOutcome> = Vec::new();
    let n_exact = cfg.n_exact as usize;

    for &suite in suites {
        match suite {
            "hecke" => {
                let form = build_form(cfg, cfg.n_exact)?;
                let oracle_bound = n_exact.min(2000);
                let mismatch = first_oracle_mismatch(&form, oracle_bound, &limits)?;
                push_check(
                    &mut checks,
                    json,
                    "tau-recurrence-oracle",
                    mismatch.is_none(),
                    json!({"bound": oracle_bound, "first_mismatch": mismatch}),
                );
                let report = verify_hecke_relations(&form, n_exact)?;
                push_check(
                    &mut checks,
                    json,
                    "hecke-relations",
                    report.passed(),
                    serde_json::to_value(&report).unwrap(),
                );
                let d = divisor_function(n_exact);
                let worst = (1..=n_exact)
                    .map(|n| form.lambda(n).abs() - d[n])
                    .fold(f64::NEG_INFINITY, f64::max);
                push_check(
                    &mut checks,
                    json,
                    "deligne-bound",
                    worst <= tol.deligne_slack,
                    json!({"max_excess": worst, "slack": tol.deligne_slack}),
                );
            }
            "r6" => {
                let report = verify_r6_identity_with(n_exact, &limits)?;
                push_check(
                    &mut checks,
                    json,
                    "r6-identity",
                    report.passed(),
                    serde_json::to_value(&report).unwrap(),
                );
            }
            "factorization" => {
                let j = cfg.j.max(2);
                let form = build_form(cfg, cfg.n_exact)?;
                let angles = satake_angles(&form, n_exact)?;
                let weights = weight_tables_with(n_exact, &limits)?;
                let tables: Vec<SymPowTable> = (1..=2 * j)
                    .map(|deg| sympow_table(deg, n_exact, &angles))
                    .collect::<Result<_, _>>()?;
                let even: Vec<&SymPowTable> =
                    (1..=j).map(|l| &tables[(2 * l - 1) as usize - 1]).collect();
                let sym_j = &tables[j as usize - 1];
                for side in [Side::Plain, Side::Twisted] {
                    let report = verify_factorization(
                        j,
                        n_exact,
                        side,
                        sym_j,
                        &even,
                        &weights,
                        tol.factorization_rel,
                    )?;
                    push_check(
                        &mut checks,
                        json,
                        &format!("factorization-{side:?}").to_lowercase(),
                        report.passed,
                        serde_json::to_value(&report).unwrap(),
                    );
                }
                for jj in (1..=j.min(4)).rev().take(3) {
                    let sq = verify_square_identity(&form, jj, n_exact.min(1000), &tol)?;
                    push_check(
                        &mut checks,
                        json,
                        &format!("square-identity-j{jj}"),
                        sq.passed,
                        serde_json::to_value(&sq).unwrap(),
                    );
                }
            }
            "lvalues" => {
                let p = cfg.prime_cutoff;
                let bound = p.max(cfg.n_exact);
                let form = build_form(cfg, bound)?;
                let angles = satake_angles(&form, bound as usize)?;
                let beta = beta_l_chi(3.0)?;
                let closed = std::f64::consts::PI.powi(3) / 32.0;
                push_check(
                    &mut checks,
                    json,
                    "beta-at-3-closed-form",
                    (beta.value - closed).abs() <= 1e-12,
                    json!({"value": beta.value, "target": closed}),
                );
                let coarse = beta_l_chi_terms(3.0, 10_000)?;
                let fine = beta_l_chi_terms(3.0, 100_000)?;
                push_check(
                    &mut checks,
                    json,
                    "beta-refinement",
                    (fine.value - coarse.value).abs() <= coarse.tail_bound.unwrap(),
                    json!({"moved": (fine.value - coarse.value).abs(), "tail": coarse.tail_bound}),
                );
                let s_coarse = sympow_l(2, 3.0, Twist::Chi, p / 10, &angles)?;
                let s_fine = sympow_l(2, 3.0, Twist::Chi, p, &angles)?;
                push_check(
                    &mut checks,
                    json,
                    "sym-l-refinement",
                    (s_fine.value - s_coarse.value).abs() <= s_coarse.tail_bound.unwrap(),
                    json!({"moved": (s_fine.value - s_coarse.value).abs(), "tail": s_coarse.tail_bound}),
                );
                let j = cfg.j.max(2);
                for twisted in [false, true] {
                    let run = |cut: u64| -> Result<LValueEstimate, Error> {
                        if twisted {
                            twisted_h_value(j, cut, &angles)
                        } else {
                            h_value(j, cut, &angles)
                        }
                    };
                    let coarse = run(p / 10)?;
                    let fine = run(p)?;
                    push_check(
                        &mut checks,
                        json,
                        if twisted {
                            "h-twisted-refinement"
                        } else {
                            "h-refinement"
                        },
                        (fine.value - coarse.value).abs() <= coarse.tail_bound.unwrap(),
                        json!({"moved": (fine.value - coarse.value).abs(), "tail": coarse.tail_bound}),
                    );
                }
                // Euler-product H against the re-summed division coefficients
                let weights = weight_tables_with(n_exact, &limits)?;
                let tables: Vec<SymPowTable> = (1..=2 * j)
                    .map(|deg| sympow_table(deg, n_exact, &angles))
                    .collect::<Result<_, _>>()?;
                let even: Vec<&SymPowTable> =
                    (1..=j).map(|l| &tables[(2 * l - 1) as usize - 1]).collect();
                let sym_j = &tables[j as usize - 1];
                let h_series =
                    quotient_series(j, n_exact, Side::Plain, sym_j, &even, &weights)?;
                let resummed: f64 = (1..=n_exact)
                    .map(|n| h_series.coeff(n) / (n as f64).powi(3))
                    .sum();
                let euler = h_value(j, p, &angles)?;
                let growth = (1..=n_exact)
                    .map(|n| h_series.coeff(n).abs() / ((n as f64) * (n as f64)))
                    .fold(0.0, f64::max);
                // squarefull coefficients beyond the division bound, plus the
                // Euler tail
                let budget =
                    euler.tail_bound.unwrap() + growth * 3.0 / (n_exact as f64).sqrt();
                push_check(
                    &mut checks,
                    json,
                    "h-vs-dirichlet",
                    (euler.value - resummed).abs() <= budget,
                    json!({"euler": euler.value, "resummed": resummed, "budget": budget}),
                );
            }
            other => return Err(CliError::usage(format!("unknown suite `{other}`"))),
        }
    }

    let passed = checks.iter().all(|c| c.passed);
    let report = VerifyReport {
        suites: suites.iter().map(|s| s.to_string()).collect(),
        passed,
        checks,
    };
    let path = cfg.output_dir.join(format!(
        "verify_{}.json",
        suites.join("-")
    ));
    fs::write(&path, serde_json::to_string_pretty(&report).unwrap())
        .map_err(|e| Error::io(&path, e))?;
    if json {
        println!("{}", serde_json::to_string(&report).unwrap());
    } else {
        println!(
            "verification {}: report at {}",
            if passed { "passed" } else { "FAILED" },
            path.display()
        );
    }
    Ok(Outcome {
        verification_ok: passed,
    })
}

pub enum LvalueRequest {
    Beta { s: f64 },
    Sym { m: u32, s: f64, twist: bool },
    H { twisted: bool },
}

pub fn cmd_lvalue(cfg: &RunConfig, req: LvalueRequest, json: bool) -> Result<Outcome, CliError> {
    let (label, est) = match req {
        LvalueRequest::Beta { s } => (format!("L({s},chi)"), beta_l_chi(s)?),
        LvalueRequest::Sym { m, s, twist } => {
            let angles = angles_to(cfg, cfg.prime_cutoff)?;
            let t = if twist { Twist::Chi } else { Twist::Plain };
            let label = if twist {
                format!("L({s},sym^{m}f x chi)")
            } else {
                format!("L({s},sym^{m}f)")
            };
            (label, sympow_l(m, s, t, cfg.prime_cutoff, &angles)?)
        }
        LvalueRequest::H { twisted } => {
            let angles = angles_to(cfg, cfg.prime_cutoff)?;
            let label = if twisted {
                format!("H~_{}(3)", cfg.j)
            } else {
                format!("H_{}(3)", cfg.j)
            };
            let est = if twisted {
                twisted_h_value(cfg.j.max(2), cfg.prime_cutoff, &angles)?
            } else {
                h_value(cfg.j.max(2), cfg.prime_cutoff, &angles)?
            };
            (label, est)
        }
    };
    if json {
        println!(
            "{}",
            json!({"label": label, "estimate": serde_json::to_value(&est).unwrap()})
        );
    } else {
        println!(
            "{label} = {:.15} ({:?}, cutoff {}, tail {:?})",
            est.value, est.rigor, est.prime_cutoff, est.tail_bound
        );
    }
    Ok(OK)
}

fn angles_to(cfg: &RunConfig, bound: u64) -> Result<SatakeAngles, CliError> {
    let form = build_form(cfg, bound)?;
    Ok(satake_angles(&form, bound as usize)?)
}

pub fn cmd_constant(cfg: &RunConfig, j: u32, p: u64, json: bool) -> Result<Outcome, CliError> {
    ensure_out_dir(cfg)?;
    let angles = angles_to(cfg, p)?;
    let c = constant_c(j, p, &angles)?;
    let path = cfg.output_dir.join(format!("constant_j{j}_P{p}.json"));
    fs::write(&path, serde_json::to_string_pretty(&c).unwrap())
        .map_err(|e| Error::io(&path, e))?;
    if json {
        println!("{}", serde_json::to_string(&c).unwrap());
    } else {
        println!("c({j}) = {:.10e} [{:?}], factors:", c.value, c.rigor);
        for f in &c.factors {
            println!(
                "  {} = {:.15} (cutoff {}, tail {:?})",
                f.label, f.value, f.cutoff, f.tail_bound
            );
        }
        println!("written to {}", path.display());
    }
    Ok(OK)
}

#[derive(Serialize, Deserialize)]
struct SumArtifact {
    report: AsymptoticReport,
    diagnostics: Option<ConvergenceDiagnostics>,
}

pub fn cmd_sum(
    cfg: &RunConfig,
    j: u32,
    x: u64,
    checkpoints: Option<Vec<u64>>,
    json: bool,
) -> Result<Outcome, CliError> {
    // caps are checked before any long computation starts
    let limits = Limits::default();
    if x > limits.qexpansion_max || x > limits.weight_sieve_max {
        return Err(Error::ResourceCap {
            what: "sum bound",
            requested: x,
            cap: limits.qexpansion_max.min(limits.weight_sieve_max),
        }
        .into());
    }
    if j == 0 {
        return Err(CliError::usage("degree must be >= 1"));
    }
    ensure_out_dir(cfg)?;
    let started = Instant::now();
    let table_bound = x.max(if j >= 2 { cfg.prime_cutoff } else { 0 });
    let form = build_form(cfg, table_bound)?;
    let angles = satake_angles(&form, table_bound as usize)?;
    let sym = sympow_table(j, x as usize, &angles)?;
    let weights = weight_tables_with(x as usize, &limits)?;
    let cps = checkpoints.unwrap_or_else(|| dyadic_checkpoints(x));
    let threads = cfg.resolved_threads();
    let mut report = weighted_sum(&sym, &weights, x, &cps, threads)?;

    let diagnostics = if j >= 2 {
        let c = constant_c(j, cfg.prime_cutoff, &angles)?;
        attach_constant(&mut report, c);
        if report.checkpoints.len() >= 4 {
            Some(convergence_report(&report)?)
        } else {
            None
        }
    } else {
        None
    };

    let mut body = Vec::new();
    write_sum_csv(&report, &mut body).map_err(|e| CliError::runtime(e.to_string()))?;
    let csv_path = cfg.output_dir.join(format!("sum_j{j}_x{x}.csv"));
    write_stamped(&csv_path, &body)?;
    let artifact = SumArtifact {
        report,
        diagnostics,
    };
    let json_path = cfg.output_dir.join(format!("sum_j{j}_x{x}.json"));
    fs::write(&json_path, serde_json::to_string_pretty(&artifact).unwrap())
        .map_err(|e| Error::io(&json_path, e))?;
    // the effective configuration, so the run is reproducible from its outputs
    let cfg_path = cfg.output_dir.join(format!("sum_j{j}_x{x}.config"));
    fs::write(&cfg_path, cfg.print()).map_err(|e| Error::io(&cfg_path, e))?;

    if json {
        println!("{}", serde_json::to_string(&artifact).unwrap());
    } else {
        let last = artifact.report.final_checkpoint();
        println!(
            "S_{j}({x}) = {:.10e}, ratio S/x^3 = {:.10e} ({:.2?})",
            last.s,
            last.ratio,
            started.elapsed()
        );
        if let Some(d) = &artifact.diagnostics {
            print_diagnostics(d);
        }
        println!("written to {} and {}", csv_path.display(), json_path.display());
    }
    Ok(OK)
}

fn print_diagnostics(d: &ConvergenceDiagnostics) {
    println!(
        "c({}) = {:.10e}; ratio/c relative gap = {:.3e}",
        d.j, d.c_value, d.ratio_vs_c_rel
    );
    println!(
        "last dyadic windows: variation {:.3e} (previous {:.3e}); decomposition max rel {:.3e}",
        d.last_window_variation, d.previous_window_variation, d.decomposition_max_rel
    );
    match d.fitted_slope {
        Some(fit) => println!(
            "residual slope {:.4} +- {:.4} over {} points (reference exponent {:.4}){}",
            fit.slope,
            fit.std_err,
            fit.points_used,
            d.reference_exponent,
            if d.slope_exceeds_cubic {
                "  ** exceeds 3 **"
            } else {
                ""
            }
        ),
        None => println!(
            "residuals below noise; reference exponent {:.4}",
            d.reference_exponent
        ),
    }
}

pub fn cmd_report(sum_path: &Path, json: bool) -> Result<Outcome, CliError> {
    let text = fs::read_to_string(sum_path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", sum_path.display())))?;
    let artifact: SumArtifact = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("bad sum artifact: {e}")))?;
    let diagnostics = match artifact.diagnostics {
        Some(d) => d,
        None => convergence_report(&artifact.report)?,
    };
    if json {
        println!("{}", serde_json::to_string(&diagnostics).unwrap());
    } else {
        print_diagnostics(&diagnostics);
    }
    Ok(OK)
}
