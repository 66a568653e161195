use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;

use pf_core::coefficients::CoefficientReport;
use pf_core::fiber::{assemble, fit_slope, ground_state, pull_through_check, self_energy_scan};
use pf_core::fock::{build_grid, TruncatedFockSpace};
use pf_core::identities::{
    all_passed, default_fields, render_table, spinor_samples, verify_orthogonality_suite,
    verify_scaling_suite, Expectation, IdentityReport, Status,
};
use pf_core::output::{binding_csv, format_f64, scan_csv, CsvTable};
use pf_core::trial::binding_sweep;

use crate::config::{Format, RunConfig};
use crate::{CliError, TOOL, VERSION};

pub const SELF_ENERGY_ALPHAS: [f64; 3] = [0.002, 0.005, 0.01];
pub const BINDING_ALPHAS: [f64; 4] = [0.0025, 0.005, 0.01, 0.02];
pub const PULLTHROUGH_ALPHAS: [f64; 2] = [0.01, 0.05];

/// Largest allowed spread `max c / min c` of the pull-through constant.
pub const PULLTHROUGH_SPREAD: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lemmas,
    Scaling,
    PullThrough,
}

impl Suite {
    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Lemmas => "lemmas",
            Suite::Scaling => "scaling",
            Suite::PullThrough => "pullthrough",
        }
    }
}

/// Rendered output of one command.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub text: String,
    /// False when a verification failed (exit 1).
    pub passed: bool,
    /// Human-readable summary for the terminal.
    pub summary: Option<String>,
}

fn header(command: &str, cfg: &RunConfig) -> Vec<String> {
    vec![
        format!("{TOOL} {VERSION}"),
        format!("command: {command}"),
        format!("config_sha256: {}", cfg.hash()),
    ]
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'a str,
    version: &'a str,
    command: &'a str,
    config_sha256: String,
    config: &'a RunConfig,
    result: T,
}

fn json<T: Serialize>(command: &str, cfg: &RunConfig, result: T) -> String {
    let env = Envelope {
        tool: TOOL,
        version: VERSION,
        command,
        config_sha256: cfg.hash(),
        config: cfg,
        result,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("result serializes");
    s.push('\n');
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn comment_block(lines: &[String]) -> String {
    lines.iter().map(|l| format!("# {l}\n")).collect()
}

pub fn coeffs(cfg: &RunConfig) -> Result<Artifact, CliError> {
    let cutoff = cfg.validate()?;
    let report = CoefficientReport::compute(&cutoff, &cfg.quadrature)?;
    let text = match cfg.output.format {
        Format::Json => json("coeffs", cfg, &report),
        Format::Csv => {
            let mut lines = header("coeffs", cfg);
            lines.push(format!("cutoff: {}", cutoff.label()));
            let mut s = comment_block(&lines);
            s.push_str("name,value,error,method\n");
            for e in report.entries() {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    e.name,
                    format_f64(e.value),
                    format_f64(e.error),
                    csv_field(&e.method)
                );
            }
            s
        }
    };
    Ok(Artifact {
        text,
        passed: true,
        summary: None,
    })
}

pub fn self_energy(cfg: &RunConfig) -> Result<Artifact, CliError> {
    let cutoff = cfg.validate()?;
    let alphas = cfg.alphas_or(&SELF_ENERGY_ALPHAS);
    let table = self_energy_scan(
        &cutoff,
        &alphas,
        &cfg.grid.spec(),
        cfg.grid.max_photons,
        &cfg.solver,
        &cfg.quadrature,
    )?;
    if let Some(r) = table.rows.iter().find(|r| !r.converged) {
        return Err(CliError::Numerical(format!(
            "eigensolver did not converge at alpha {} (residual {:e})",
            r.alpha, r.residual
        )));
    }
    let fit = if alphas.len() >= 2 {
        Some(fit_slope(&alphas, &table.energies(), 1)?)
    } else {
        None
    };
    let text = match cfg.output.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                scan: &'a pf_core::fiber::ScanTable,
                slope_fit: Option<&'a pf_core::fiber::SlopeFit>,
            }
            json(
                "self-energy",
                cfg,
                Out {
                    scan: &table,
                    slope_fit: fit.as_ref(),
                },
            )
        }
        Format::Csv => {
            let mut c: CsvTable = scan_csv(&table);
            c.comments = header("self-energy", cfg);
            let (e1, e2) = table.discrete_coefficients;
            c.comments.extend([
                format!("cutoff: {}", cutoff.label()),
                format!(
                    "max_photons: {} dimension: {}",
                    table.max_photons, table.dimension
                ),
                format!(
                    "gamma1_star_sq: {}",
                    format_f64(table.coefficients.gamma1_star_sq)
                ),
                format!(
                    "second_order: {}",
                    format_f64(table.coefficients.second_order())
                ),
                format!(
                    "discrete_e1: {} discrete_e2: {}",
                    format_f64(e1),
                    format_f64(e2)
                ),
                format!(
                    "discarded_constant: {}",
                    format_f64(table.discarded_constant)
                ),
            ]);
            if let Some(f) = &fit {
                c.comments.push(format!(
                    "fitted_slope: {} standard_error: {}",
                    format_f64(f.slope()),
                    format_f64(f.slope_error())
                ));
            }
            c.render()
        }
    };
    Ok(Artifact {
        text,
        passed: true,
        summary: None,
    })
}

pub fn binding(cfg: &RunConfig) -> Result<Artifact, CliError> {
    let cutoff = cfg.validate()?;
    let alphas = cfg.alphas_or(&BINDING_ALPHAS);
    let reports = binding_sweep(&cutoff, &alphas, &cfg.quadrature)?;
    let text = match cfg.output.format {
        Format::Json => json("binding", cfg, &reports),
        Format::Csv => {
            let mut c = binding_csv(&reports);
            c.comments = header("binding", cfg);
            c.comments.push(format!("cutoff: {}", cutoff.label()));
            c.render()
        }
    };
    Ok(Artifact {
        text,
        passed: true,
        summary: None,
    })
}

fn identity_csv(lines: Vec<String>, reports: &[IdentityReport]) -> String {
    let mut s = comment_block(&lines);
    s.push_str("family,name,parameters,value,reference_scale,tolerance,expectation,status\n");
    for r in reports {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            csv_field(&r.family),
            csv_field(&r.name),
            csv_field(&r.parameters),
            format_f64(r.value),
            format_f64(r.reference_scale),
            format_f64(r.tolerance),
            expectation_tag(r.expectation),
            status_tag(r.status)
        );
    }
    s
}

fn expectation_tag(e: Expectation) -> &'static str {
    match e {
        Expectation::Vanishes => "vanishes",
        Expectation::NonZero => "nonzero",
        Expectation::Equal => "equal",
    }
}

fn status_tag(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Inconclusive => "inconclusive",
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PullThroughRow {
    pub alpha: f64,
    pub constant: f64,
    pub outside_support: f64,
    pub nf_over_alpha: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PullThroughSummary {
    pub rows: Vec<PullThroughRow>,
    /// `max c / min c` over the couplings.
    pub spread: f64,
    pub allowed_spread: f64,
    pub passed: bool,
}

fn pull_through_suite(cfg: &RunConfig) -> Result<PullThroughSummary, CliError> {
    let cutoff = cfg.validate()?;
    let alphas = cfg.alphas_or(&PULLTHROUGH_ALPHAS);
    if alphas.len() < 2 {
        return Err(CliError::Config(
            "pull-through suite needs at least two couplings".into(),
        ));
    }
    let space = Arc::new(TruncatedFockSpace::new(
        build_grid(&cfg.grid.spec(), &cutoff)?,
        cfg.grid.max_photons,
    )?);
    let mut rows = vec![];
    for &alpha in &alphas {
        let op = assemble([0.0; 3], alpha, space.clone(), &cutoff)?;
        let gs = ground_state(&op, &cfg.solver)?.require_converged()?;
        let pt = pull_through_check(&gs.state, alpha, &cutoff)?;
        rows.push(PullThroughRow {
            alpha,
            constant: pt.constant,
            outside_support: pt.outside_support,
            nf_over_alpha: gs.state.number_expectation()? / alpha,
            residual: gs.residual,
        });
    }
    let max = rows.iter().map(|r| r.constant).fold(f64::MIN, f64::max);
    let min = rows.iter().map(|r| r.constant).fold(f64::MAX, f64::min);
    let spread = max / min;
    let passed =
        min > 0.0 && spread <= PULLTHROUGH_SPREAD && rows.iter().all(|r| r.outside_support == 0.0);
    Ok(PullThroughSummary {
        rows,
        spread,
        allowed_spread: PULLTHROUGH_SPREAD,
        passed,
    })
}

pub fn verify(cfg: &RunConfig, suite: Suite) -> Result<Artifact, CliError> {
    let cutoff = cfg.validate()?;
    let command = format!("verify {}", suite.as_str());
    let seed = cfg.quadrature.mc_seed;
    let id = &cfg.identities;
    let reports = match suite {
        Suite::Lemmas => verify_orthogonality_suite(
            &cutoff,
            &cfg.quadrature,
            &spinor_samples(id.samples, seed),
            id.tol,
            id.ir_alpha,
        )?,
        Suite::Scaling => verify_scaling_suite(
            &cutoff,
            &cfg.quadrature,
            &default_fields(seed),
            id.tol,
            seed,
        )?,
        Suite::PullThrough => {
            let s = pull_through_suite(cfg)?;
            let mut summary = String::new();
            for r in &s.rows {
                let _ = writeln!(summary, "alpha {:<8} c {:.6}", r.alpha, r.constant);
            }
            let _ = writeln!(
                summary,
                "spread {:.4} (allowed {}): {}",
                s.spread,
                s.allowed_spread,
                if s.passed { "PASS" } else { "FAIL" }
            );
            let text = match cfg.output.format {
                Format::Json => json(&command, cfg, &s),
                Format::Csv => {
                    let mut c = CsvTable::new(&[
                        "alpha",
                        "constant",
                        "outside_support",
                        "nf_over_alpha",
                        "residual",
                    ]);
                    c.comments = header(&command, cfg);
                    c.comments.push(format!("cutoff: {}", cutoff.label()));
                    c.comments.push(format!(
                        "spread: {} allowed: {} status: {}",
                        format_f64(s.spread),
                        format_f64(s.allowed_spread),
                        if s.passed { "pass" } else { "fail" }
                    ));
                    for r in &s.rows {
                        c.push(vec![
                            r.alpha,
                            r.constant,
                            r.outside_support,
                            r.nf_over_alpha,
                            r.residual,
                        ])?;
                    }
                    c.render()
                }
            };
            return Ok(Artifact {
                text,
                passed: s.passed,
                summary: Some(summary),
            });
        }
    };
    let passed = all_passed(&reports);
    let text = match cfg.output.format {
        Format::Json => json(&command, cfg, &reports),
        Format::Csv => {
            let mut lines = header(&command, cfg);
            lines.push(format!("cutoff: {}", cutoff.label()));
            identity_csv(lines, &reports)
        }
    };
    let failed = reports.iter().filter(|r| !r.passed()).count();
    let mut summary = render_table(&reports);
    let _ = writeln!(summary, "{} checks, {failed} not passed", reports.len());
    Ok(Artifact {
        text,
        passed,
        summary: Some(summary),
    })
}
