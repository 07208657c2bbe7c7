//! Subcommand definitions and their output. `main` only prints what
//! [`run`] returns.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pathsym_core::metrology::{self, phase_grid};
use pathsym_core::simulate::{self, TrialConfig, TrialSuite};
use pathsym_core::symmetry::{check_symmetry_counting, check_symmetry_internal};
use pathsym_core::{Basis, MultiSectorState};
use serde::Serialize;
use serde_json::json;

use crate::config::Settings;
use crate::error::CliError;
use crate::headline;
use crate::output::{fmt_num, key_values, table, to_json};
use crate::parallel;
use crate::spec::StateSpec;

#[derive(Debug, Parser)]
#[command(name = "pathsym", version, about = "Phase sensitivity and photon-counting optimality of two-mode interferometer states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Common {
    /// key = value settings file; flags override it
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Largest probability mass dropped when truncating input modes
    #[arg(long, value_name = "EPS")]
    pub eps_trunc: Option<f64>,
    /// Photon-number cutoff limit per input mode
    #[arg(long, value_name = "N")]
    pub n_max_cap: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct StateArg {
    /// noon:N=4 | twin:n=2 | cs:alpha=2,r=1 | pairs:r=1.5 | numcoh:n=1,alpha=2 | file:PATH
    #[arg(long, value_name = "SPEC")]
    pub state: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quantum Fisher information per photon-number sector and in total
    Qfi {
        #[command(flatten)]
        state: StateArg,
        #[command(flatten)]
        common: Common,
    },
    /// Photon-counting Fisher information over a phase range (CSV by default)
    Cfi {
        #[command(flatten)]
        state: StateArg,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phi_start: f64,
        #[arg(long, default_value_t = std::f64::consts::TAU, allow_negative_numbers = true)]
        phi_end: f64,
        /// Number of equal steps; both ends are included
        #[arg(long, default_value_t = 64)]
        steps: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Optimal counting estimator at one bias phase, per sector
    Estimator {
        #[command(flatten)]
        state: StateArg,
        #[arg(long, allow_negative_numbers = true)]
        phi: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Path-symmetry verdict per sector
    Symmetry {
        #[command(flatten)]
        state: StateArg,
        /// Residual below which a sector counts as symmetric
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Sensitivity against the <N^2> limit, with a CFI flatness scan
    Report {
        #[command(flatten)]
        state: StateArg,
        /// Phases in the CFI scan over [0, 2pi)
        #[arg(long, default_value_t = 64)]
        phases: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Best coherent/squeezed intensity ratio at fixed mean photon number
    OptimizeQ {
        #[arg(long)]
        nbar: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Monte-Carlo photon counting with maximum-likelihood estimation
    Simulate {
        #[command(flatten)]
        state: StateArg,
        #[arg(long, allow_negative_numbers = true)]
        phi: f64,
        /// Detection events per trial
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        /// Width of the likelihood search interval around --phi
        #[arg(long)]
        window: Option<f64>,
        /// Likelihood grid points
        #[arg(long, default_value_t = 201)]
        grid: usize,
        /// Print per-trial estimates and seeds in text mode
        #[arg(long)]
        verbose: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Headline numbers with pass/fail; exits 1 if any row fails
    PaperReport {
        /// Same as --format json
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        common: Common,
    },
}

/// Text for stdout and the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { stdout, exit_code: 0 }
    }
}

impl Common {
    fn settings(&self) -> Result<Settings, CliError> {
        let mut s = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        if let Some(eps) = self.eps_trunc {
            s.set("eps_trunc", &eps.to_string()).map_err(CliError::Usage)?;
        }
        if let Some(cap) = self.n_max_cap {
            s.set("n_max_cap", &cap.to_string()).map_err(CliError::Usage)?;
        }
        Ok(s)
    }

    /// The requested format, `default` if none; `allowed` lists what the
    /// command can produce.
    fn format(&self, default: Format, allowed: &[Format]) -> Result<Format, CliError> {
        let f = self.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(CliError::Usage(format!("this command does not support --format {f:?}").to_lowercase()))
        }
    }
}

fn load(state: &StateArg, settings: &Settings) -> Result<(StateSpec, MultiSectorState), CliError> {
    let spec: StateSpec = state.state.parse()?;
    let built = spec.build(settings)?;
    Ok((spec, built))
}

fn basis_name(b: Basis) -> &'static str {
    match b {
        Basis::InternalJ3 => "j3",
        Basis::CountingJ1 => "j1",
    }
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Qfi { state, common } => qfi(&state, &common),
        Command::Cfi {
            state,
            phi_start,
            phi_end,
            steps,
            common,
        } => cfi(&state, phi_start, phi_end, steps, &common),
        Command::Estimator { state, phi, common } => estimator(&state, phi, &common),
        Command::Symmetry { state, tol, common } => symmetry(&state, tol, &common),
        Command::Report { state, phases, common } => report(&state, phases, &common),
        Command::OptimizeQ { nbar, common } => optimize_q(nbar, &common),
        Command::Simulate {
            state,
            phi,
            samples,
            trials,
            seed,
            window,
            grid,
            verbose,
            common,
        } => {
            let config = TrialConfig {
                phi_true: phi,
                samples,
                trials,
                seed,
                window: window.unwrap_or(f64::NAN),
                grid_points: grid,
            };
            simulate_cmd(&state, config, window.is_none(), verbose, &common)
        }
        Command::PaperReport { json, common } => paper_report(json, &common),
    }
}

#[derive(Serialize)]
struct SectorQfi {
    #[serde(rename = "N")]
    n: u32,
    weight: f64,
    qfi: f64,
}

fn qfi(state: &StateArg, common: &Common) -> Result<Outcome, CliError> {
    let format = common.format(Format::Text, &[Format::Text, Format::Json])?;
    let settings = common.settings()?;
    let (spec, built) = load(state, &settings)?;
    let r = metrology::report(&built, &[], settings.eps_trunc)?;
    let sectors: Vec<SectorQfi> = r
        .per_sector
        .iter()
        .map(|s| SectorQfi {
            n: s.n_photons,
            weight: s.weight,
            qfi: s.qfi,
        })
        .collect();
    Ok(Outcome::ok(match format {
        Format::Json => to_json(&json!({
            "state": spec.to_string(),
            "qfi": r.total_qfi,
            "remainder": r.remainder,
            "sectors": sectors,
        })),
        _ => {
            let mut out = key_values(&[
                ("state", spec.to_string()),
                ("qfi", fmt_num(r.total_qfi)),
                ("remainder", fmt_num(r.remainder)),
            ]);
            if sectors.len() > 1 {
                out.push('\n');
                let rows: Vec<Vec<String>> = sectors
                    .iter()
                    .map(|s| vec![s.n.to_string(), fmt_num(s.weight), fmt_num(s.qfi)])
                    .collect();
                out += &table(&["N", "weight", "qfi"], &rows);
            }
            out
        }
    }))
}

fn cfi(state: &StateArg, start: f64, end: f64, steps: usize, common: &Common) -> Result<Outcome, CliError> {
    let format = common.format(Format::Csv, &[Format::Csv, Format::Json, Format::Text])?;
    if !(start.is_finite() && end.is_finite()) {
        return Err(CliError::Usage("phase range must be finite".into()));
    }
    let settings = common.settings()?;
    let (spec, built) = load(state, &settings)?;
    let points = parallel::cfi_scan(&built, &parallel::linspace(start, end, steps));
    Ok(Outcome::ok(match format {
        Format::Json => to_json(&json!({ "state": spec.to_string(), "points": points })),
        Format::Csv => {
            let mut out = String::from("phi,cfi,qfi,gap\n");
            for p in &points {
                out += &format!("{},{},{},{}\n", fmt_num(p.phi), fmt_num(p.cfi), fmt_num(p.qfi), fmt_num(p.gap));
            }
            out
        }
        Format::Text => {
            let rows: Vec<Vec<String>> = points
                .iter()
                .map(|p| vec![fmt_num(p.phi), fmt_num(p.cfi), fmt_num(p.qfi), fmt_num(p.gap)])
                .collect();
            table(&["phi", "cfi", "qfi", "gap"], &rows)
        }
    }))
}

#[derive(Serialize)]
struct SectorEstimator {
    #[serde(rename = "N")]
    n: u32,
    weight: f64,
    qfi: f64,
    achievable: bool,
    lambda: f64,
    /// `g_m`, the eigenvalues of `λ A`
    g: Vec<f64>,
    /// `A_m = g_m / λ`
    values: Vec<f64>,
    probabilities: Vec<f64>,
    imag_residual: f64,
    max_imag_ratio: f64,
    excluded: Vec<usize>,
    unachievable: Vec<usize>,
    variance: Option<f64>,
    robustness: Option<f64>,
    note: Option<String>,
}

fn estimator(state: &StateArg, phi: f64, common: &Common) -> Result<Outcome, CliError> {
    let format = common.format(Format::Text, &[Format::Text, Format::Json])?;
    let settings = common.settings()?;
    let (spec, built) = load(state, &settings)?;
    let mut sectors = Vec::new();
    let mut failure = None;
    metrology::for_each_probe(&built, |ws, probe| {
        if failure.is_some() {
            return;
        }
        if probe.qfi() <= 0.0 {
            sectors.push(SectorEstimator {
                n: ws.n_photons(),
                weight: ws.weight,
                qfi: 0.0,
                achievable: false,
                lambda: 0.0,
                g: Vec::new(),
                values: Vec::new(),
                probabilities: probe.probabilities(phi),
                imag_residual: 0.0,
                max_imag_ratio: 0.0,
                excluded: Vec::new(),
                unachievable: Vec::new(),
                variance: None,
                robustness: None,
                note: Some("no phase sensitivity in this sector".into()),
            });
            return;
        }
        match probe.optimal_estimator(phi, settings.estimator_tol) {
            Ok(t) => {
                let achievable = t.achievable();
                let robustness = probe.robustness(phi).ok().map(|r| r.value);
                let note = (!t.unachievable.is_empty()).then(|| {
                    format!(
                        "outcomes {:?} have zero probability but respond to the phase; no finite estimator value saturates the bound here",
                        t.unachievable
                    )
                });
                sectors.push(SectorEstimator {
                    n: ws.n_photons(),
                    weight: ws.weight,
                    qfi: probe.qfi(),
                    achievable,
                    lambda: t.lambda,
                    values: t.values(),
                    variance: achievable.then(|| t.variance()),
                    g: t.g,
                    probabilities: t.probabilities,
                    imag_residual: t.imag_residual,
                    max_imag_ratio: t.max_imag_ratio,
                    excluded: t.excluded,
                    unachievable: t.unachievable,
                    robustness,
                    note,
                });
            }
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e.into());
    }
    let all = sectors.iter().filter(|s| s.qfi > 0.0).all(|s| s.achievable);
    Ok(Outcome::ok(match format {
        Format::Json => to_json(&json!({
            "state": spec.to_string(),
            "phi": phi,
            "achievable": all,
            "sectors": sectors,
        })),
        _ => {
            let mut out = key_values(&[
                ("state", spec.to_string()),
                ("phi", fmt_num(phi)),
                ("achievable", all.to_string()),
            ]);
            for s in &sectors {
                out.push('\n');
                out += &key_values(&[
                    ("N", s.n.to_string()),
                    ("weight", fmt_num(s.weight)),
                    ("qfi", fmt_num(s.qfi)),
                    ("achievable", s.achievable.to_string()),
                    ("imag_residual", fmt_num(s.imag_residual)),
                    ("variance", s.variance.map_or("-".into(), fmt_num)),
                    ("robustness", s.robustness.map_or("-".into(), fmt_num)),
                ]);
                if !s.values.is_empty() {
                    let rows: Vec<Vec<String>> = s
                        .values
                        .iter()
                        .zip(&s.probabilities)
                        .enumerate()
                        .map(|(k, (a, p))| vec![k.to_string(), fmt_num(*p), fmt_num(*a)])
                        .collect();
                    out += &table(&["k", "p", "A"], &rows);
                }
            }
            out
        }
    }))
}

#[derive(Serialize)]
struct SectorSymmetry {
    #[serde(rename = "N")]
    n: u32,
    weight: f64,
    symmetric: bool,
    chi0: Option<f64>,
    residual: f64,
    basis_used: &'static str,
    ambiguous: bool,
}

fn symmetry(state: &StateArg, tol: Option<f64>, common: &Common) -> Result<Outcome, CliError> {
    let format = common.format(Format::Text, &[Format::Text, Format::Json])?;
    let settings = common.settings()?;
    let tol = tol.unwrap_or(settings.symmetry_tol);
    if !(tol > 0.0) {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let (spec, built) = load(state, &settings)?;
    let mut sectors = Vec::new();
    for ws in built.sectors() {
        let r = match ws.state.basis() {
            Basis::CountingJ1 => check_symmetry_counting(&ws.state, tol)?,
            Basis::InternalJ3 => check_symmetry_internal(&ws.state, tol)?,
        };
        sectors.push(SectorSymmetry {
            n: ws.n_photons(),
            weight: ws.weight,
            symmetric: r.symmetric,
            chi0: r.chi0,
            residual: r.residual,
            basis_used: basis_name(r.basis_used),
            ambiguous: r.ambiguous,
        });
    }
    let all = sectors.iter().all(|s| s.symmetric);
    Ok(Outcome::ok(match format {
        Format::Json => to_json(&json!({
            "state": spec.to_string(),
            "tol": tol,
            "symmetric": all,
            "sectors": sectors,
        })),
        _ => {
            let mut out = key_values(&[("state", spec.to_string()), ("symmetric", all.to_string())]);
            out.push('\n');
            let rows: Vec<Vec<String>> = sectors
                .iter()
                .map(|s| {
                    vec![
                        s.n.to_string(),
                        fmt_num(s.weight),
                        s.symmetric.to_string(),
                        s.chi0.map_or("-".into(), fmt_num),
                        fmt_num(s.residual),
                        s.basis_used.into(),
                    ]
                })
                .collect();
            out + &table(&["N", "weight", "symmetric", "chi0", "residual", "basis"], &rows)
        }
    }))
}

fn report(state: &StateArg, phases: usize, common: &Common) -> Result<Outcome, CliError> {
    let format = common.format(Format::Text, &[Format::Text, Format::Json])?;
    let settings = common.settings()?;
    let (spec, built) = load(state, &settings)?;
    let r = metrology::report(&built, &[], settings.eps_trunc)?;
    let scan = parallel::cfi_scan(&built, &phase_grid(phases));
    let (lo, hi) = scan
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.cfi), hi.max(p.cfi)));
    let flatness = if scan.is_empty() || hi <= 0.0 { 0.0 } else { (hi - lo) / hi };
    let min_cfi = if scan.is_empty() { r.total_qfi } else { lo };
    let sectors: Vec<SectorQfi> = r
        .per_sector
        .iter()
        .map(|s| SectorQfi {
            n: s.n_photons,
            weight: s.weight,
            qfi: s.qfi,
        })
        .collect();
    Ok(Outcome::ok(match format {
        Format::Json => to_json(&json!({
            "state": spec.to_string(),
            "total_qfi": r.total_qfi,
            "heisenberg_limit": r.heisenberg_limit,
            "ratio": r.ratio,
            "mean_n": r.mean_n,
            "remainder": r.remainder,
            "min_cfi": min_cfi,
            "cfi_flatness": flatness,
            "sectors": sectors,
            "cfi_scan": scan.iter().map(|p| json!({"phi": p.phi, "cfi": p.cfi})).collect::<Vec<_>>(),
        })),
        _ => key_values(&[
            ("state", spec.to_string()),
            ("total_qfi", fmt_num(r.total_qfi)),
            ("heisenberg_limit", fmt_num(r.heisenberg_limit)),
            ("ratio", fmt_num(r.ratio)),
            ("mean_n", fmt_num(r.mean_n)),
            ("remainder", fmt_num(r.remainder)),
            ("sectors", sectors.len().to_string()),
            ("min_cfi", fmt_num(min_cfi)),
            ("cfi_flatness", fmt_num(flatness)),
        ]),
    }))
}

fn optimize_q(nbar: f64, common: &Common) -> Result<Outcome, CliError> {
    let format = common.format(Format::Text, &[Format::Text, Format::Json])?;
    let opt = metrology::optimize_q(nbar)?;
    let equal = metrology::ratio_at_q(1.0, nbar)?;
    Ok(Outcome::ok(match format {
        Format::Json => to_json(&json!({
            "n_bar": nbar,
            "q": opt.q,
            "ratio": opt.ratio,
            "alpha": opt.alpha,
            "r": opt.r,
            "ratio_at_q1": equal,
        })),
        _ => key_values(&[
            ("n_bar", fmt_num(nbar)),
            ("q", fmt_num(opt.q)),
            ("ratio", fmt_num(opt.ratio)),
            ("alpha", fmt_num(opt.alpha)),
            ("r", fmt_num(opt.r)),
            ("ratio_at_q1", fmt_num(equal)),
        ]),
    }))
}

fn simulate_cmd(
    state: &StateArg,
    mut config: TrialConfig,
    auto_window: bool,
    verbose: bool,
    common: &Common,
) -> Result<Outcome, CliError> {
    let format = common.format(Format::Json, &[Format::Text, Format::Json])?;
    let settings = common.settings()?;
    let (spec, built) = load(state, &settings)?;
    if auto_window {
        config.window = simulate::default_window(&built, config.samples.max(1))?;
    }
    let suite = TrialSuite::new(&built, config)?;
    let s = parallel::run_trials(&suite)?;
    Ok(Outcome::ok(match format {
        Format::Json => to_json(&json!({
            "state": spec.to_string(),
            "phi_true": s.phi_true,
            "samples": s.samples,
            "trials": s.trials,
            "master_seed": s.master_seed,
            "window": config.window,
            "grid_points": config.grid_points,
            "qfi": s.qfi,
            "crb": s.crb,
            "mse": s.mse,
            "bias": s.bias,
            "empirical_variance": s.empirical_variance,
            "ratio": s.ratio,
            "estimates": s.estimates,
            "trial_seeds": s.trial_seeds,
        })),
        _ => {
            let mut out = key_values(&[
                ("state", spec.to_string()),
                ("phi_true", fmt_num(s.phi_true)),
                ("samples", s.samples.to_string()),
                ("trials", s.trials.to_string()),
                ("master_seed", s.master_seed.to_string()),
                ("window", fmt_num(config.window)),
                ("qfi", fmt_num(s.qfi)),
                ("crb", fmt_num(s.crb)),
                ("mse", fmt_num(s.mse)),
                ("bias", fmt_num(s.bias)),
                ("ratio", fmt_num(s.ratio)),
            ]);
            if verbose {
                out.push('\n');
                let rows: Vec<Vec<String>> = s
                    .estimates
                    .iter()
                    .zip(&s.trial_seeds)
                    .enumerate()
                    .map(|(i, (e, seed))| vec![i.to_string(), seed.to_string(), fmt_num(*e)])
                    .collect();
                out += &table(&["trial", "seed", "estimate"], &rows);
            }
            out
        }
    }))
}

fn paper_report(json_flag: bool, common: &Common) -> Result<Outcome, CliError> {
    let format = if json_flag {
        Format::Json
    } else {
        common.format(Format::Text, &[Format::Text, Format::Json])?
    };
    let settings = common.settings()?;
    let rows = headline::rows(&settings)?;
    let failed = rows.iter().filter(|r| !r.pass).count();
    let stdout = match format {
        Format::Json => to_json(&rows),
        _ => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.id.to_string(),
                        fmt_num(r.value),
                        fmt_num(r.target),
                        fmt_num(r.tolerance),
                        if r.pass { "PASS" } else { "FAIL" }.to_string(),
                        r.claim.to_string(),
                    ]
                })
                .collect();
            table(&["row", "value", "target", "tolerance", "result", "claim"], &cells)
        }
    };
    Ok(Outcome {
        stdout,
        exit_code: if failed == 0 { 0 } else { 1 },
    })
}
