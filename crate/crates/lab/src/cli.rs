//! Command line surface: `parisi`, `graph`, `cut`, `sk`, `exp`.
//!
//! Every command prints a single JSON object on stdout; experiment commands
//! additionally append JSONL records and rewrite the derived CSV summary
//! when `--out` is given. Exit codes: 0 success, 2 usage error, 1 runtime
//! failure.

use crate::experiments::{
    self, parse_constraint, parse_objective, parse_solver, Ensemble, FeModel, FreeEnergyParams,
    InterpFdParams, InterpTrendParams, SbmParams, ScalingParams, SurgeryParams,
};
use crate::gformat::{read_graph, write_graph};
use crate::persist::{append_jsonl, read_jsonl, write_summary};
use crate::records::ExperimentRecord;
use anyhow::{Context, Result};
use clap::builder::PossibleValuesParser;
use clap::{Parser, Subcommand};
use glasscut_core::cuts::{exact_extremal, local_search, spectral_bounds, Constraint, SolverKind};
use glasscut_core::graphs::{
    gen_er_gnm, gen_poisson_cloning, gen_poissonized, gen_regular, gen_sbm, MultiGraph,
};
use glasscut_core::parisi::{
    estimate_pstar, minimize_parisi, parisi_functional, FitKind, Method, MinimizeOpts, PdeGrid,
    PstarOpts, RecursionOpts, RsbProfile,
};
use glasscut_core::rng::Stream;
use glasscut_core::sk::GroundMethod;
use serde_json::json;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

/// Marker for errors that should exit with the usage code (2) instead of
/// the runtime code (1).
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

#[derive(Parser, Debug)]
#[command(name = "glasscut", version, about = "Extremal cuts of sparse graphs and the Parisi constant")]
pub struct Cli {
    /// key=value file supplying defaults for the invoked subcommand's long
    /// flags; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Parisi functional: evaluate, minimize, extrapolate the constant.
    #[command(subcommand)]
    Parisi(ParisiCmd),
    /// Random multigraph generation in the shared text format.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Extremal cut solvers over graphs in the text format.
    #[command(subcommand)]
    Cut(CutCmd),
    /// Sherrington-Kirkpatrick ground states and free energies.
    #[command(subcommand)]
    Sk(SkCmd),
    /// Replicated experiments with JSONL records and CSV summaries.
    #[command(subcommand)]
    Exp(ExpCmd),
}

#[derive(Subcommand, Debug)]
pub enum ParisiCmd {
    /// Evaluate the functional at an explicit step profile.
    Eval {
        /// Number of steps in the profile.
        #[arg(long)]
        k: usize,
        /// Breaks 0 = q_0 < ... < q_k = 1, comma separated (k + 1 entries).
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<f64>,
        /// Plateau values m_1 <= ... <= m_k in [0, beta] (k entries).
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<f64>,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value = "recursion", value_parser = PossibleValuesParser::new(["recursion", "pde"]))]
        method: String,
    },
    /// Minimize the functional over k-step profiles.
    Minimize {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Minimize along a beta ladder and extrapolate to beta = infinity.
    Pstar {
        /// Increasing ladder, at least three entries.
        #[arg(long, value_delimiter = ',', required = true)]
        betas: Vec<f64>,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value = "affine", value_parser = PossibleValuesParser::new(["affine", "quadratic"]))]
        fit: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum GraphCmd {
    /// Sample a graph and print it in the text format.
    Gen {
        #[arg(long, value_parser = PossibleValuesParser::new(["er", "pois", "reg", "cloning", "sbm"]))]
        model: String,
        #[arg(long)]
        n: usize,
        /// Edge density (er, pois), degree (reg), or clone rate (cloning).
        #[arg(long)]
        gamma: Option<f64>,
        /// Exact edge count for the er model; overrides --gamma.
        #[arg(long)]
        m: Option<u64>,
        /// Within-class mean degree parameter for sbm.
        #[arg(long)]
        a: Option<f64>,
        /// Across-class mean degree parameter for sbm.
        #[arg(long)]
        b: Option<f64>,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum CutCmd {
    /// Solve one extremal cut problem on a graph file ("-" for stdin).
    Solve {
        #[arg(long, value_name = "FILE")]
        r#in: String,
        #[arg(long, value_parser = PossibleValuesParser::new(["min", "max"]))]
        objective: String,
        #[arg(long, value_parser = PossibleValuesParser::new(["bisection", "free"]))]
        constraint: String,
        #[arg(long, value_parser = PossibleValuesParser::new(["exact", "local", "spectral"]))]
        solver: String,
        /// Required for the stochastic solvers (local, spectral).
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Subcommand, Debug)]
pub enum SkCmd {
    /// Ground-state energy of one Gaussian coupling sample.
    Ground {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_parser = PossibleValuesParser::new(["bisection", "free"]))]
        constraint: String,
        #[arg(long, default_value = "exact", value_parser = PossibleValuesParser::new(["exact", "local"]))]
        method: String,
    },
    /// Balanced free-energy density, averaged over disorder samples.
    FreeEnergy {
        #[arg(long, value_parser = PossibleValuesParser::new(["sk", "dilute", "interp"]))]
        model: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Closed-form interpolation derivative against a coupled centered
    /// finite difference.
    InterpCheck {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 0.05)]
        dt: f64,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum ExpCmd {
    /// Extremal cut scaling against the P* prediction.
    Scaling {
        #[arg(long, value_parser = PossibleValuesParser::new(["er", "regular"]))]
        ensemble: String,
        #[arg(long, value_delimiter = ',', required = true)]
        gammas: Vec<f64>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        replicas: usize,
        #[arg(long, value_parser = PossibleValuesParser::new(["exact", "local", "spectral"]))]
        solver: String,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Min-bisection hypothesis test on paired null/planted samples.
    Sbm {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        replicas: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Dilute-vs-SK free energy gap trend across gamma.
    Interp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        beta: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        gammas: Vec<f64>,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Half-edge surgery Monte Carlo against exact finite-n expectations.
    Surgery {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        gamma: u32,
        #[arg(long)]
        replicas: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Recompute records from their seeds and compare bitwise.
    Replay {
        #[arg(long, value_name = "FILE")]
        r#in: PathBuf,
        /// 1-indexed record to replay; all records when omitted.
        #[arg(long)]
        line: Option<usize>,
    },
}

fn print_json(v: &serde_json::Value) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    out.write_all(b"\n")?;
    Ok(())
}

fn persist(out: Option<&Path>, records: &[ExperimentRecord]) -> Result<()> {
    if let Some(path) = out {
        append_jsonl(path, records)?;
        let csv = write_summary(path)?;
        eprintln!("wrote {} records to {} (summary: {})", records.len(), path.display(), csv.display());
    }
    Ok(())
}

fn profile_json(p: &RsbProfile) -> serde_json::Value {
    json!({
        "beta": p.beta(),
        "k": p.k(),
        "breaks": p.breaks(),
        "values": p.values(),
    })
}

fn run_parisi(cmd: ParisiCmd) -> Result<()> {
    match cmd {
        ParisiCmd::Eval { k, q, m, beta, method } => {
            if q.len() != k + 1 || m.len() != k {
                return Err(usage(format!(
                    "profile shape mismatch: k = {k} needs {} breaks and {k} values, got {} and {}",
                    k + 1,
                    q.len(),
                    m.len()
                )));
            }
            let profile = RsbProfile::new(beta, q, m).map_err(|e| usage(format!("{e:?}")))?;
            let started = std::time::Instant::now();
            let (value, diagnostics) = match method.as_str() {
                "recursion" => {
                    let opts = RecursionOpts::default_for(beta);
                    let v = parisi_functional(&profile, &Method::Recursion(opts.clone()))
                        .map_err(|e| anyhow::anyhow!("{e:?}"))?;
                    (v, json!({"method": "recursion", "quad_nodes": opts.quad_nodes, "dy": opts.dy}))
                }
                _ => {
                    let grid = PdeGrid::default_for(beta);
                    let v = parisi_functional(&profile, &Method::Pde(grid.clone()))
                        .map_err(|e| anyhow::anyhow!("{e:?}"))?;
                    (
                        v,
                        json!({"method": "pde", "half_width": grid.half_width, "dy": grid.dy, "dq": grid.dq}),
                    )
                }
            };
            let mut diagnostics = diagnostics;
            diagnostics["elapsed_ms"] = json!(started.elapsed().as_millis() as u64);
            print_json(&json!({"value": value, "profile": profile_json(&profile), "diagnostics": diagnostics}))
        }
        ParisiCmd::Minimize { k, beta, restarts, seed } => {
            if !(beta > 0.0) || !beta.is_finite() {
                return Err(usage(format!("beta must be positive and finite, got {beta}")));
            }
            if k == 0 || k > 6 {
                return Err(usage(format!("k must lie in 1..=6, got {k}")));
            }
            let opts = MinimizeOpts { restarts, ..MinimizeOpts::default_for(beta, seed) };
            let started = std::time::Instant::now();
            let r = minimize_parisi(beta, k, &opts).map_err(|e| anyhow::anyhow!("{e:?}"))?;
            print_json(&json!({
                "value": r.value,
                "profile": profile_json(&r.profile),
                "diagnostics": {
                    "evals": r.evals,
                    "converged": r.converged,
                    "restarts": restarts,
                    "seed": seed,
                    "elapsed_ms": started.elapsed().as_millis() as u64,
                },
            }))
        }
        ParisiCmd::Pstar { betas, k, fit, seed } => {
            if betas.len() < 3 || betas.windows(2).any(|w| !(w[0] < w[1])) || betas.iter().any(|&b| !(b > 0.0)) {
                return Err(usage("--betas needs at least three increasing positive entries"));
            }
            if k == 0 || k > 6 {
                return Err(usage(format!("k must lie in 1..=6, got {k}")));
            }
            let fit_kind = if fit == "affine" { FitKind::Affine } else { FitKind::Quadratic };
            let opts = PstarOpts { fit: fit_kind, ..PstarOpts::new(seed) };
            let started = std::time::Instant::now();
            let est = estimate_pstar(&betas, k, &opts).map_err(|e| anyhow::anyhow!("{e:?}"))?;
            print_json(&json!({
                "pstar": est.pstar,
                "betas": est.betas,
                "values": est.values,
                "profiles": est.profiles.iter().map(profile_json).collect::<Vec<_>>(),
                "fit": fit,
                "residual_rms": est.residual_rms,
                "diagnostics": {
                    "evals": est.evals,
                    "seed": seed,
                    "k": k,
                    "elapsed_ms": started.elapsed().as_millis() as u64,
                },
            }))
        }
    }
}

fn run_graph(cmd: GraphCmd) -> Result<()> {
    let GraphCmd::Gen { model, n, gamma, m, a, b, seed, out } = cmd;
    if n == 0 {
        return Err(usage("n must be positive"));
    }
    let mut rng = Stream::from_seed(seed);
    let need_gamma = || gamma.ok_or_else(|| usage(format!("model {model} needs --gamma")));
    let g: MultiGraph = match model.as_str() {
        "er" => {
            let m = match (m, gamma) {
                (Some(m), _) => m,
                (None, Some(g)) => (g * n as f64).round() as u64,
                (None, None) => return Err(usage("er needs --m or --gamma")),
            };
            gen_er_gnm(n, m, &mut rng)
        }
        "pois" => gen_poissonized(n, need_gamma()?, &mut rng),
        "reg" => {
            let gamma = need_gamma()?;
            if gamma <= 0.0 || gamma.fract() != 0.0 {
                return Err(usage(format!("reg needs a positive integer --gamma, got {gamma}")));
            }
            gen_regular(n, gamma as u32, &mut rng).map_err(|e| anyhow::anyhow!("{e:?}"))?
        }
        "cloning" => gen_poisson_cloning(n, need_gamma()?, &mut rng)
            .map_err(|e| anyhow::anyhow!("{e:?}"))?,
        _ => {
            let (a, b) = match (a, b) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(usage("sbm needs --a and --b")),
            };
            // The planted labels stay hidden: downstream consumers see only
            // the graph, as the hypothesis test requires.
            gen_sbm(n, a, b, &mut rng).map_err(|e| anyhow::anyhow!("{e:?}"))?.graph
        }
    };
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(&path).with_context(|| format!("create {}", path.display()))?);
            write_graph(&mut w, &g)?;
            w.flush()?;
            eprintln!("wrote {} vertices, {} edges to {}", g.n(), g.m_total(), path.display());
        }
        None => {
            let mut w = io::stdout().lock();
            write_graph(&mut w, &g)?;
        }
    }
    Ok(())
}

fn run_cut(cmd: CutCmd) -> Result<()> {
    let CutCmd::Solve { r#in, objective, constraint, solver, seed } = cmd;
    let objective = parse_objective(&objective)?;
    let constraint = parse_constraint(&constraint)?;
    let solver = parse_solver(&solver)?;
    if solver != SolverKind::Exact && seed.is_none() {
        return Err(usage("--seed is required for the local and spectral solvers"));
    }
    if solver == SolverKind::Spectral && constraint != Constraint::Bisection {
        return Err(usage("the spectral solver only bounds bisection problems"));
    }
    let g = if r#in == "-" {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text)?;
        read_graph(&mut text.as_bytes())?
    } else {
        let f = File::open(&r#in).with_context(|| format!("open {}", r#in))?;
        read_graph(&mut BufReader::new(f))?
    };
    let mut rng = Stream::from_seed(seed.unwrap_or(0));
    let started = std::time::Instant::now();
    let r = match solver {
        SolverKind::Exact => exact_extremal(&g, objective, constraint),
        SolverKind::Local => {
            local_search(&g, objective, constraint, &experiments::scaling_anneal_opts(g.n()), &mut rng)
        }
        SolverKind::Spectral => spectral_bounds(&g, objective, constraint, &mut rng),
    }
    .map_err(|e| anyhow::anyhow!("{e:?}"))?;
    print_json(&json!({
        "value": r.value,
        "config": r.config.as_ref().map(|c| c.spins().to_vec()),
        "objective": experiments::objective_label(r.objective),
        "constraint": experiments::constraint_label(r.constraint),
        "solver": experiments::solver_label(r.solver),
        "certificate": r.certificate.map(|(lo, hi)| json!([lo, hi])),
        "n": g.n(),
        "m_total": g.m_total(),
        "elapsed_ms": started.elapsed().as_millis() as u64,
    }))
}

fn run_sk(cmd: SkCmd) -> Result<()> {
    match cmd {
        SkCmd::Ground { n, seed, constraint, method } => {
            let constraint = parse_constraint(&constraint)?;
            let method = if method == "exact" { GroundMethod::Exact } else { GroundMethod::Local };
            let started = std::time::Instant::now();
            let (value, config) = experiments::sk_ground_sample(n, constraint, method, seed)?;
            print_json(&json!({
                "value": value,
                "normalized": value / n as f64,
                "config": config.spins(),
                "n": n,
                "seed": seed,
                "constraint": experiments::constraint_label(constraint),
                "method": if method == GroundMethod::Exact { "exact" } else { "local" },
                "elapsed_ms": started.elapsed().as_millis() as u64,
            }))
        }
        SkCmd::FreeEnergy { model, n, beta, gamma, t, samples, seed, out } => {
            let p = FreeEnergyParams {
                model: FeModel::parse(&model)?,
                n,
                beta,
                gamma,
                t,
                samples,
                seed,
            };
            let (records, summary) = experiments::run_free_energy(&p)?;
            persist(out.as_deref(), &records)?;
            print_json(&serde_json::to_value(&summary)?)
        }
        SkCmd::InterpCheck { n, beta, gamma, t, dt, samples, seed, out } => {
            let p = InterpFdParams { n, beta, gamma, t, dt, samples, seed };
            let (records, summary) = experiments::run_interp_fd(&p)?;
            persist(out.as_deref(), &records)?;
            print_json(&serde_json::to_value(&summary)?)
        }
    }
}

fn run_exp(cmd: ExpCmd) -> Result<()> {
    match cmd {
        ExpCmd::Scaling { ensemble, gammas, n, replicas, solver, seed, out } => {
            let p = ScalingParams {
                ensemble: Ensemble::parse(&ensemble)?,
                gammas,
                n,
                replicas,
                solver: parse_solver(&solver)?,
                seed,
            };
            let (records, summary) = experiments::run_scaling(&p)?;
            persist(out.as_deref(), &records)?;
            print_json(&serde_json::to_value(&summary)?)
        }
        ExpCmd::Sbm { n, a, b, epsilon, replicas, seed, out } => {
            let p = SbmParams { n, a, b, epsilon, replicas, seed };
            let (records, summary) = experiments::run_sbm_test(&p)?;
            persist(out.as_deref(), &records)?;
            print_json(&serde_json::to_value(&summary)?)
        }
        ExpCmd::Interp { n, beta, gammas, samples, seed, out } => {
            let p = InterpTrendParams { n, beta, gammas, samples, seed };
            let (records, summary) = experiments::run_interp_trend(&p)?;
            persist(out.as_deref(), &records)?;
            print_json(&serde_json::to_value(&summary)?)
        }
        ExpCmd::Surgery { n, gamma, replicas, seed, out } => {
            let p = SurgeryParams { n, gamma, replicas, seed };
            let (records, summary) = experiments::run_surgery_check(&p)?;
            persist(out.as_deref(), &records)?;
            print_json(&serde_json::to_value(&summary)?)
        }
        ExpCmd::Replay { r#in, line } => {
            let records = read_jsonl(&r#in)?;
            let selected: Vec<(usize, &ExperimentRecord)> = match line {
                Some(k) => {
                    if k == 0 || k > records.len() {
                        return Err(usage(format!(
                            "--line {k} out of range, file has {} records",
                            records.len()
                        )));
                    }
                    vec![(k, &records[k - 1])]
                }
                None => records.iter().enumerate().map(|(i, r)| (i + 1, r)).collect(),
            };
            let mut mismatches = Vec::new();
            for (lineno, rec) in &selected {
                if !experiments::replay_matches(rec)? {
                    mismatches.push(*lineno);
                    eprintln!(
                        "line {lineno}: {} seed {} does not replay bitwise",
                        rec.experiment, rec.seed
                    );
                }
            }
            print_json(&json!({
                "checked": selected.len(),
                "matched": selected.len() - mismatches.len(),
                "mismatched_lines": mismatches,
            }))?;
            if !mismatches.is_empty() {
                anyhow::bail!("{} of {} records failed to replay", mismatches.len(), selected.len());
            }
            Ok(())
        }
    }
}

/// Parse a key=value config file into pairs, skipping blanks and comments.
fn parse_config_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config {}:{}: expected key=value", path.display(), i + 1)))?;
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

/// Append `--key value` for every config entry whose long flag is absent
/// from the command line, so explicit flags always win. Returns the
/// augmented argument vector.
pub fn inject_config(args: Vec<String>) -> Result<Vec<String>> {
    let mut config_path = None;
    for (i, tok) in args.iter().enumerate() {
        if tok == "--config" {
            config_path = args.get(i + 1).cloned();
            if config_path.is_none() {
                return Err(usage("--config needs a file argument"));
            }
        } else if let Some(v) = tok.strip_prefix("--config=") {
            config_path = Some(v.to_string());
        }
    }
    let Some(path) = config_path else { return Ok(args) };
    let pairs = parse_config_file(Path::new(&path))?;
    let present: Vec<String> = args
        .iter()
        .filter_map(|t| t.strip_prefix("--"))
        .map(|t| t.split('=').next().unwrap_or(t).to_string())
        .collect();
    let mut args = args;
    for (k, v) in pairs {
        if !present.iter().any(|p| p == &k) {
            args.push(format!("--{k}"));
            args.push(v);
        }
    }
    Ok(args)
}

/// Full entry point minus process::exit, so tests can drive it.
pub fn main_entry(raw_args: Vec<String>) -> Result<()> {
    let args = inject_config(raw_args)?;
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        // clap's own exit: 0 for --help/--version, 2 for usage errors.
        Err(e) => e.exit(),
    };
    match cli.cmd {
        Cmd::Parisi(c) => run_parisi(c),
        Cmd::Graph(c) => run_graph(c),
        Cmd::Cut(c) => run_cut(c),
        Cmd::Sk(c) => run_sk(c),
        Cmd::Exp(c) => run_exp(c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strs(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn config_injection_respects_explicit_flags() {
        let dir = std::env::temp_dir().join(format!("glasscut-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.conf");
        std::fs::write(&path, "n = 16\nreplicas = 5\n# comment\n\nseed=9\n").unwrap();
        let args = inject_config(strs(&[
            "glasscut",
            "exp",
            "surgery",
            "--config",
            path.to_str().unwrap(),
            "--n",
            "32",
        ]))
        .unwrap();
        // --n stays as given; replicas and seed arrive from the file.
        assert!(args.windows(2).any(|w| w[0] == "--n" && w[1] == "32"));
        assert!(args.windows(2).any(|w| w[0] == "--replicas" && w[1] == "5"));
        assert!(args.windows(2).any(|w| w[0] == "--seed" && w[1] == "9"));
        assert_eq!(args.iter().filter(|t| *t == "--n").count(), 1);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn malformed_config_is_a_usage_error() {
        let dir = std::env::temp_dir().join(format!("glasscut-badconf-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.conf");
        std::fs::write(&path, "just words\n").unwrap();
        let err = inject_config(strs(&["glasscut", "--config", path.to_str().unwrap()])).unwrap_err();
        assert!(err.downcast_ref::<UsageError>().is_some());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn profile_shape_mismatch_is_a_usage_error() {
        let err = run_parisi(ParisiCmd::Eval {
            k: 2,
            q: vec![0.0, 1.0],
            m: vec![0.5, 0.9],
            beta: 2.0,
            method: "recursion".into(),
        })
        .unwrap_err();
        assert!(err.downcast_ref::<UsageError>().is_some());
    }
}
