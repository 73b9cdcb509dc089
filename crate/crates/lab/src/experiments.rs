//! Experiment drivers: seeded replica grids producing JSONL records plus a
//! printed summary, and bitwise replay of any single record.
//!
//! Seed discipline: every record carries one `seed`, derived along
//! master -> experiment id -> cell -> replica. All randomness inside a
//! replica comes from purpose-labeled sub-streams of that seed, and solver
//! hyperparameters are fixed functions of (experiment, n), so a record
//! replays from its own fields alone.

use crate::records::ExperimentRecord;
use anyhow::{anyhow, bail, ensure, Result};
use glasscut_core::cuts::{
    cut_size, exact_extremal, local_search, spectral_bounds, AnnealOpts, Constraint, Objective,
    SolverKind, SpinConfig,
};
use glasscut_core::graphs::{
    color_and_decompose, cond_mean_cut_blue, cond_mean_cut_rewired, gen_er_gnm, gen_poissonized,
    gen_regular, gen_sbm, rewire, surgery_expectations, MultiGraph,
};
use glasscut_core::math::mean_se;
use glasscut_core::rng::Stream;
use glasscut_core::sk::{free_energy, interp_derivative, sk_ground, Couplings, GroundMethod, ModelSpec};
use serde::Serialize;
use std::time::Instant;

/// Parisi constant reference used when scaling summaries compare rescaled
/// deviations against the predicted plateau.
pub const PSTAR_REF: f64 = 0.76321;

/// Bias allowance for the centered finite difference in the interpolation
/// derivative check: |mean(FD - CF)| <= 2 SE + FD_CURVATURE_K * dt^2.
/// Measured on (n, beta, gamma, t) = (10, 1, 4, 0.5): the dt^2 coefficient
/// of the bias fits below 0.5, so 2.0 leaves a factor-4 margin.
pub const FD_CURVATURE_K: f64 = 2.0;

const EXP_SCALING: u64 = 101;
const EXP_SBM: u64 = 102;
const EXP_INTERP_TREND: u64 = 103;
const EXP_SURGERY: u64 = 104;
const EXP_INTERP_FD: u64 = 105;
const EXP_FREE_ENERGY: u64 = 106;

/// Purpose labels for sub-streams of a replica seed.
mod purpose {
    pub const GRAPH: u64 = 1;
    pub const SOLVER: u64 = 2;
    pub const SIGMA: u64 = 3;
    pub const DISORDER: u64 = 4;
    pub const SURGERY: u64 = 5;
}

/// master -> experiment -> cell -> replica, collapsed to the one u64 that
/// goes in the record.
fn replica_seed(master: u64, exp: u64, cell: u64, replica: u64) -> u64 {
    Stream::from_seed(master).derive(exp).derive(cell).derive(replica).next_u64()
}

pub fn objective_label(o: Objective) -> &'static str {
    match o {
        Objective::Min => "min",
        Objective::Max => "max",
    }
}

pub fn constraint_label(c: Constraint) -> &'static str {
    match c {
        Constraint::Free => "free",
        Constraint::Bisection => "bisection",
    }
}

pub fn solver_label(s: SolverKind) -> &'static str {
    match s {
        SolverKind::Exact => "exact",
        SolverKind::Local => "local",
        SolverKind::Spectral => "spectral",
    }
}

pub fn parse_objective(s: &str) -> Result<Objective> {
    match s {
        "min" => Ok(Objective::Min),
        "max" => Ok(Objective::Max),
        _ => bail!("unknown objective {s:?} (expected min or max)"),
    }
}

pub fn parse_constraint(s: &str) -> Result<Constraint> {
    match s {
        "free" => Ok(Constraint::Free),
        "bisection" => Ok(Constraint::Bisection),
        _ => bail!("unknown constraint {s:?} (expected free or bisection)"),
    }
}

pub fn parse_solver(s: &str) -> Result<SolverKind> {
    match s {
        "exact" => Ok(SolverKind::Exact),
        "local" => Ok(SolverKind::Local),
        "spectral" => Ok(SolverKind::Spectral),
        _ => bail!("unknown solver {s:?} (expected exact, local or spectral)"),
    }
}

/// Balanced uniform spin assignment.
fn random_balanced(n: usize, rng: &mut Stream) -> SpinConfig {
    let mut spins: Vec<i8> = (0..n).map(|i| if i < n / 2 { 1 } else { -1 }).collect();
    rng.shuffle(&mut spins);
    SpinConfig::new(spins).expect("n >= 1 by construction")
}

/// One Gaussian coupling sample's ground state, seeded like every replica:
/// disorder and solver randomness come from purpose streams of `seed`.
pub fn sk_ground_sample(
    n: usize,
    constraint: Constraint,
    method: GroundMethod,
    seed: u64,
) -> Result<(f64, SpinConfig)> {
    let root = Stream::from_seed(seed);
    let c = Couplings::gaussian(n, &mut root.derive(purpose::DISORDER));
    let mut rng = root.derive(purpose::SOLVER);
    sk_ground(&c, constraint, method, &mut rng).map_err(|e| anyhow!("{e:?}"))
}

/// Solver hyperparameters are a function of n only, never a CLI knob, so
/// that records replay without carrying them.
pub fn scaling_anneal_opts(n: usize) -> AnnealOpts {
    if n <= 256 {
        AnnealOpts::default()
    } else {
        AnnealOpts { restarts: 2, moves_per_vertex: 60, ..AnnealOpts::default() }
    }
}

fn solve_cut(
    g: &MultiGraph,
    objective: Objective,
    constraint: Constraint,
    solver: SolverKind,
    rng: &mut Stream,
) -> Result<f64> {
    let r = match solver {
        SolverKind::Exact => exact_extremal(g, objective, constraint),
        SolverKind::Local => local_search(g, objective, constraint, &scaling_anneal_opts(g.n()), rng),
        SolverKind::Spectral => spectral_bounds(g, objective, constraint, rng),
    };
    r.map(|c| c.value).map_err(|e| anyhow!("{e:?}"))
}

// ---------------------------------------------------------------- scaling

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ensemble {
    Er,
    Regular,
}

impl Ensemble {
    pub fn label(self) -> &'static str {
        match self {
            Ensemble::Er => "er",
            Ensemble::Regular => "regular",
        }
    }

    pub fn parse(s: &str) -> Result<Ensemble> {
        match s {
            "er" => Ok(Ensemble::Er),
            "regular" => Ok(Ensemble::Regular),
            _ => bail!("unknown ensemble {s:?} (expected er or regular)"),
        }
    }

    /// Centering constant c in value/n ~ c*gamma +- P* sqrt(c*gamma):
    /// 1/2 for ER at edge density gamma, 1/4 for gamma-regular.
    pub fn centering(self) -> f64 {
        match self {
            Ensemble::Er => 0.5,
            Ensemble::Regular => 0.25,
        }
    }
}

fn gen_ensemble(ensemble: Ensemble, n: usize, gamma: f64, rng: &mut Stream) -> Result<MultiGraph> {
    match ensemble {
        Ensemble::Er => Ok(gen_er_gnm(n, (gamma * n as f64).round() as u64, rng)),
        Ensemble::Regular => {
            ensure!(
                gamma > 0.0 && gamma.fract() == 0.0,
                "regular ensemble needs an integer degree, got {gamma}"
            );
            gen_regular(n, gamma as u32, rng).map_err(|e| anyhow!("{e:?}"))
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScalingParams {
    pub ensemble: Ensemble,
    pub gammas: Vec<f64>,
    pub n: usize,
    pub replicas: usize,
    pub solver: SolverKind,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingRow {
    pub gamma: f64,
    pub objective: String,
    pub constraint: String,
    pub mean_per_vertex: f64,
    pub stderr: Option<f64>,
    /// (value/n - c*gamma) / sqrt(c*gamma) with the ensemble centering c.
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingSummary {
    pub experiment: String,
    pub ensemble: String,
    pub n: usize,
    pub replicas: usize,
    pub solver: String,
    pub centering: f64,
    pub pstar_ref: f64,
    pub rows: Vec<ScalingRow>,
}

/// The three cut problems solved per instance. Min-free is identically zero
/// (put every vertex on one side), so it is not run.
pub const SCALING_PROBLEMS: [(Objective, Constraint); 3] = [
    (Objective::Min, Constraint::Bisection),
    (Objective::Max, Constraint::Bisection),
    (Objective::Max, Constraint::Free),
];

fn scaling_problem_code(objective: Objective, constraint: Constraint) -> Result<u64> {
    SCALING_PROBLEMS
        .iter()
        .position(|&(o, c)| o == objective && c == constraint)
        .map(|i| i as u64)
        .ok_or_else(|| anyhow!("no such scaling problem: {objective:?} {constraint:?}"))
}

fn scaling_value(
    ensemble: Ensemble,
    n: usize,
    gamma: f64,
    objective: Objective,
    constraint: Constraint,
    solver: SolverKind,
    seed: u64,
) -> Result<f64> {
    let root = Stream::from_seed(seed);
    let g = gen_ensemble(ensemble, n, gamma, &mut root.derive(purpose::GRAPH))?;
    let code = scaling_problem_code(objective, constraint)?;
    let mut rng = root.derive(purpose::SOLVER).derive(code);
    solve_cut(&g, objective, constraint, solver, &mut rng)
}

pub fn run_scaling(p: &ScalingParams) -> Result<(Vec<ExperimentRecord>, ScalingSummary)> {
    ensure!(p.n >= 2 && p.n % 2 == 0, "n must be even and at least 2");
    ensure!(!p.gammas.is_empty(), "need at least one gamma");
    ensure!(p.replicas >= 1, "need at least one replica");
    if p.solver == SolverKind::Exact {
        ensure!(p.n <= 30, "exact solver is limited to n <= 30, got n = {}", p.n);
    }
    let problems: Vec<(Objective, Constraint)> = SCALING_PROBLEMS
        .iter()
        .copied()
        .filter(|&(_, c)| p.solver != SolverKind::Spectral || c == Constraint::Bisection)
        .collect();

    let mut records = Vec::new();
    let mut rows = Vec::new();
    for (ci, &gamma) in p.gammas.iter().enumerate() {
        let mut per_problem: Vec<Vec<f64>> = vec![Vec::new(); problems.len()];
        for replica in 0..p.replicas {
            let seed = replica_seed(p.seed, EXP_SCALING, ci as u64, replica as u64);
            for (pi, &(objective, constraint)) in problems.iter().enumerate() {
                let start = Instant::now();
                let value =
                    match scaling_value(p.ensemble, p.n, gamma, objective, constraint, p.solver, seed)
                    {
                        Ok(v) => v,
                        Err(e) => {
                            eprintln!(
                                "scaling: skipping gamma={gamma} replica={replica} \
                                 {}/{}: {e}",
                                objective_label(objective),
                                constraint_label(constraint)
                            );
                            continue;
                        }
                    };
                let mut rec = ExperimentRecord::new("scaling", seed, value);
                rec.ensemble = Some(p.ensemble.label().into());
                rec.n = Some(p.n);
                rec.gamma = Some(gamma);
                rec.objective = Some(objective_label(objective).into());
                rec.constraint = Some(constraint_label(constraint).into());
                rec.solver = Some(solver_label(p.solver).into());
                rec.normalized = Some(value / p.n as f64);
                rec.elapsed_ms = start.elapsed().as_millis() as u64;
                records.push(rec);
                per_problem[pi].push(value / p.n as f64);
            }
        }
        let c = p.ensemble.centering();
        for (pi, &(objective, constraint)) in problems.iter().enumerate() {
            let vals = &per_problem[pi];
            if vals.is_empty() {
                continue;
            }
            let (mean, se) = if vals.len() >= 2 {
                let (m, s) = mean_se(vals);
                (m, Some(s))
            } else {
                (vals[0], None)
            };
            rows.push(ScalingRow {
                gamma,
                objective: objective_label(objective).into(),
                constraint: constraint_label(constraint).into(),
                mean_per_vertex: mean,
                stderr: se,
                deviation: (mean - c * gamma) / (c * gamma).sqrt(),
            });
        }
    }
    let summary = ScalingSummary {
        experiment: "scaling".into(),
        ensemble: p.ensemble.label().into(),
        n: p.n,
        replicas: p.replicas,
        solver: solver_label(p.solver).into(),
        centering: p.ensemble.centering(),
        pstar_ref: PSTAR_REF,
        rows,
    };
    Ok((records, summary))
}

// -------------------------------------------------------------------- sbm

#[derive(Clone, Debug)]
pub struct SbmParams {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub epsilon: f64,
    pub replicas: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SbmSummary {
    pub experiment: String,
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub epsilon: f64,
    /// Absolute cut threshold n*b/4 + n*epsilon; declare planted iff the
    /// estimated min bisection is at or below it.
    pub theta: f64,
    pub replicas: usize,
    pub type_i_rate: f64,
    pub type_ii_rate: f64,
    pub combined_error_rate: f64,
    /// Separation condition (a-b)^2 vs 8 P*^2 (a+b): detection is expected
    /// when lhs exceeds rhs with room to spare.
    pub condition_lhs: f64,
    pub condition_rhs: f64,
    /// epsilon = 0 leaves no slack above the planted cut; allowed, flagged.
    pub degenerate_threshold: bool,
}

fn sbm_mcut(n: usize, a: f64, b: f64, seed: u64) -> Result<f64> {
    let root = Stream::from_seed(seed);
    let inst = gen_sbm(n, a, b, &mut root.derive(purpose::GRAPH)).map_err(|e| anyhow!("{e:?}"))?;
    let mut rng = root.derive(purpose::SOLVER);
    let r = local_search(
        &inst.graph,
        Objective::Min,
        Constraint::Bisection,
        &scaling_anneal_opts(n),
        &mut rng,
    )
    .map_err(|e| anyhow!("{e:?}"))?;
    Ok(r.value)
}

pub fn run_sbm_test(p: &SbmParams) -> Result<(Vec<ExperimentRecord>, SbmSummary)> {
    ensure!(p.n >= 2 && p.n % 2 == 0, "n must be even and at least 2");
    ensure!(p.replicas >= 1, "need at least one replica pair");
    ensure!(p.a >= 0.0 && p.b >= 0.0 && p.epsilon >= 0.0, "a, b, epsilon must be nonnegative");
    let theta = p.n as f64 * p.b / 4.0 + p.n as f64 * p.epsilon;
    if p.epsilon == 0.0 {
        eprintln!("sbm: epsilon = 0 gives a degenerate threshold (no slack above the planted cut)");
    }
    let cbar = (p.a + p.b) / 2.0;
    let mut records = Vec::new();
    let mut type_i = 0usize;
    let mut type_ii = 0usize;
    for replica in 0..p.replicas {
        // cell 0 = null (ER disguised as an a = b block model), cell 1 = planted.
        for (cell, ensemble, a, b) in
            [(0u64, "er-null", cbar, cbar), (1u64, "sbm-planted", p.a, p.b)]
        {
            let seed = replica_seed(p.seed, EXP_SBM, cell, replica as u64);
            let start = Instant::now();
            let value = sbm_mcut(p.n, a, b, seed)?;
            let declares_planted = value <= theta;
            if cell == 0 && declares_planted {
                type_i += 1;
            }
            if cell == 1 && !declares_planted {
                type_ii += 1;
            }
            let mut rec = ExperimentRecord::new("sbm", seed, value);
            rec.ensemble = Some(ensemble.into());
            rec.n = Some(p.n);
            rec.a = Some(a);
            rec.b = Some(b);
            rec.objective = Some("min".into());
            rec.constraint = Some("bisection".into());
            rec.solver = Some("local".into());
            rec.normalized = Some(value / p.n as f64);
            rec.elapsed_ms = start.elapsed().as_millis() as u64;
            records.push(rec);
        }
    }
    let reps = p.replicas as f64;
    let summary = SbmSummary {
        experiment: "sbm".into(),
        n: p.n,
        a: p.a,
        b: p.b,
        epsilon: p.epsilon,
        theta,
        replicas: p.replicas,
        type_i_rate: type_i as f64 / reps,
        type_ii_rate: type_ii as f64 / reps,
        combined_error_rate: (type_i + type_ii) as f64 / (2.0 * reps),
        condition_lhs: (p.a - p.b) * (p.a - p.b),
        condition_rhs: 8.0 * PSTAR_REF * PSTAR_REF * (p.a + p.b),
        degenerate_threshold: p.epsilon == 0.0,
    };
    Ok((records, summary))
}

// ----------------------------------------------------------- interp trend

#[derive(Clone, Debug)]
pub struct InterpTrendParams {
    pub n: usize,
    pub beta: f64,
    pub gammas: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct InterpTrendRow {
    pub gamma: f64,
    /// Inverse temperature handed to the dilute model: beta / sqrt(2 gamma).
    pub beta_dilute: f64,
    pub dilute_mean: f64,
    pub dilute_se: f64,
    pub abs_diff: f64,
    /// SE of the difference, sqrt(se_dilute^2 + se_sk^2).
    pub combined_se: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct InterpTrendSummary {
    pub experiment: String,
    pub n: usize,
    pub beta: f64,
    pub samples: usize,
    pub sk_mean: f64,
    pub sk_se: f64,
    pub rows: Vec<InterpTrendRow>,
    /// abs_diff nonincreasing in gamma, each step allowed 2 combined SEs.
    pub nonincreasing_within_2se: bool,
}

/// One SK free-energy sample: value is log Z, normalized its density.
fn trend_sk_sample(n: usize, beta: f64, seed: u64) -> Result<(f64, f64)> {
    let root = Stream::from_seed(seed);
    let c = Couplings::gaussian(n, &mut root.derive(purpose::DISORDER));
    let s = free_energy(&ModelSpec::Sk { c: &c }, beta, true, 0).map_err(|e| anyhow!("{e:?}"))?;
    Ok((s.log_partition, s.free_energy_density))
}

/// One dilute sample at rate gamma, inverse temperature beta / sqrt(2 gamma).
fn trend_dilute_sample(n: usize, beta: f64, gamma: f64, seed: u64) -> Result<(f64, f64)> {
    let root = Stream::from_seed(seed);
    let g = gen_poissonized(n, gamma, &mut root.derive(purpose::GRAPH));
    let beta_dilute = beta / (2.0 * gamma).sqrt();
    let s = free_energy(&ModelSpec::Dilute { g: &g, scale: 1.0 }, beta_dilute, true, 0)
        .map_err(|e| anyhow!("{e:?}"))?;
    Ok((s.log_partition, s.free_energy_density))
}

pub fn run_interp_trend(p: &InterpTrendParams) -> Result<(Vec<ExperimentRecord>, InterpTrendSummary)> {
    ensure!(p.n >= 2 && p.n % 2 == 0, "n must be even and at least 2");
    ensure!(p.n <= 14, "trend check is exact enumeration, n <= 14");
    ensure!(p.samples >= 2, "need at least two samples");
    ensure!(!p.gammas.is_empty(), "need at least one gamma");
    ensure!(p.gammas.iter().all(|&g| g > 0.0), "gamma must be positive");
    ensure!(p.beta >= 0.0, "beta must be nonnegative");

    let mut records = Vec::new();
    // Cell 0 is the SK side, shared by every gamma comparison.
    let mut sk_densities = Vec::with_capacity(p.samples);
    for replica in 0..p.samples {
        let seed = replica_seed(p.seed, EXP_INTERP_TREND, 0, replica as u64);
        let start = Instant::now();
        let (logz, density) = trend_sk_sample(p.n, p.beta, seed)?;
        sk_densities.push(density);
        let mut rec = ExperimentRecord::new("interp-trend", seed, logz);
        rec.ensemble = Some("sk".into());
        rec.n = Some(p.n);
        rec.beta = Some(p.beta);
        rec.normalized = Some(density);
        rec.elapsed_ms = start.elapsed().as_millis() as u64;
        records.push(rec);
    }
    let (sk_mean, sk_se) = mean_se(&sk_densities);

    let mut rows = Vec::new();
    for (ci, &gamma) in p.gammas.iter().enumerate() {
        let mut densities = Vec::with_capacity(p.samples);
        for replica in 0..p.samples {
            let seed = replica_seed(p.seed, EXP_INTERP_TREND, 1 + ci as u64, replica as u64);
            let start = Instant::now();
            let (logz, density) = trend_dilute_sample(p.n, p.beta, gamma, seed)?;
            densities.push(density);
            let mut rec = ExperimentRecord::new("interp-trend", seed, logz);
            rec.ensemble = Some("dilute".into());
            rec.n = Some(p.n);
            rec.beta = Some(p.beta);
            rec.gamma = Some(gamma);
            rec.normalized = Some(density);
            rec.elapsed_ms = start.elapsed().as_millis() as u64;
            records.push(rec);
        }
        let (mean, se) = mean_se(&densities);
        rows.push(InterpTrendRow {
            gamma,
            beta_dilute: p.beta / (2.0 * gamma).sqrt(),
            dilute_mean: mean,
            dilute_se: se,
            abs_diff: (mean - sk_mean).abs(),
            combined_se: (se * se + sk_se * sk_se).sqrt(),
        });
    }
    let nonincreasing = rows.windows(2).all(|w| {
        let allowance = 2.0 * (w[0].combined_se.powi(2) + w[1].combined_se.powi(2)).sqrt();
        w[1].abs_diff <= w[0].abs_diff + allowance
    });
    let summary = InterpTrendSummary {
        experiment: "interp-trend".into(),
        n: p.n,
        beta: p.beta,
        samples: p.samples,
        sk_mean,
        sk_se,
        rows,
        nonincreasing_within_2se: nonincreasing,
    };
    Ok((records, summary))
}

// ---------------------------------------------------------------- surgery

#[derive(Clone, Debug)]
pub struct SurgeryParams {
    pub n: usize,
    pub gamma: u32,
    pub replicas: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SurgeryRow {
    pub label: String,
    pub mc_mean: f64,
    pub mc_se: f64,
    pub expected: f64,
    pub z_score: f64,
    pub pass_3se: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SurgerySummary {
    pub experiment: String,
    pub n: usize,
    pub gamma: u32,
    pub gamma_minus: f64,
    pub replicas: usize,
    pub rows: Vec<SurgeryRow>,
    pub all_pass_3se: bool,
}

/// The per-replica surgery observables, in record order. Centered labels
/// subtract the exact conditional mean, so they compare against zero.
pub const SURGERY_LABELS: [&str; 7] = [
    "surgery-z1",
    "surgery-rb-edges",
    "surgery-bb-edges",
    "surgery-cut-rb",
    "surgery-cut-bb",
    "surgery-rewired-centered",
    "surgery-blue-centered",
];

fn surgery_replica(n: usize, gamma: u32, seed: u64) -> Result<[f64; 7]> {
    let root = Stream::from_seed(seed);
    let colored = color_and_decompose(n, gamma, &mut root.derive(purpose::GRAPH))
        .map_err(|e| anyhow!("{e:?}"))?;
    let r = rewire(&colored, &mut root.derive(purpose::SURGERY));
    let sigma = random_balanced(n, &mut root.derive(purpose::SIGMA));

    let z_mean = colored.blue_counts.iter().map(|&z| z as f64).sum::<f64>() / n as f64;
    let rb_edges = (colored.rb.m_total() - colored.rb.loop_total()) as f64;
    let bb_edges = (colored.bb.m_total() - colored.bb.loop_total()) as f64;
    let cut_rb = cut_size(&colored.rb, &sigma) as f64;
    let cut_bb = cut_size(&colored.bb, &sigma) as f64;

    let s_plus_red = colored
        .rb_red_ends
        .iter()
        .filter(|&&v| sigma.spins()[v as usize] == 1)
        .count() as f64;
    let rewired_centered = cut_size(&r.rewired, &sigma) as f64
        - cond_mean_cut_rewired(r.freed_red as f64, s_plus_red);

    let s_total: f64 = colored.blue_counts.iter().map(|&z| z as f64).sum();
    let s_plus: f64 = colored
        .blue_counts
        .iter()
        .zip(sigma.spins())
        .filter(|&(_, &s)| s == 1)
        .map(|(&z, _)| z as f64)
        .sum();
    let blue_centered = cut_rb + cut_bb - cond_mean_cut_blue(n, gamma, s_total, s_plus);

    Ok([z_mean, rb_edges, bb_edges, cut_rb, cut_bb, rewired_centered, blue_centered])
}

pub fn run_surgery_check(p: &SurgeryParams) -> Result<(Vec<ExperimentRecord>, SurgerySummary)> {
    ensure!(p.n >= 2 && p.n % 2 == 0, "n must be even and at least 2");
    ensure!(p.gamma >= 2, "gamma must be at least 2");
    ensure!(p.n * p.gamma as usize % 2 == 0, "n * gamma must be even");
    ensure!(p.replicas >= 2, "need at least two replicas");

    let e = surgery_expectations(p.n, p.gamma);
    let expected = [e.e_z1, e.e_rb_edges, e.e_bb_edges, e.e_cut_rb, e.e_cut_bb, 0.0, 0.0];

    let mut records = Vec::new();
    let mut samples: Vec<Vec<f64>> = vec![Vec::with_capacity(p.replicas); SURGERY_LABELS.len()];
    for replica in 0..p.replicas {
        let seed = replica_seed(p.seed, EXP_SURGERY, 0, replica as u64);
        let start = Instant::now();
        let values = surgery_replica(p.n, p.gamma, seed)?;
        let elapsed = start.elapsed().as_millis() as u64;
        for (i, (&label, &value)) in SURGERY_LABELS.iter().zip(&values).enumerate() {
            samples[i].push(value);
            let mut rec = ExperimentRecord::new(label, seed, value);
            rec.n = Some(p.n);
            rec.gamma = Some(p.gamma as f64);
            rec.normalized = Some(value / p.n as f64);
            rec.elapsed_ms = elapsed;
            records.push(rec);
        }
    }

    let mut rows = Vec::new();
    for (i, &label) in SURGERY_LABELS.iter().enumerate() {
        let (mean, se) = mean_se(&samples[i]);
        let z = if se > 0.0 {
            (mean - expected[i]) / se
        } else if mean == expected[i] {
            0.0
        } else {
            f64::INFINITY
        };
        rows.push(SurgeryRow {
            label: label.into(),
            mc_mean: mean,
            mc_se: se,
            expected: expected[i],
            z_score: z,
            pass_3se: z.abs() <= 3.0,
        });
    }
    let all_pass = rows.iter().all(|r| r.pass_3se);
    let summary = SurgerySummary {
        experiment: "surgery".into(),
        n: p.n,
        gamma: p.gamma,
        gamma_minus: e.gamma_minus,
        replicas: p.replicas,
        rows,
        all_pass_3se: all_pass,
    };
    Ok((records, summary))
}

// -------------------------------------------------- interp derivative (FD)

#[derive(Clone, Debug)]
pub struct InterpFdParams {
    pub n: usize,
    pub beta: f64,
    pub gamma: f64,
    pub t: f64,
    pub dt: f64,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct InterpFdSummary {
    pub experiment: String,
    pub n: usize,
    pub beta: f64,
    pub gamma: f64,
    pub t: f64,
    pub dt: f64,
    pub samples: usize,
    pub closed_form_mean: f64,
    pub closed_form_se: f64,
    pub finite_diff_mean: f64,
    pub finite_diff_se: f64,
    pub diff_mean: f64,
    pub diff_se: f64,
    /// 2 SE(diff) + FD_CURVATURE_K * dt^2.
    pub tolerance: f64,
    pub pass: bool,
    pub series_tail_bound: f64,
}

const INTERP_L_MAX: usize = 48;

/// Closed-form derivative sample; this is what the record stores, so it has
/// no dt dependence and replays from (n, beta, gamma, t, seed).
fn interp_fd_closed_form(n: usize, beta: f64, gamma: f64, t: f64, seed: u64) -> Result<(f64, f64)> {
    let root = Stream::from_seed(seed);
    let c = Couplings::gaussian(n, &mut root.derive(purpose::DISORDER));
    let g_mid = gen_poissonized(n, gamma * (1.0 - t), &mut root.derive(purpose::GRAPH).derive(0));
    let d = interp_derivative(&c, &g_mid, beta, gamma, t, INTERP_L_MAX)
        .map_err(|e| anyhow!("{e:?}"))?;
    Ok((d.d_sk + d.d_dilute, d.tail_bound))
}

/// Centered finite difference with coupled graphs: the same mid graph is
/// thinned down for t + dt and superposed up for t - dt, so the difference
/// shares the Poisson noise with the closed form.
fn interp_fd_sample(p: &InterpFdParams, seed: u64) -> Result<(f64, f64, f64)> {
    let root = Stream::from_seed(seed);
    let c = Couplings::gaussian(p.n, &mut root.derive(purpose::DISORDER));
    let gs = root.derive(purpose::GRAPH);
    let g_mid = gen_poissonized(p.n, p.gamma * (1.0 - p.t), &mut gs.derive(0));
    let extra = gen_poissonized(p.n, p.gamma * p.dt, &mut gs.derive(1));
    let g_big = g_mid.union(&extra);
    let keep = (1.0 - p.t - p.dt) / (1.0 - p.t);
    let mut thin = gs.derive(2);
    let mut g_small = MultiGraph::new(p.n);
    for (u, v, mult) in g_mid.distinct_edges() {
        for _ in 0..mult {
            if thin.bernoulli(keep) {
                g_small.add_edge(u, v);
            }
        }
    }

    let d = interp_derivative(&c, &g_mid, p.beta, p.gamma, p.t, INTERP_L_MAX)
        .map_err(|e| anyhow!("{e:?}"))?;
    let cf = d.d_sk + d.d_dilute;

    let spec_small = ModelSpec::Interp { c: &c, g: &g_small, gamma: p.gamma, t: p.t + p.dt };
    let spec_big = ModelSpec::Interp { c: &c, g: &g_big, gamma: p.gamma, t: p.t - p.dt };
    let fe_small = free_energy(&spec_small, p.beta, true, 0).map_err(|e| anyhow!("{e:?}"))?;
    let fe_big = free_energy(&spec_big, p.beta, true, 0).map_err(|e| anyhow!("{e:?}"))?;
    let fd = (fe_small.free_energy_density - fe_big.free_energy_density) / (2.0 * p.dt);

    Ok((cf, fd, d.tail_bound))
}

pub fn run_interp_fd(p: &InterpFdParams) -> Result<(Vec<ExperimentRecord>, InterpFdSummary)> {
    ensure!(p.n >= 2 && p.n % 2 == 0, "n must be even and at least 2");
    ensure!(p.samples >= 2, "need at least two samples");
    ensure!(p.gamma > 0.0, "gamma must be positive");
    ensure!(p.dt > 0.0 && p.t - p.dt > 0.0 && p.t + p.dt < 1.0, "need 0 < t - dt and t + dt < 1");

    let mut records = Vec::new();
    let mut cfs = Vec::with_capacity(p.samples);
    let mut fds = Vec::with_capacity(p.samples);
    let mut diffs = Vec::with_capacity(p.samples);
    let mut tail = 0.0f64;
    for replica in 0..p.samples {
        let seed = replica_seed(p.seed, EXP_INTERP_FD, 0, replica as u64);
        let start = Instant::now();
        let (cf, fd, tb) = interp_fd_sample(p, seed)?;
        cfs.push(cf);
        fds.push(fd);
        diffs.push(fd - cf);
        tail = tail.max(tb);
        let mut rec = ExperimentRecord::new("interp-fd", seed, cf);
        rec.n = Some(p.n);
        rec.beta = Some(p.beta);
        rec.gamma = Some(p.gamma);
        rec.t = Some(p.t);
        rec.elapsed_ms = start.elapsed().as_millis() as u64;
        records.push(rec);
    }
    let (cf_mean, cf_se) = mean_se(&cfs);
    let (fd_mean, fd_se) = mean_se(&fds);
    let (diff_mean, diff_se) = mean_se(&diffs);
    let tolerance = 2.0 * diff_se + FD_CURVATURE_K * p.dt * p.dt;
    let summary = InterpFdSummary {
        experiment: "interp-fd".into(),
        n: p.n,
        beta: p.beta,
        gamma: p.gamma,
        t: p.t,
        dt: p.dt,
        samples: p.samples,
        closed_form_mean: cf_mean,
        closed_form_se: cf_se,
        finite_diff_mean: fd_mean,
        finite_diff_se: fd_se,
        diff_mean,
        diff_se,
        tolerance,
        pass: diff_mean.abs() <= tolerance,
        series_tail_bound: tail,
    };
    Ok((records, summary))
}

// ------------------------------------------------------------ free energy

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeModel {
    Sk,
    Dilute,
    Interp,
}

impl FeModel {
    pub fn label(self) -> &'static str {
        match self {
            FeModel::Sk => "sk",
            FeModel::Dilute => "dilute",
            FeModel::Interp => "interp",
        }
    }

    pub fn parse(s: &str) -> Result<FeModel> {
        match s {
            "sk" => Ok(FeModel::Sk),
            "dilute" => Ok(FeModel::Dilute),
            "interp" => Ok(FeModel::Interp),
            _ => bail!("unknown model {s:?} (expected sk, dilute or interp)"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FreeEnergyParams {
    pub model: FeModel,
    pub n: usize,
    pub beta: f64,
    pub gamma: Option<f64>,
    pub t: Option<f64>,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FreeEnergySummary {
    pub experiment: String,
    pub model: String,
    pub n: usize,
    pub beta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    pub samples: usize,
    pub mean_density: f64,
    pub se: f64,
}

/// One disorder sample of the balanced free energy. The dilute model uses
/// unit couplings on a rate-gamma Poissonized graph; the interpolating one
/// samples its graph at rate gamma (1 - t).
fn free_energy_sample(
    model: FeModel,
    n: usize,
    beta: f64,
    gamma: Option<f64>,
    t: Option<f64>,
    seed: u64,
) -> Result<(f64, f64)> {
    let root = Stream::from_seed(seed);
    let s = match model {
        FeModel::Sk => {
            let c = Couplings::gaussian(n, &mut root.derive(purpose::DISORDER));
            free_energy(&ModelSpec::Sk { c: &c }, beta, true, 0)
        }
        FeModel::Dilute => {
            let gamma = gamma.ok_or_else(|| anyhow!("dilute model needs gamma"))?;
            let g = gen_poissonized(n, gamma, &mut root.derive(purpose::GRAPH));
            free_energy(&ModelSpec::Dilute { g: &g, scale: 1.0 }, beta, true, 0)
        }
        FeModel::Interp => {
            let gamma = gamma.ok_or_else(|| anyhow!("interp model needs gamma"))?;
            let t = t.ok_or_else(|| anyhow!("interp model needs t"))?;
            ensure!((0.0..=1.0).contains(&t), "t must lie in [0, 1]");
            let c = Couplings::gaussian(n, &mut root.derive(purpose::DISORDER));
            let g = gen_poissonized(n, gamma * (1.0 - t), &mut root.derive(purpose::GRAPH));
            free_energy(&ModelSpec::Interp { c: &c, g: &g, gamma, t }, beta, true, 0)
        }
    }
    .map_err(|e| anyhow!("{e:?}"))?;
    Ok((s.log_partition, s.free_energy_density))
}

pub fn run_free_energy(p: &FreeEnergyParams) -> Result<(Vec<ExperimentRecord>, FreeEnergySummary)> {
    ensure!(p.n >= 2 && p.n % 2 == 0, "n must be even and at least 2");
    ensure!(p.samples >= 2, "need at least two samples");
    let mut records = Vec::new();
    let mut densities = Vec::with_capacity(p.samples);
    for replica in 0..p.samples {
        let seed = replica_seed(p.seed, EXP_FREE_ENERGY, 0, replica as u64);
        let start = Instant::now();
        let (logz, density) = free_energy_sample(p.model, p.n, p.beta, p.gamma, p.t, seed)?;
        densities.push(density);
        let mut rec = ExperimentRecord::new("free-energy", seed, logz);
        rec.ensemble = Some(p.model.label().into());
        rec.n = Some(p.n);
        rec.beta = Some(p.beta);
        rec.gamma = if p.model == FeModel::Sk { None } else { p.gamma };
        rec.t = if p.model == FeModel::Interp { p.t } else { None };
        rec.normalized = Some(density);
        rec.elapsed_ms = start.elapsed().as_millis() as u64;
        records.push(rec);
    }
    let (mean, se) = mean_se(&densities);
    let summary = FreeEnergySummary {
        experiment: "free-energy".into(),
        model: p.model.label().into(),
        n: p.n,
        beta: p.beta,
        gamma: if p.model == FeModel::Sk { None } else { p.gamma },
        t: if p.model == FeModel::Interp { p.t } else { None },
        samples: p.samples,
        mean_density: mean,
        se,
    };
    Ok((records, summary))
}

// ----------------------------------------------------------------- replay

fn need_usize(v: Option<usize>, what: &str) -> Result<usize> {
    v.ok_or_else(|| anyhow!("record is missing {what}"))
}

fn need_f64(v: Option<f64>, what: &str) -> Result<f64> {
    v.ok_or_else(|| anyhow!("record is missing {what}"))
}

fn need_str<'a>(v: &'a Option<String>, what: &str) -> Result<&'a str> {
    v.as_deref().ok_or_else(|| anyhow!("record is missing {what}"))
}

/// Recompute a record's value from its own fields. Bitwise equality with
/// `record.value` is the reproducibility contract.
pub fn replay_record(rec: &ExperimentRecord) -> Result<f64> {
    match rec.experiment.as_str() {
        "scaling" => {
            let ensemble = Ensemble::parse(need_str(&rec.ensemble, "ensemble")?)?;
            let objective = parse_objective(need_str(&rec.objective, "objective")?)?;
            let constraint = parse_constraint(need_str(&rec.constraint, "constraint")?)?;
            let solver = parse_solver(need_str(&rec.solver, "solver")?)?;
            scaling_value(
                ensemble,
                need_usize(rec.n, "n")?,
                need_f64(rec.gamma, "gamma")?,
                objective,
                constraint,
                solver,
                rec.seed,
            )
        }
        "sbm" => sbm_mcut(
            need_usize(rec.n, "n")?,
            need_f64(rec.a, "a")?,
            need_f64(rec.b, "b")?,
            rec.seed,
        ),
        "interp-trend" => {
            let n = need_usize(rec.n, "n")?;
            let beta = need_f64(rec.beta, "beta")?;
            match need_str(&rec.ensemble, "ensemble")? {
                "sk" => Ok(trend_sk_sample(n, beta, rec.seed)?.0),
                "dilute" => {
                    Ok(trend_dilute_sample(n, beta, need_f64(rec.gamma, "gamma")?, rec.seed)?.0)
                }
                other => bail!("unknown interp-trend ensemble {other:?}"),
            }
        }
        "interp-fd" => Ok(interp_fd_closed_form(
            need_usize(rec.n, "n")?,
            need_f64(rec.beta, "beta")?,
            need_f64(rec.gamma, "gamma")?,
            need_f64(rec.t, "t")?,
            rec.seed,
        )?
        .0),
        "free-energy" => {
            let model = FeModel::parse(need_str(&rec.ensemble, "ensemble")?)?;
            Ok(free_energy_sample(
                model,
                need_usize(rec.n, "n")?,
                need_f64(rec.beta, "beta")?,
                rec.gamma,
                rec.t,
                rec.seed,
            )?
            .0)
        }
        label if label.starts_with("surgery-") => {
            let idx = SURGERY_LABELS
                .iter()
                .position(|&l| l == label)
                .ok_or_else(|| anyhow!("unknown surgery label {label:?}"))?;
            let values = surgery_replica(
                need_usize(rec.n, "n")?,
                need_f64(rec.gamma, "gamma")? as u32,
                rec.seed,
            )?;
            Ok(values[idx])
        }
        other => bail!("experiment {other:?} has no replay rule"),
    }
}

/// True when replaying reproduces the stored value bit for bit.
pub fn replay_matches(rec: &ExperimentRecord) -> Result<bool> {
    Ok(replay_record(rec)?.to_bits() == rec.value.to_bits())
}
