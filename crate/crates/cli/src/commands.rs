use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use randfix_core::contraction::{check_condition, classify, Classification, ClassifyOptions};
use randfix_core::hammerstein::{
    check_feasibility, solve_hammerstein, FeasibilityReport, HammersteinOptions,
    HammersteinSolution,
};
use randfix_core::randomfp::{
    sample_pairs, solve_random_fixed_point_with, RandomSolveSummary, RunOptions, StartPoint,
};
use randfix_core::{ConditionKind, ContractionCertificate, OmegaSample, ProbabilitySpace};

use crate::error::{CliError, EXIT_DIVERGENCE, EXIT_INFEASIBLE, EXIT_OK};
use crate::output::OutputDir;
use crate::problem::{load, FixedPointSetup, GridSpec, HammersteinSetup, RunSettings};
use crate::{BenchArgs, Command, RunArgs};

pub fn dispatch(cmd: &Command) -> Result<i32, CliError> {
    match cmd {
        Command::Solve(a) => solve(a),
        Command::CheckContraction(a) => check(a),
        Command::Classify(a) => classify_cmd(a),
        Command::Feasibility(a) => feasibility(a),
        Command::Hammerstein(a) => hammerstein(a),
        Command::Bench(b) => bench(b),
    }
}

fn omegas(space: &ProbabilitySpace) -> Vec<OmegaSample> {
    space.samples().collect()
}

fn fixed_point_setup(a: &RunArgs) -> Result<FixedPointSetup, CliError> {
    let file = load(a.input.as_deref(), a.preset.as_deref(), &a.overrides())?;
    FixedPointSetup::from_file(&file)
}

fn hammerstein_setup(a: &RunArgs) -> Result<HammersteinSetup, CliError> {
    let file = load(a.input.as_deref(), a.preset.as_deref(), &a.overrides())?;
    HammersteinSetup::from_file(&file)
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    command: &'static str,
    settings: &'a RunSettings,
    dim: usize,
    summary: &'a RandomSolveSummary<f64>,
}

fn run_solve(setup: &FixedPointSetup) -> Result<RandomSolveSummary<f64>, CliError> {
    let space = setup.settings.space()?;
    Ok(solve_random_fixed_point_with(
        &setup.operator,
        &space,
        &setup.coefficients,
        &StartPoint::Shared(&setup.start),
        &setup.picard(),
        &RunOptions { parallel: true },
    )?)
}

fn solve(a: &RunArgs) -> Result<i32, CliError> {
    let setup = fixed_point_setup(a)?;
    let summary = run_solve(&setup)?;
    let norm = setup.norm();
    let out = OutputDir::create(&a.out)?;
    out.write_json(
        "summary.json",
        &SolveOutput {
            command: "solve",
            settings: &setup.settings,
            dim: setup.start.dim(),
            summary: &summary,
        },
    )?;
    out.write(
        "omega.csv",
        &summary.omega_table_csv(|x| norm.norm_unchecked(x.as_slice())),
    )?;
    out.write_steps(
        summary
            .per_omega
            .iter()
            .filter_map(|o| o.report.as_ref().map(|r| (o.omega.index, r))),
    )?;
    println!(
        "solve: {} samples, residual census {}, {} converged, {} diverged",
        summary.n_samples, summary.residual_census, summary.converged, summary.diverged
    );
    Ok(if summary.diverged > 0 {
        EXIT_DIVERGENCE
    } else {
        EXIT_OK
    })
}

#[derive(Serialize)]
struct CheckRecord {
    omega_index: u64,
    passes: bool,
    certificate: Option<ContractionCertificate<f64>>,
    error: Option<String>,
}

#[derive(Serialize)]
struct CheckOutput<'a> {
    command: &'static str,
    settings: &'a RunSettings,
    kind: ConditionKind,
    all_pass: bool,
    pass_fraction: f64,
    records: Vec<CheckRecord>,
}

fn check(a: &RunArgs) -> Result<i32, CliError> {
    let setup = fixed_point_setup(a)?;
    let cond = setup
        .condition
        .as_ref()
        .ok_or_else(|| CliError::Validation("check-contraction needs a \"condition\"".into()))?;
    let space = setup.settings.space()?;
    let norm = setup.norm();
    let records = omegas(&space)
        .into_par_iter()
        .map(|w| -> Result<CheckRecord, CliError> {
            let pairs = sample_pairs(&setup.operator, &w, &setup.start, &setup.pairs)?;
            Ok(
                match check_condition(&setup.operator, &w, cond.kind, cond.at(&w), &pairs, &norm) {
                    Ok(c) => CheckRecord {
                        omega_index: w.index,
                        passes: c.passes(),
                        certificate: Some(c),
                        error: None,
                    },
                    Err(e) => CheckRecord {
                        omega_index: w.index,
                        passes: false,
                        certificate: None,
                        error: Some(e.to_string()),
                    },
                },
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let passed = records.iter().filter(|r| r.passes).count();
    let output = CheckOutput {
        command: "check-contraction",
        settings: &setup.settings,
        kind: cond.kind,
        all_pass: passed == records.len(),
        pass_fraction: passed as f64 / records.len() as f64,
        records,
    };
    OutputDir::create(&a.out)?.write_json("summary.json", &output)?;
    println!(
        "check-contraction: {:?} holds at {passed} of {} samples",
        cond.kind,
        output.records.len()
    );
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct KindCount {
    kind: ConditionKind,
    certified: usize,
}

#[derive(Serialize)]
struct ClassifyOutput<'a> {
    command: &'static str,
    settings: &'a RunSettings,
    /// Kinds certified at every sampled ω.
    certified_everywhere: Vec<ConditionKind>,
    kind_counts: Vec<KindCount>,
    classifications: Vec<Classification<f64>>,
}

fn classify_cmd(a: &RunArgs) -> Result<i32, CliError> {
    let setup = fixed_point_setup(a)?;
    let space = setup.settings.space()?;
    let norm = setup.norm();
    let options = ClassifyOptions::default();
    let classifications = omegas(&space)
        .into_par_iter()
        .map(|w| -> Result<Classification<f64>, CliError> {
            let pairs = sample_pairs(&setup.operator, &w, &setup.start, &setup.pairs)?;
            Ok(classify(&setup.operator, &w, &pairs, &norm, &options)?)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let kind_counts: Vec<KindCount> = ConditionKind::ALL
        .into_iter()
        .map(|kind| KindCount {
            kind,
            certified: classifications.iter().filter(|c| c.contains(kind)).count(),
        })
        .collect();
    let certified_everywhere: Vec<ConditionKind> = kind_counts
        .iter()
        .filter(|k| k.certified == classifications.len())
        .map(|k| k.kind)
        .collect();
    let names: Vec<&str> = certified_everywhere.iter().map(|k| k.name()).collect();
    println!(
        "classify: certified at every sample: [{}]",
        names.join(", ")
    );
    OutputDir::create(&a.out)?.write_json(
        "summary.json",
        &ClassifyOutput {
            command: "classify",
            settings: &setup.settings,
            certified_everywhere,
            kind_counts,
            classifications,
        },
    )?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct FeasibilityOutput<'a> {
    command: &'static str,
    settings: &'a RunSettings,
    grid: &'a GridSpec,
    feasible_derived_fraction: f64,
    feasible_stated_fraction: f64,
    /// Samples where both variants fail.
    infeasible: Vec<u64>,
    reports: Vec<FeasibilityReport<f64>>,
}

fn feasibility(a: &RunArgs) -> Result<i32, CliError> {
    let setup = hammerstein_setup(a)?;
    let space = setup.settings.space()?;
    let norm = setup.norm();
    let reports = omegas(&space)
        .into_par_iter()
        .map(|w| check_feasibility(&setup.problem, &w, &norm))
        .collect::<Result<Vec<_>, _>>()?;
    let n = reports.len() as f64;
    let infeasible: Vec<u64> = reports
        .iter()
        .filter(|r| !r.feasible_derived && !r.feasible_stated)
        .map(|r| r.omega_index)
        .collect();
    let output = FeasibilityOutput {
        command: "feasibility",
        settings: &setup.settings,
        grid: &setup.grid,
        feasible_derived_fraction: reports.iter().filter(|r| r.feasible_derived).count() as f64 / n,
        feasible_stated_fraction: reports.iter().filter(|r| r.feasible_stated).count() as f64 / n,
        infeasible,
        reports,
    };
    OutputDir::create(&a.out)?.write_json("summary.json", &output)?;
    println!(
        "feasibility: derived holds at {} of {} samples, stated at {}",
        output.reports.iter().filter(|r| r.feasible_derived).count(),
        output.reports.len(),
        output.reports.iter().filter(|r| r.feasible_stated).count()
    );
    Ok(if output.infeasible.is_empty() {
        EXIT_OK
    } else {
        EXIT_INFEASIBLE
    })
}

#[derive(Serialize)]
struct HammersteinOutput<'a> {
    command: &'static str,
    settings: &'a RunSettings,
    grid: &'a GridSpec,
    forced: bool,
    solution: &'a HammersteinSolution<f64>,
}

fn run_hammerstein(
    setup: &HammersteinSetup,
    force: bool,
) -> Result<HammersteinSolution<f64>, CliError> {
    let space = setup.settings.space()?;
    let opts = HammersteinOptions {
        force,
        run: RunOptions { parallel: true },
    };
    Ok(solve_hammerstein(
        &setup.problem,
        &space,
        &setup.picard(),
        &opts,
    )?)
}

fn hammerstein(a: &RunArgs) -> Result<i32, CliError> {
    let setup = hammerstein_setup(a)?;
    let solution = run_hammerstein(&setup, a.force)?;
    let norm = setup.norm();
    let summary = &solution.summary;
    let out = OutputDir::create(&a.out)?;
    out.write_json(
        "summary.json",
        &HammersteinOutput {
            command: "hammerstein",
            settings: &setup.settings,
            grid: &setup.grid,
            forced: a.force,
            solution: &solution,
        },
    )?;
    out.write("solution.csv", &solution.solution_csv(a.per_omega))?;
    out.write(
        "omega.csv",
        &summary.omega_table_csv(|x| norm.norm_unchecked(x.as_slice())),
    )?;
    out.write_steps(
        summary
            .per_omega
            .iter()
            .filter_map(|o| o.report.as_ref().map(|r| (o.omega.index, r))),
    )?;
    println!(
        "hammerstein: {} samples on {} nodes, residual census {}, {} diverged",
        summary.n_samples, setup.grid.m, summary.residual_census, summary.diverged
    );
    Ok(if summary.diverged > 0 {
        EXIT_DIVERGENCE
    } else {
        EXIT_OK
    })
}

#[derive(Serialize)]
struct BenchOutput<'a> {
    command: &'static str,
    target: &'static str,
    settings: &'a RunSettings,
    threads: usize,
    seconds: Vec<f64>,
    best_seconds: f64,
}

fn bench(b: &BenchArgs) -> Result<i32, CliError> {
    if b.reps == 0 {
        return Err(CliError::Validation("--reps must be at least 1".into()));
    }
    let a = &b.run;
    let file = load(a.input.as_deref(), a.preset.as_deref(), &a.overrides())?;
    let mut seconds = Vec::with_capacity(b.reps);
    let (target, settings) = if file.operator.is_some() {
        let setup = FixedPointSetup::from_file(&file)?;
        for _ in 0..b.reps {
            let t = Instant::now();
            run_solve(&setup)?;
            seconds.push(t.elapsed().as_secs_f64());
        }
        ("solve", setup.settings)
    } else {
        let setup = HammersteinSetup::from_file(&file)?;
        for _ in 0..b.reps {
            let t = Instant::now();
            run_hammerstein(&setup, a.force)?;
            seconds.push(t.elapsed().as_secs_f64());
        }
        ("hammerstein", setup.settings)
    };
    let best_seconds = seconds.iter().copied().fold(f64::INFINITY, f64::min);
    println!(
        "bench: {target}, {} samples, best of {} = {best_seconds:.4} s on {} threads",
        settings.n_samples,
        b.reps,
        rayon::current_num_threads()
    );
    // Timings vary run to run, so bench output is not byte-deterministic.
    OutputDir::create(&a.out)?.write_json(
        "bench.json",
        &BenchOutput {
            command: "bench",
            target,
            settings: &settings,
            threads: rayon::current_num_threads(),
            seconds,
            best_seconds,
        },
    )?;
    Ok(EXIT_OK)
}
