//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;

use randfix_core::hammerstein::{feasibility_from_parts, DiscreteHammerstein};
use randfix_core::picard::picard_solve_observed;
use randfix_core::randomfp::{sample_pairs, PairSampling};
use randfix_core::{
    check_condition, check_feasibility, fit_hr_coefficients, fit_kind, hr_contraction_ratio,
    solve_hammerstein, solve_random_fixed_point, uniqueness_probe, Coefficients, ConditionKind,
    FnOperator, HRCoefficients, HammersteinOptions, HammersteinProblem, NormKind, OmegaSample,
    PicardConfig, ProbabilitySpace, QuadratureGrid, RandomCoefficientSpec, RandomSolveSummary,
    Vector,
};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------- oracles

/// Gaussian elimination with partial pivoting.
fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

// ------------------------------------------------------- affine family

const DIM: usize = 4;

struct Affine {
    a: [[f64; DIM]; DIM],
    b: [f64; DIM],
    /// Frobenius-scaled target, an upper bound on the spectral norm.
    s: f64,
}

impl Affine {
    /// `A = G·s/‖G‖_F` with `‖A‖₂ ≤ ‖A‖_F = s ≤ 0.9`.
    fn draw(omega: &OmegaSample) -> Self {
        let mut rng = omega.rng_stream(101);
        let mut g = [[0.0; DIM]; DIM];
        for row in g.iter_mut() {
            for v in row.iter_mut() {
                *v = rng.gen_range(-1.0..1.0);
            }
        }
        let fro = g.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
        let s = rng.gen_range(0.1..0.9);
        let a = g.map(|row| row.map(|v| v * s / fro));
        let b = [0; DIM].map(|_| rng.gen_range(-5.0..5.0));
        Self { a, b, s }
    }

    fn apply(&self, x: &[f64]) -> Vector<f64> {
        Vector::new(
            (0..DIM)
                .map(|i| self.b[i] + (0..DIM).map(|j| self.a[i][j] * x[j]).sum::<f64>())
                .collect(),
        )
    }

    fn exact(&self) -> Vec<f64> {
        let m = (0..DIM)
            .map(|i| {
                (0..DIM)
                    .map(|j| (if i == j { 1.0 } else { 0.0 }) - self.a[i][j])
                    .collect()
            })
            .collect();
        dense_solve(m, self.b.to_vec())
    }
}

struct AffineFamily {
    space: ProbabilitySpace,
    ops: Arc<Vec<Affine>>,
}

impl AffineFamily {
    fn new(seed: u64, n: u64) -> Self {
        let space = ProbabilitySpace::new(seed, n).unwrap();
        let ops = Arc::new(space.samples().map(|w| Affine::draw(&w)).collect());
        Self { space, ops }
    }

    fn operator(&self) -> FnOperator<impl Fn(&OmegaSample, &Vector<f64>) -> Vector<f64> + Sync> {
        let ops = Arc::clone(&self.ops);
        FnOperator::new(DIM, move |w: &OmegaSample, x: &Vector<f64>| {
            ops[w.index as usize].apply(x.as_slice())
        })
    }

    fn declared(&self) -> RandomCoefficientSpec<f64> {
        let ops = Arc::clone(&self.ops);
        RandomCoefficientSpec::declared(move |w: &OmegaSample| {
            HRCoefficients::banach(ops[w.index as usize].s)
        })
    }
}

fn census_line(label: &str, s: &RandomSolveSummary<f64>) -> (bool, String) {
    (
        s.residual_census == 1.0,
        format!("{label} census={}", s.residual_census),
    )
}

// ------------------------------------------------------------- criteria

fn criterion_1(census: &mut Vec<(bool, String)>) -> Outcome {
    let fam = AffineFamily::new(1, 100);
    let op = fam.operator();
    let cfg = PicardConfig::new(1e-12, 10_000, NormKind::Euclidean);
    let start = Instant::now();
    let summary =
        solve_random_fixed_point(&op, &fam.space, &fam.declared(), &Vector::zeros(DIM), &cfg)
            .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    census.push(census_line("c1", &summary));

    let mut worst: f64 = 0.0;
    let mut matched = 0;
    for (w, x) in summary.fixed_points() {
        let exact = fam.ops[w.index as usize].exact();
        let err = x
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst = worst.max(err);
        matched += 1;
    }
    check(
        matched == 100 && summary.converged == 100 && worst <= 1e-10 && elapsed < 5.0,
        format!("{matched}/100 solved, max sup error {worst:.3e}, {elapsed:.3}s"),
    )
}

/// `T x = c·sin(x − p) + p`; pairs near `p` pin the fitted ratio to `|c|`.
fn sine_family(seed: u64, n: u64, tol: f64) -> Result<RandomSolveSummary<f64>, String> {
    let space = ProbabilitySpace::new(seed, n).unwrap();
    let params = |w: &OmegaSample| (w.uniform_in(1, 0.3, 0.8), w.uniform_in(2, -3.0, 3.0));
    let map = move |w: &OmegaSample, x: &Vector<f64>| {
        let (c, p) = params(w);
        Vector::scalar(c * (x[0] - p).sin() + p)
    };
    let op = Arc::new(FnOperator::new(1, map));
    let sampling = PairSampling::default();
    let fit_op = Arc::clone(&op);
    let fit_sampling = sampling.clone();
    let spec = RandomCoefficientSpec::declared(move |w: &OmegaSample| {
        let (_, p) = params(w);
        let mut pairs = sample_pairs(&*fit_op, w, &Vector::scalar(0.0), &fit_sampling).unwrap();
        for k in 2..7 {
            let y = Vector::scalar(p + 10f64.powi(-k));
            let ty = randfix_core::apply(&*fit_op, w, &y).unwrap();
            pairs.push((y.clone(), ty.clone()));
            pairs.push((ty, y));
        }
        fit_hr_coefficients(&*fit_op, w, &pairs, &NormKind::Euclidean).unwrap()
    })
    .with_pairs(sampling);
    let cfg = PicardConfig::new(tol, 10_000, NormKind::Euclidean);
    solve_random_fixed_point(&*op, &space, &spec, &Vector::scalar(0.0), &cfg)
        .map_err(|e| e.to_string())
}

fn criterion_2(census: &mut Vec<(bool, String)>) -> Outcome {
    let tol = 1e-6;
    // ℝ⁴ scalar-affine operators, fitted on the library's own pair samples.
    let space = ProbabilitySpace::new(2, 25).unwrap();
    let op = FnOperator::new(DIM, |w: &OmegaSample, x: &Vector<f64>| {
        let c = w.uniform_in(1, -0.85, 0.85);
        Vector::new(
            x.iter()
                .enumerate()
                .map(|(i, &v)| c * v + w.uniform_in(2 + i as u64, -4.0, 4.0))
                .collect(),
        )
    });
    let cfg = PicardConfig::new(tol, 10_000, NormKind::Euclidean);
    let affine = solve_random_fixed_point(
        &op,
        &space,
        &RandomCoefficientSpec::fitted(),
        &Vector::zeros(DIM),
        &cfg,
    )
    .map_err(|e| e.to_string())?;
    census.push(census_line("c2-affine", &affine));
    let sine = sine_family(3, 25, tol)?;
    census.push(census_line("c2-sine", &sine));

    let mut operators = 0;
    let mut ratios = 0;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut max_sum: f64 = 0.0;
    for o in affine.per_omega.iter().chain(&sine.per_omega) {
        let (Some(c), Some(r)) = (&o.coefficients, &o.report) else {
            return Err(format!(
                "omega {} has no fitted coefficients or report",
                o.omega.index
            ));
        };
        if !o.certified() {
            return Err(format!("omega {} not certified", o.omega.index));
        }
        max_sum = max_sum.max(c.sum());
        let k = hr_contraction_ratio(c).map_err(|e| e.to_string())?;
        for &q in &r.ratio_estimates {
            worst_excess = worst_excess.max(q - k);
            ratios += 1;
        }
        operators += 1;
    }
    check(
        operators == 50 && max_sum < 0.9 && worst_excess <= 1e-6,
        format!("{operators} operators, max fitted sum {max_sum:.4}, {ratios} ratios, max(ratio - k) {worst_excess:.3e}"),
    )
}

fn criterion_3(census: &mut Vec<(bool, String)>) -> Outcome {
    let tol = 1e-9;
    let fam = AffineFamily::new(4, 50);
    let op = fam.operator();
    let cfg = PicardConfig::new(tol, 10_000, NormKind::Euclidean);
    let mut rng = OmegaSample::from_seed(0, 99).rng_stream(5);
    let starts: Vec<Vector<f64>> = (0..10)
        .map(|_| Vector::new((0..DIM).map(|_| rng.gen_range(-20.0..20.0)).collect()))
        .collect();
    let report = uniqueness_probe(&op, &fam.space, &fam.declared(), &starts, &cfg)
        .map_err(|e| e.to_string())?;
    let summary = solve_random_fixed_point(&op, &fam.space, &fam.declared(), &starts[0], &cfg)
        .map_err(|e| e.to_string())?;
    census.push(census_line("c3", &summary));
    check(
        report.certified
            && report.non_converged == 0
            && report.diverged == 0
            && report.spread <= 2.0 * tol,
        format!(
            "10 starts x {} omegas, spread {:.3e} (limit {:.1e}), certified {}",
            report.per_omega_spread.len(),
            report.spread,
            2.0 * tol,
            report.certified
        ),
    )
}

fn criterion_4(census: &[(bool, String)]) -> Outcome {
    let ok = census.len() == 4 && census.iter().all(|(ok, _)| *ok);
    let detail = census
        .iter()
        .map(|(_, s)| s.as_str())
        .collect::<Vec<_>>()
        .join(", ");
    check(ok, detail)
}

fn criterion_5() -> Outcome {
    let kinds = [
        ConditionKind::Banach,
        ConditionKind::Kannan,
        ConditionKind::Chatterjea,
        ConditionKind::Reich,
    ];
    let space = ProbabilitySpace::new(5, 200).unwrap();
    // x ↦ c·Q(θ)x + b on ℝ², Q a rotation; Kannan and Chatterjea hold with
    // ratio c/(1−c) ≤ 1/3.
    let op = FnOperator::new(2, |w: &OmegaSample, x: &Vector<f64>| {
        let c = w.uniform_in(1, 0.02, 0.25);
        let th = w.uniform_in(2, 0.0, std::f64::consts::TAU);
        let (s, co) = th.sin_cos();
        Vector::new(vec![
            c * (co * x[0] - s * x[1]) + w.uniform_in(3, -2.0, 2.0),
            c * (s * x[0] + co * x[1]) + w.uniform_in(4, -2.0, 2.0),
        ])
    });
    let norm = NormKind::Euclidean;
    let mut certified = 0;
    let mut reembedded = 0;
    let mut worst = f64::INFINITY;
    for (i, w) in space.samples().enumerate() {
        let kind = kinds[i % kinds.len()];
        let pairs = sample_pairs(&op, &w, &Vector::zeros(2), &PairSampling::default())
            .map_err(|e| e.to_string())?;
        let fitted = fit_kind(&op, &w, kind, &pairs, &norm).map_err(|e| e.to_string())?;
        let Ok(cert) = check_condition(
            &op,
            &w,
            kind,
            Coefficients::HardyRogers(fitted),
            &pairs,
            &norm,
        ) else {
            continue;
        };
        if !cert.passes() {
            continue;
        }
        certified += 1;
        let padded = cert.hardy_rogers().ok_or("special kind did not embed")?;
        let hr = check_condition(
            &op,
            &w,
            ConditionKind::HardyRogers,
            Coefficients::HardyRogers(padded),
            &pairs,
            &norm,
        )
        .map_err(|e| e.to_string())?;
        worst = worst.min(hr.margin);
        if hr.margin >= -1e-9 {
            reembedded += 1;
        }
    }
    check(
        certified == 200 && reembedded == 200,
        format!("{certified}/200 certified (50 per kind), {reembedded} re-certified as HardyRogers, min margin {worst:.3e}"),
    )
}

fn criterion_6() -> Outcome {
    let space = ProbabilitySpace::new(6, 50).unwrap();
    let op = FnOperator::new(2, |w: &OmegaSample, x: &Vector<f64>| {
        let c = w.uniform_in(1, -0.5, 0.5);
        x.map(|v| c * v + w.uniform_in(2, -1.0, 1.0))
    });
    let mut annotated = 0;
    for w in space.samples() {
        let c = w.uniform_in(1, -0.5, 0.5).abs();
        let a1 = c + 0.01;
        let a3 = w.uniform_in(10, 0.0, 0.2);
        let t = w.uniform_in(11, 0.0, (0.99 - a1 - a3) / 2.0);
        let coeffs = HRCoefficients::new(a1, 0.0, a3, t, t);
        let pairs = sample_pairs(&op, &w, &Vector::zeros(2), &PairSampling::default())
            .map_err(|e| e.to_string())?;
        let cert = check_condition(
            &op,
            &w,
            ConditionKind::HardyRogers,
            Coefficients::HardyRogers(coeffs),
            &pairs,
            &NormKind::Euclidean,
        )
        .map_err(|e| e.to_string())?;
        if !cert.passes() {
            return Err(format!("constructed instance {} did not certify", w.index));
        }
        match cert.gregus_annotation() {
            Some(g) if g.a == a1 && g.c == t => annotated += 1,
            _ => return Err(format!("instance {} has no Gregus annotation", w.index)),
        }
    }
    check(
        annotated == 50,
        format!("{annotated}/50 constructed certificates annotated"),
    )
}

fn separable_problem(m: usize, lambda: f64) -> HammersteinProblem<f64> {
    HammersteinProblem::new(
        QuadratureGrid::trapezoid(m).unwrap(),
        |w: &OmegaSample, t: f64, s: f64| w.uniform_in(1, 0.5, 1.5) * t * s,
        |_: &OmegaSample, t: f64| t,
        move |_: f64, x: f64| lambda * x,
        2.0,
        HRCoefficients::banach(lambda),
    )
    .unwrap()
}

/// Max nodal error per ω against `x(t) = t(1 + aλβ)`, `β = (1/3)/(1 − aλ/3)`.
fn separable_errors(m: usize, lambda: f64, space: &ProbabilitySpace) -> Result<Vec<f64>, String> {
    let p = separable_problem(m, lambda);
    let cfg = PicardConfig::new(1e-14, 1000, NormKind::Sup);
    let sol = solve_hammerstein(&p, space, &cfg, &HammersteinOptions::default())
        .map_err(|e| e.to_string())?;
    sol.summary
        .per_omega
        .iter()
        .map(|o| {
            let r = o
                .report
                .as_ref()
                .filter(|r| r.converged())
                .ok_or("solve did not converge")?;
            let a = o.omega.uniform_in(1, 0.5, 1.5);
            let beta = (1.0 / 3.0) / (1.0 - a * lambda / 3.0);
            Ok(p.grid
                .nodes
                .iter()
                .zip(r.fixed_point.iter())
                .map(|(&t, &x)| (x - t * (1.0 + a * lambda * beta)).abs())
                .fold(0.0, f64::max))
        })
        .collect()
}

fn criterion_7() -> Outcome {
    let lambda = 0.05;
    let space = ProbabilitySpace::new(7, 20).unwrap();
    let fine = separable_errors(129, lambda, &space)?;
    let coarse = separable_errors(65, lambda, &space)?;
    let worst = fine.iter().copied().fold(0.0, f64::max);
    let ratios: Vec<f64> = coarse.iter().zip(&fine).map(|(c, f)| c / f).collect();
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &r| {
            (l.min(r), h.max(r))
        });
    check(
        worst <= 1e-6 && lo >= 3.0 && hi <= 5.0,
        format!("{} omegas, max error at m=129 {worst:.3e}, error ratio m=65/m=129 in [{lo:.4}, {hi:.4}]", fine.len()),
    )
}

struct Hparams {
    kappa: f64,
    gamma: f64,
    amp: f64,
    lip: f64,
    g: f64,
}

fn hammerstein_problem(hp: &Hparams, rho: f64) -> HammersteinProblem<f64> {
    let (kappa, gamma, amp, lip, g) = (hp.kappa, hp.gamma, hp.amp, hp.lip, hp.g);
    HammersteinProblem::new(
        QuadratureGrid::gauss_legendre(24).unwrap(),
        move |w: &OmegaSample, t: f64, s: f64| {
            kappa * (0.8 + 0.4 * w.uniform(1)) * (-gamma * (t - s).abs()).exp()
        },
        move |w: &OmegaSample, t: f64| amp * (1.0 + w.uniform(2)) * (3.0 * t).sin(),
        move |s: f64, x: f64| lip * x.sin() + g * s,
        rho,
        HRCoefficients::banach(lip),
    )
    .unwrap()
}

fn criterion_8() -> Outcome {
    let mut rng = OmegaSample::from_seed(0, 8).rng_stream(8);
    let space = ProbabilitySpace::new(8, 4).unwrap();
    let mut problems = 0;
    let mut iterates = 0usize;
    let mut worst_excess = f64::NEG_INFINITY;
    for i in 0..100 {
        let hp = Hparams {
            kappa: rng.gen_range(0.2..1.2),
            gamma: rng.gen_range(0.5..4.0),
            amp: rng.gen_range(0.0..2.0),
            lip: rng.gen_range(0.1..0.9),
            g: rng.gen_range(-1.0..1.0),
        };
        let p1 = hammerstein_problem(&hp, 1.0);
        let norm = if i % 2 == 0 {
            NormKind::Sup
        } else {
            NormKind::WeightedL2(p1.grid.weights.clone())
        };
        // Smallest feasible radius over ω, then a random margin above it.
        let mut rho_min: f64 = 0.0;
        for w in space.samples() {
            let r = check_feasibility(&p1, &w, &norm).map_err(|e| e.to_string())?;
            if r.rhs_derived <= 0.0 {
                return Err(format!("problem {i}: l·L ≥ 1, no feasible radius"));
            }
            rho_min = rho_min.max(r.lhs / r.rhs_derived);
        }
        let rho = rho_min * rng.gen_range(1.001..1.5);
        let p = hammerstein_problem(&hp, rho);
        let cfg = PicardConfig::new(1e-10, 400, norm.clone());

        solve_hammerstein(&p, &space, &cfg, &HammersteinOptions::default())
            .map_err(|e| format!("problem {i}: {e}"))?;
        for w in space.samples() {
            let op = DiscreteHammerstein::new(&p, &w).map_err(|e| e.to_string())?;
            let x0 = Vector::zeros(p.grid.len());
            picard_solve_observed(&op, &w, &x0, None, &cfg, |_, x| {
                worst_excess = worst_excess.max(norm.norm_unchecked(x.as_slice()) - rho);
                iterates += 1;
                true
            })
            .map_err(|e| format!("problem {i}: {e}"))?;
        }
        problems += 1;
    }
    check(
        problems == 100 && worst_excess <= 1e-9,
        format!("{problems} problems x 4 omegas, {iterates} iterates, max(norm - rho) {worst_excess:.3e}"),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = OmegaSample::from_seed(0, 9).rng_stream(9);
    let mut stated = 0;
    let mut derived = 0;
    let mut counterexamples = 0;
    for _ in 0..500 {
        let raw: Vec<f64> = (0..5).map(|_| rng.gen_range(0.0..1.0)).collect();
        let total = rng.gen_range(0.0..0.99);
        let sum: f64 = raw.iter().sum();
        let a: Vec<f64> = raw.iter().map(|v| v / sum * total).collect();
        let c = HRCoefficients::new(a[0], a[1], a[2], a[3], a[4]);
        let r = feasibility_from_parts(
            rng.gen_range(0.0..3.0),
            rng.gen_range(0.0..3.0),
            rng.gen_range(0.0..1.0),
            rng.gen_range(0.0..20.0),
            &c,
        )
        .map_err(|e| e.to_string())?;
        stated += r.feasible_stated as usize;
        derived += r.feasible_derived as usize;
        if r.feasible_stated && !r.feasible_derived {
            counterexamples += 1;
        }
    }
    check(
        counterexamples == 0 && stated > 0,
        format!("500 draws, {stated} feasible (stated), {derived} feasible (derived), {counterexamples} counterexamples"),
    )
}

fn read_tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(dir: &Path, root: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(&path, root, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().display().to_string();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

fn criterion_10() -> Outcome {
    let runs: [&[&str]; 5] = [
        &[
            "solve",
            "--preset",
            "scalar-affine",
            "--seed",
            "42",
            "--samples",
            "100",
        ],
        &[
            "solve",
            "--preset",
            "rotation-2d",
            "--seed",
            "7",
            "--samples",
            "64",
        ],
        &[
            "hammerstein",
            "--preset",
            "convolution",
            "--seed",
            "3",
            "--samples",
            "16",
            "--per-omega",
        ],
        &["classify", "--preset", "scaling-0.4", "--samples", "16"],
        &[
            "feasibility",
            "--preset",
            "green",
            "--samples",
            "16",
            "--norm",
            "l2",
        ],
    ];
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = 0;
    for (i, args) in runs.iter().enumerate() {
        let mut trees = Vec::new();
        for (j, threads) in ["1", "4", "4"].iter().enumerate() {
            let out = tmp.path().join(format!("run{i}_{j}"));
            let status = Command::new(env!("CARGO_BIN_EXE_randfix"))
                .args(*args)
                .args(["--threads", threads, "--out"])
                .arg(&out)
                .output()
                .map_err(|e| e.to_string())?;
            if !status.status.success() {
                return Err(format!(
                    "{args:?} exited with {:?}: {}",
                    status.status.code(),
                    String::from_utf8_lossy(&status.stderr)
                ));
            }
            trees.push(read_tree(&out));
        }
        if !trees[0].contains_key("summary.json") {
            return Err(format!("{args:?} wrote no summary.json"));
        }
        if trees[0] != trees[1] || trees[1] != trees[2] {
            return Err(format!("{args:?}: outputs differ between runs"));
        }
        files += trees[0].len();
    }
    Ok(format!(
        "{} configurations x 3 runs (threads 1, 4, 4), {files} files byte-identical",
        runs.len()
    ))
}

fn main() {
    let mut census = Vec::new();
    let results: Vec<(&str, Outcome)> = vec![
        ("1 affine oracle equivalence", criterion_1(&mut census)),
        ("2 rate soundness", criterion_2(&mut census)),
        ("3 uniqueness", criterion_3(&mut census)),
        ("4 residual census", criterion_4(&census)),
        ("5 implication lattice", criterion_5()),
        ("6 Gregus annotation", criterion_6()),
        ("7 separable Hammerstein oracle", criterion_7()),
        ("8 ball invariance", criterion_8()),
        ("9 feasibility ordering", criterion_9()),
        ("10 determinism", criterion_10()),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(d) => println!("criterion {name}: PASS ({d})"),
            Err(d) => {
                failed += 1;
                println!("criterion {name}: FAIL ({d})");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
