//! Acceptance suite: one PASS/FAIL line per criterion, each with its runtime limit.
//!
//! Runs under a custom harness so the lines are printed in order and the
//! process exits nonzero when any criterion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nalgebra::DVector;
use nullstream::algorithms::*;
use nullstream::config::ProblemConstants;
use nullstream::instances::*;
use nullstream::linalg::gaussian_vector;
use nullstream::marginal::conditioning_acceptance;
use nullstream::reductions::*;
use nullstream::streaming::{run_one_pass, BitState, OnePassAlgorithm, SharedRandomness};
use nullstream::verification::*;
use nullstream::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn() -> std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !($cond) {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Inner algorithm with a fixed answer and no state.
#[derive(Clone)]
struct Fixed(DVector<f64>);

impl OnePassAlgorithm for Fixed {
    type Sample = Equation;
    type Output = DVector<f64>;
    fn update(&self, _: usize, _: &Equation, state: BitState, _: &SharedRandomness) -> Result<BitState> {
        Ok(state)
    }
    fn finalize(&self, _: &BitState, _: &SharedRandomness) -> Result<DVector<f64>> {
        Ok(self.0.clone())
    }
}

fn trivial_baselines() -> std::result::Result<String, String> {
    let d = 200;
    let trials = 100;
    let mut total = 0.0;
    for seed in 0..trials {
        let inst: Instance = ok(gen_anv_gaussian(d, seed))?.into();
        let r = ok(run_registered(AlgorithmName::RandomUnit, &inst, &RunSettings::new(64, seed)))?;
        total += r.metrics["anv_loss"];
    }
    let mean = total / trials as f64;
    let target = (d - 1) as f64 / d as f64;
    ensure!((mean - target).abs() <= 0.05, "random-unit mean anv_loss {mean} vs {target}");
    let c_f = ProblemConstants::default().c_f;
    for seed in 0..20 {
        let anv = ok(gen_anv_conditioned(64, c_f, seed, 10_000))?;
        let lr: Instance = ok(gen_lr_from_anv(&anv, seed))?.into();
        let r = ok(run_registered(AlgorithmName::Zero, &lr, &RunSettings::new(64, seed)))?;
        ensure!(r.metrics["lr_loss"] == c_f * c_f, "zero lr_loss {} ≠ c_f²", r.metrics["lr_loss"]);
    }
    Ok(format!("random-unit mean anv_loss {mean:.4} (target {target:.4}); zero lr_loss = c_f² on 20 instances"))
}

fn offline_solvability() -> std::result::Result<String, String> {
    let mut worst: f64 = 0.0;
    for d in [32, 64] {
        let budget = 64 * d * (d - 1) + 1024;
        let small = RunSettings::new(64 * d, 1);
        for seed in 0..5 {
            let s = RunSettings::new(budget, seed);
            let anv: Instance = ok(gen_anv_gaussian(d, seed))?.into();
            let r = ok(run_registered(AlgorithmName::OfflineKernel, &anv, &s))?;
            worst = worst.max(r.metrics["anv_loss"]);
            let cond = ok(gen_anv_conditioned(d, 0.2, seed, 10_000))?;
            let lr: Instance = ok(gen_lr_from_anv(&cond, seed))?.into();
            let r = ok(run_registered(AlgorithmName::OfflineLstsq, &lr, &s))?;
            worst = worst.max(r.metrics["lr_loss"]);
            for (name, inst) in [(AlgorithmName::OfflineKernel, &anv), (AlgorithmName::OfflineLstsq, &lr)] {
                match run_registered(name, inst, &small) {
                    Err(Error::BudgetViolation { .. }) => {}
                    other => return Err(format!("{name} at budget 64·d = {}: {other:?}", 64 * d)),
                }
            }
        }
    }
    ensure!(worst < 1e-12, "worst loss {worst:e}");
    Ok(format!("worst loss {worst:.2e} at d ∈ {{32, 64}}; BudgetViolation at 64·d"))
}

fn lsp_reduction() -> std::result::Result<String, String> {
    let k = ProblemConstants::default();
    let d = 64;
    let cfg = ReductionConfig::from(&k);
    let bound = 0.9 * k.c_f * k.c1.sqrt() / (d as f64).sqrt();
    let (mut worst_loss, mut min_margin) = (0.0f64, f64::INFINITY);
    for seed in 0..50 {
        let inst = ok(gen_anv_conditioned(d, k.c_f, seed, 10_000))?;
        let lsp = ok(gen_lsp_from_anv(&inst, k.c4()))?;
        min_margin = min_margin.min(lsp.margin());
        let sep = ok(ProjectionSeparator::lossless(d, 2 * (d - 1), 500_000))?;
        let budget = sep.declared_bits();
        let direct = ok(run_one_pass(&sep, lsp.points(), budget, seed))?;
        ensure!(ok(classification_error(&direct, &lsp))? == 0.0, "separator misclassifies at seed {seed}");
        let w = ok(run_one_pass(&anv_via_lsp(sep, cfg), inst.vectors(), budget, seed))?;
        worst_loss = worst_loss.max(ok(anv_loss(&inst, &w))?);
    }
    ensure!(worst_loss <= k.c1, "anv_loss {worst_loss} > c₁");
    ensure!(min_margin >= bound, "margin {min_margin} < {bound}");
    Ok(format!("worst anv_loss {worst_loss:.4} ≤ {}; min margin {min_margin:.5} ≥ {bound:.5}", k.c1))
}

fn lr_reduction() -> std::result::Result<String, String> {
    let k = ProblemConstants::default();
    let d = 64;
    let cfg = ReductionConfig::from(&k);
    let level = k.lr_loss_threshold();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut worst_exact, mut worst_perturbed) = (0.0f64, 0.0f64);
    for seed in 0..50 {
        let inst = ok(gen_anv_conditioned(d, k.c_f, seed, 10_000))?;
        let lr = ok(gen_lr_from_anv(&inst, seed))?;
        let resid = (lr.a() * lr.witness() - lr.b()).norm();
        ensure!(resid <= 1e-10 && lr.witness().norm() <= 1.0 + 1e-12, "seed {seed}: residual {resid:e}");
        let inner = OfflineLstsqSolver::new(d);
        let budget = inner.required_bits();
        let w = ok(run_one_pass(&anv_via_lr(inner, d, cfg), inst.vectors(), budget, seed))?;
        worst_exact = worst_exact.max(ok(anv_loss(&inst, &w))?);
        // Push the witness along random rays until lr_loss sits on the threshold.
        for _ in 0..10 {
            let dir = gaussian_vector(d, &mut rng);
            let (mut lo, mut hi) = (0.0, 10.0);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if ok(lr_loss(&lr, &(lr.witness() + &dir * mid)))? <= level {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let w = lr.witness() + &dir * lo;
            let out = ok(run_one_pass(&anv_via_lr(Fixed(w), d, cfg), inst.vectors(), 1, seed))?;
            worst_perturbed = worst_perturbed.max(ok(anv_loss(&inst, &out))?);
        }
    }
    ensure!(worst_exact < 1e-10, "exact anv_loss {worst_exact:e}");
    ensure!(worst_perturbed <= k.c1, "perturbed anv_loss {worst_perturbed} > c₁");
    Ok(format!(
        "exact anv_loss ≤ {worst_exact:.2e}; 500 boundary perturbations give anv_loss ≤ {worst_perturbed:.4}"
    ))
}

fn protocol_simulation() -> std::result::Result<String, String> {
    let mut checked = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let small_proj = ProjectionConfig {
        dprime: 24,
        subsample: 30,
        ..ProjectionConfig::default()
    };
    for name in AlgorithmName::ALL {
        for i in 0..20u64 {
            let seed = rng.random::<u64>();
            let d = 16;
            let anv = ok(gen_anv_conditioned(d, 0.2, seed, 10_000))?;
            let inst: Instance = match name {
                AlgorithmName::Zero | AlgorithmName::OfflineLstsq => ok(gen_lr_from_anv(&anv, seed))?.into(),
                AlgorithmName::RandomUnit | AlgorithmName::OfflineKernel => anv.into(),
                AlgorithmName::ProjSeparator => ok(gen_lsp_margin(48, 60, 0.3, seed))?.into(),
            };
            let mut s = RunSettings::new(0, seed);
            s.projection = small_proj;
            if i % 2 == 1 {
                s.order = ArrivalOrder::Shuffled;
            }
            s.budget_bits = ok(declared_bits(name, &inst, &s))?.unwrap_or(0).max(64);
            let split = rng.random_range(0..=inst_len(&inst));
            let c = ok(simulate_registered(name, &inst, &s, split))?;
            ensure!(c.identical, "{name} seed {seed}: outputs differ");
            ensure!(c.message_bits == s.budget_bits, "{name}: message {} ≠ budget {}", c.message_bits, s.budget_bits);
            checked += 1;
        }
    }
    Ok(format!("{checked} runs over {} algorithms byte-identical; message = budget", AlgorithmName::ALL.len()))
}

fn inst_len(inst: &Instance) -> usize {
    match inst {
        Instance::Anv(a) => a.vectors().len(),
        Instance::Lsp(l) => l.len(),
        Instance::Lr(r) => r.equations().len(),
    }
}

fn upper_bound_algorithm() -> std::result::Result<String, String> {
    let (d, m, gamma) = (1024, 1000, 0.3);
    let mut good = 0;
    let mut errors = Vec::new();
    for seed in 0..20 {
        let inst: Instance = ok(gen_lsp_margin(d, m, gamma, seed))?.into();
        let mut s = RunSettings::new(0, seed);
        s.budget_bits = ok(declared_bits(AlgorithmName::ProjSeparator, &inst, &s))?.expect("closed form");
        let err = match run_registered(AlgorithmName::ProjSeparator, &inst, &s) {
            Ok(r) => r.metrics["classification_error"],
            Err(Error::NotSeparableInProjection { .. }) => 1.0,
            Err(e) => return Err(e.to_string()),
        };
        errors.push(err);
        if err <= 0.1 {
            good += 1;
        }
    }
    // The footprint is exactly the declared formula: one bit less is refused.
    let inst: Instance = ok(gen_lsp_margin(d, m, gamma, 0))?.into();
    let mut s = RunSettings::new(0, 0);
    let declared = ok(declared_bits(AlgorithmName::ProjSeparator, &inst, &s))?.expect("closed form");
    let expected = 64 + 600 * (1 + 600 * 16);
    ensure!(declared == expected, "declared {declared} ≠ formula {expected}");
    for short in [declared - 1, declared - 8] {
        s.budget_bits = short;
        match run_registered(AlgorithmName::ProjSeparator, &inst, &s) {
            Err(Error::BudgetViolation { required_bits, .. }) if required_bits == declared => {}
            other => return Err(format!("budget {short}: {:?}", other.map(|r| r.metrics))),
        }
    }
    ensure!(good >= 18, "only {good}/20 seeds reach error ≤ 0.1: {errors:?}");
    let worst = errors.iter().copied().fold(0.0, f64::max);
    Ok(format!("{good}/20 seeds with error ≤ 0.1 (worst {worst}); state = {declared} bits, declared − 1 refused"))
}

fn lemma_certificates() -> std::result::Result<String, String> {
    let njs = ok(certify_no_joint_sol(64, 0.5, 0.05, 50, 1))?;
    let control = njs.statistics["control_lambda_min"];
    ensure!(njs.pass_fraction == 1.0 && njs.statistics["evaluated"] > 0.0, "no-joint-sol {:?}", njs.statistics);
    ensure!(control <= 1e-10, "control λ_min {control:e}");
    let (lower, upper) = ok(sandwich_bounds(0.2, 0.5))?;
    ensure!((lower - 0.2926).abs() < 1e-4, "lower bound {lower}");
    let s = 1.2 * 0.5f64.sqrt();
    ensure!((upper - (1.0 - s).powi(-2)).abs() < 1e-12, "upper bound {upper}");
    let sw = ok(certify_sandwich(128, 0.2, 100, 1, 0.95))?;
    ensure!(sw.pass_fraction >= 0.95, "sandwich pass fraction {}", sw.pass_fraction);
    let co = ok(certify_comorth(32, 100, 1))?;
    let dev = co.statistics["max_deviation"];
    ensure!(dev <= 1e-8, "comorth deviation {dev:e}");
    Ok(format!(
        "no-joint-sol pass 1.0 over {} evaluated (min λ {:.4}, control {control:.1e}); sandwich pass {} in [{lower:.4}, {upper:.3}]; comorth max dev {dev:.1e}",
        njs.statistics["evaluated"], njs.statistics["min_lambda_min"], sw.pass_fraction
    ))
}

fn distributional_facts() -> std::result::Result<String, String> {
    let sph = ok(sphere_marginal_tests(64, 100_000, 0.2, 1, MarginalThresholds::default()))?;
    let (ke, kn) = (sph.statistics["ks_exact"], sph.statistics["ks_normal"]);
    ensure!(ke <= 0.01 && kn <= 0.03, "KS exact {ke}, normal {kn}");
    let sv = ok(singular_value_experiment(256, 256, 3.0, 1000, 1))?;
    let (v, a) = (sv.statistics["violation_rate"], sv.statistics["allowed_violation_rate"]);
    ensure!(v <= a, "violation rate {v} > {a}");
    Ok(format!("KS exact {ke:.4}, KS normal {kn:.4}; singular-value violation {v:.4} ≤ {a:.4}"))
}

fn conditioned_generator() -> std::result::Result<String, String> {
    let (d, c_f, attempts) = (64, 0.2, 2000);
    let oracle = ok(conditioning_acceptance(d, c_f))?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut accepted = 0;
    for _ in 0..attempts {
        if let Some(inst) = ok(try_conditioned_draw(d, c_f, &mut rng))? {
            accepted += 1;
            let w = inst.witness();
            ensure!(w[0] >= c_f, "e₁ᵀw* = {}", w[0]);
            for th in inst.vectors() {
                ensure!(th.dot(w).abs() <= 1e-9, "θᵀw* = {:e}", th.dot(w));
            }
        }
    }
    let rate = accepted as f64 / attempts as f64;
    ensure!(rate >= oracle / 2.0 && rate <= oracle * 2.0, "rate {rate} vs oracle {oracle}");
    Ok(format!("acceptance {rate:.4} vs exact {oracle:.4} over {attempts} attempts"))
}

fn main() {
    let criteria: [(&str, Check, u64); 9] = [
        ("trivial-baseline calibration", trivial_baselines, 30),
        ("offline solvability", offline_solvability, 10),
        ("separator reduction soundness", lsp_reduction, 60),
        ("regression reduction soundness", lr_reduction, 60),
        ("one-pass to protocol simulation", protocol_simulation, 30),
        ("projection separator", upper_bound_algorithm, 300),
        ("lemma certificates", lemma_certificates, 300),
        ("distributional facts", distributional_facts, 120),
        ("conditioned generator", conditioned_generator, 60),
    ];
    let filter = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        if filter.as_deref().is_some_and(|f| !name.contains(f)) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if took > Duration::from_secs(*limit) => Err(format!("{msg}; exceeded {limit} s")),
            other => other,
        };
        let (tag, msg) = match &outcome {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failed += 1;
                ("FAIL", m)
            }
        };
        println!("criterion {} {tag} [{name}] {:.1}s: {msg}", i + 1, took.as_secs_f64());
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
