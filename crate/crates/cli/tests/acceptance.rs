//! One line per acceptance criterion; exits non-zero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use ampshield_cli::figures::FigureId;
use ampshield_cli::verify::{simulated_crossing, simulated_esd, Variant};
use ampshield_cli::{run_verify, VerifyHooks};
use ampshield_core::metrics::concurrence_pure;
use ampshield_core::protocols::closed_form as cf;
use ampshield_core::protocols::{
    damp_env, damp_null, extended_protect, protect, recover_iterative, recovery_angle, recovery_round,
};
use ampshield_core::{
    concurrence_mixed, fidelity_pure_mixed, DampingParams, PartialTrace, SchemeParams, TwoQubitCoeffs,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn dp(p: f64) -> DampingParams {
    DampingParams::new(p).unwrap()
}

fn fig3a() -> TwoQubitCoeffs {
    TwoQubitCoeffs::real(0.7, 0.35, 0.4, 0.48).unwrap()
}

fn fig3b() -> TwoQubitCoeffs {
    TwoQubitCoeffs::real(0.10, 0.55, -0.60, 0.57).unwrap()
}

fn draw(rng: &mut ChaCha8Rng, complex: bool) -> TwoQubitCoeffs {
    let mut c = [Complex64::new(0.0, 0.0); 4];
    for z in &mut c {
        let im = if complex { rng.gen_range(-1.0..1.0) } else { 0.0 };
        *z = Complex64::new(rng.gen_range(-1.0..1.0), im);
    }
    TwoQubitCoeffs::from_array(c).unwrap()
}

fn coeff_set(seed: u64, n: usize, complex: bool) -> Vec<TwoQubitCoeffs> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| draw(&mut rng, complex)).collect()
}

fn p_nine() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit: f64) -> bool {
    elapsed.as_secs_f64() < limit
}

fn exact_recovery() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for c in coeff_set(11, 200, true) {
        for p in p_nine() {
            let (_, damped) = damp_null(&c, dp(p)).unwrap();
            let branches = recovery_round(&damped, recovery_angle((1.0 - p).sqrt())).unwrap();
            worst = worst.max(branches[0].post_state.phase_distance(&c.to_state()).unwrap());
        }
    }
    let t = start.elapsed();
    check(
        worst < 1e-12 && within(t, 1.0),
        format!("max distance {worst:.2e} over 1800 states in {t:.2?}"),
    )
}

fn success_probabilities() -> Outcome {
    let start = Instant::now();
    let c = fig3b();
    let mut worst = 0.0f64;
    let mut ordered = true;
    for k in 1..=20 {
        let q = k as f64 * 0.05;
        let mut prev = 0.0;
        for n in 1..=3 {
            let sim = recover_iterative(&c, dp(1.0 - q), n).unwrap().success_probability;
            worst = worst.max((sim - cf::success_prob_closed(n, q).unwrap()).abs());
            ordered &= sim >= prev - 1e-15 && sim <= q * q + 1e-15;
            prev = sim;
        }
    }
    let exact = cf::success_prob_closed(1, 1.0).unwrap() == 0.25 && cf::success_prob_closed(2, 1.0).unwrap() == 0.5625;
    let t = start.elapsed();
    check(
        worst < 1e-12 && exact && ordered && within(t, 5.0),
        format!("max deviation {worst:.2e}, q=1 exact {exact}, monotone and bounded {ordered}, {t:.2?}"),
    )
}

fn recovered_state() -> Outcome {
    let mut state_dev = 0.0f64;
    let mut printed_dev = 0.0f64;
    let mut actual_dev = 0.0f64;
    for c in coeff_set(13, 100, false) {
        for p in p_nine() {
            let run = protect(&c, dp(p)).unwrap();
            state_dev = state_dev.max(run.recovered.max_abs_diff(&cf::recovered_density(&c, p).unwrap()));
            printed_dev = printed_dev.max((run.success_probability - cf::protect_probability_printed(&c, p)).abs());
            actual_dev = actual_dev.max((run.success_probability - cf::protect_probability(&c, p)).abs());
        }
    }
    check(
        state_dev < 1e-12 && printed_dev < 1e-12,
        format!(
            "density deviation {state_dev:.2e}; probability vs quoted formula {printed_dev:.2e} (vs q^2 N/(1+q)^2: {actual_dev:.2e})"
        ),
    )
}

fn concurrence_grid() -> Outcome {
    let mut worst = 0.0f64;
    let mut points = 0;
    for c in coeff_set(17, 56, false) {
        for p in p_nine() {
            let damped = damp_env(&c, dp(p)).unwrap().partial_trace(&[0, 1]).unwrap();
            let rec = protect(&c, dp(p)).unwrap().recovered;
            worst = worst.max((concurrence_mixed(&damped).unwrap().value() - cf::damped_concurrence(&c, p)).abs());
            worst = worst.max((concurrence_mixed(&rec).unwrap().value() - cf::recovered_concurrence(&c, p)).abs());
            points += 1;
        }
    }
    let esd = simulated_esd(&fig3a()).unwrap().unwrap_or(f64::NAN);
    check(
        worst < 1e-10 && (esd - 0.8507).abs() < 1e-4,
        format!("max deviation {worst:.2e} over {points} points, sudden death at p={esd:.6}"),
    )
}

fn crossing() -> Outcome {
    let c = fig3b();
    let sim = simulated_crossing(&c).unwrap().unwrap_or(f64::NAN);
    let closed = cf::crossing_threshold(&c).unwrap_or(f64::NAN);
    check(
        (sim - closed).abs() < 1e-6,
        format!("simulated {sim:.9}, closed form {closed:.9}"),
    )
}

fn extended_reduction() -> Outcome {
    let mut worst = 0.0f64;
    let mut unit = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for c in coeff_set(23, 200, true) {
        let p: f64 = rng.gen_range(0.05..0.95);
        let x: f64 = rng.gen_range(0.05..1.0);
        let ext = extended_protect(&c, SchemeParams::new(dp(p), x).unwrap())
            .unwrap()
            .recovered;
        worst = worst.max(ext.max_abs_diff(&protect(&c, dp(p * x)).unwrap().recovered));
        let ext1 = extended_protect(&c, SchemeParams::basic(dp(p))).unwrap().recovered;
        unit = unit.max(ext1.max_abs_diff(&protect(&c, dp(p)).unwrap().recovered));
    }
    check(
        worst < 1e-12 && unit < 1e-12,
        format!("max deviation {worst:.2e}, x=1 deviation {unit:.2e}"),
    )
}

fn fidelity() -> Outcome {
    let mut at_zero = 0.0f64;
    for c in [fig3a(), fig3b()] {
        let psi = c.to_state();
        let damped = damp_env(&c, dp(0.0)).unwrap().partial_trace(&[0, 1]).unwrap();
        let ext = extended_protect(&c, SchemeParams::new(dp(0.0), 0.3).unwrap())
            .unwrap()
            .recovered;
        for rho in [damped, protect(&c, dp(0.0)).unwrap().recovered, ext] {
            at_zero = at_zero.max((fidelity_pure_mixed(&psi, &rho).unwrap().value() - 1.0).abs());
        }
    }
    let c = fig3a();
    let f = |x: f64| {
        let rho = extended_protect(&c, SchemeParams::new(dp(0.5), x).unwrap())
            .unwrap()
            .recovered;
        fidelity_pure_mixed(&c.to_state(), &rho).unwrap().value()
    };
    let (weak, basic) = (f(1e-4), f(1.0));
    let (mut formula, mut damped_formula) = (0.0f64, 0.0f64);
    for c in coeff_set(29, 56, false) {
        let psi = c.to_state();
        for p in p_nine() {
            let rec = protect(&c, dp(p)).unwrap().recovered;
            let sim = fidelity_pure_mixed(&psi, &rec).unwrap().value();
            formula = formula.max((sim - cf::recovered_fidelity(&c, p).unwrap()).abs());
            let rho = damp_env(&c, dp(p)).unwrap().partial_trace(&[0, 1]).unwrap();
            let sim = fidelity_pure_mixed(&psi, &rho).unwrap().value();
            damped_formula = damped_formula.max((sim - cf::damped_fidelity(&c, p).unwrap()).abs());
        }
    }
    check(
        at_zero < 1e-12 && weak > basic && weak > 0.999 && formula < 1e-10 && damped_formula < 1e-10,
        format!(
            "p=0 deviation {at_zero:.2e}, x->0 fidelity {weak:.6} vs x=1 {basic:.6}, \
             recovered formula {formula:.2e}, damped formula {damped_formula:.2e}"
        ),
    )
}

fn adjudication() -> Outcome {
    let report = run_verify(VerifyHooks::default(), 0).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    let mut ok = true;
    for id in ["extended-concurrence", "extended-fidelity"] {
        let a = report
            .check(id)
            .and_then(|c| c.adjudication.clone())
            .ok_or(format!("{id} missing"))?;
        ok &= matches!(a.matching, Variant::Printed | Variant::Corrected);
        parts.push(format!(
            "{id}: {:?} matches (printed {:.2e}, corrected {:.2e})",
            a.matching, a.printed_deviation, a.corrected_deviation
        ));
    }
    check(ok, parts.join("; "))
}

fn figure_determinism() -> Outcome {
    let start = Instant::now();
    let dirs: Vec<_> = (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    for (dir, threads) in dirs.iter().zip(["1", "4"]) {
        let out = Command::new(env!("CARGO_BIN_EXE_ampshield"))
            .args(["fig", "--id", "all", "--out"])
            .arg(dir.path())
            .env("AMPSHIELD_THREADS", threads)
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("fig exited with {}", out.status));
        }
    }
    let t = start.elapsed();
    let identical = FigureId::ALL.iter().all(|id| {
        let read = |d: &tempfile::TempDir| std::fs::read(d.path().join(id.file_name())).ok();
        read(&dirs[0]).is_some() && read(&dirs[0]) == read(&dirs[1])
    });
    check(
        identical && within(t, 10.0),
        format!(
            "{} figures byte-identical across runs {identical}, two runs in {t:.2?}",
            FigureId::ALL.len()
        ),
    )
}

fn main() -> ExitCode {
    // sanity: the caption states are entangled to begin with
    assert!(concurrence_pure(&fig3a()).value() > 0.0);
    let criteria: [Criterion; 9] = [
        ("null-result recovery restores the input", exact_recovery),
        ("iterated recovery success probabilities", success_probabilities),
        ("recovered state and success probability", recovered_state),
        ("damped and recovered concurrence", concurrence_grid),
        ("protection crossing point", crossing),
        ("extended scheme reduces to basic protection", extended_reduction),
        ("fidelity limits and formula", fidelity),
        ("extended scheme formula adjudication", adjudication),
        ("figure determinism and runtime", figure_determinism),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS  criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL  criterion {}: {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
