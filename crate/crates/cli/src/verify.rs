//! Brute-force simulation checked against every closed form.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use ampshield_core::channels::Completion;
use ampshield_core::metrics::{concurrence_margin, concurrence_pure};
use ampshield_core::protocols::closed_form as cf;
use ampshield_core::protocols::{
    damp_env, damp_null, extended_protect, prepare_robust, protect, protect_with, recover_iterative, recovery_angle,
    recovery_round,
};
use ampshield_core::{
    concurrence_mixed, fidelity_pure_mixed, pure_to_density, DampingParams, DensityMatrix, PartialTrace, Role,
    SchemeParams, StateVector, TwoQubitCoeffs,
};

use crate::error::CliResult;
use crate::runtime::ordered_map;

pub type ConcurrenceFn = fn(&DensityMatrix) -> ampshield_core::Result<f64>;

fn clamped_concurrence(rho: &DensityMatrix) -> ampshield_core::Result<f64> {
    Ok(concurrence_mixed(rho)?.value())
}

/// Replaceable pieces of the pipeline, so tests can inject faults.
#[derive(Clone, Copy)]
pub struct VerifyHooks {
    pub concurrence: ConcurrenceFn,
}

impl Default for VerifyHooks {
    fn default() -> Self {
        VerifyHooks {
            concurrence: clamped_concurrence,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// Simulation agrees with one formula.
    Match,
    /// A structural property of the simulation.
    Property,
    /// A published formula and a corrected one, of which exactly one must agree.
    Adjudication,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Printed,
    Corrected,
    Both,
    Neither,
}

#[derive(Debug, Clone, Serialize)]
pub struct Adjudication {
    pub matching: Variant,
    pub printed_deviation: f64,
    pub corrected_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub id: &'static str,
    pub description: &'static str,
    pub kind: CheckKind,
    pub passed: bool,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub points: usize,
    pub adjudication: Option<Adjudication>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub checks: Vec<CheckReport>,
}

impl VerifyReport {
    pub fn failed(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.id).collect()
    }

    pub fn check(&self, id: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            match &c.adjudication {
                Some(a) => {
                    let verdict = match a.matching {
                        Variant::Printed => format!(
                            "printed form matches (max dev {:.2e}); corrected form deviates by {:.2e}",
                            a.printed_deviation, a.corrected_deviation
                        ),
                        Variant::Corrected => format!(
                            "corrected form matches (max dev {:.2e}); printed form deviates by {:.2e}",
                            a.corrected_deviation, a.printed_deviation
                        ),
                        Variant::Both => format!(
                            "both forms match (printed {:.2e}, corrected {:.2e})",
                            a.printed_deviation, a.corrected_deviation
                        ),
                        Variant::Neither => format!(
                            "neither form matches (printed {:.2e}, corrected {:.2e})",
                            a.printed_deviation, a.corrected_deviation
                        ),
                    };
                    let _ = writeln!(
                        out,
                        "{status}  {:<30} {verdict} (tol {:.0e}, {} pts)",
                        c.id, c.tolerance, c.points
                    );
                }
                None => {
                    let _ = writeln!(
                        out,
                        "{status}  {:<30} max dev {:.2e} (tol {:.0e}, {} pts)  {}",
                        c.id, c.max_deviation, c.tolerance, c.points, c.description
                    );
                }
            }
        }
        let failed = self.failed();
        if failed.is_empty() {
            let _ = writeln!(out, "all {} checks passed", self.checks.len());
        } else {
            let _ = writeln!(
                out,
                "{} of {} checks failed: {}",
                failed.len(),
                self.checks.len(),
                failed.join(", ")
            );
        }
        out
    }
}

/// Shared sample points.
pub struct Samples {
    pub real: Vec<TwoQubitCoeffs>,
    pub complex: Vec<TwoQubitCoeffs>,
    pub p: Vec<f64>,
    /// Survival probabilities for the coefficient-free success checks.
    pub q: Vec<f64>,
    pub x: Vec<f64>,
}

impl Samples {
    pub fn standard() -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(2718);
        let mut draw = |complex: bool| {
            let mut c = [Complex64::new(0.0, 0.0); 4];
            for z in &mut c {
                let im = if complex { rng.gen_range(-1.0..1.0) } else { 0.0 };
                *z = Complex64::new(rng.gen_range(-1.0..1.0), im);
            }
            TwoQubitCoeffs::from_array(c).expect("random draw is non-zero")
        };
        let mut real = vec![
            TwoQubitCoeffs::real(0.7, 0.35, 0.4, 0.48).unwrap(),
            TwoQubitCoeffs::real(0.10, 0.55, -0.60, 0.57).unwrap(),
        ];
        real.extend((0..12).map(|_| draw(false)));
        let complex = (0..12).map(|_| draw(true)).collect();
        Samples {
            real,
            complex,
            p: (0..20).map(|i| i as f64 / 20.0).collect(),
            q: (1..=20).map(|i| i as f64 / 20.0).collect(),
            x: vec![0.1, 0.5, 0.8],
        }
    }

    fn all(&self) -> impl Iterator<Item = &TwoQubitCoeffs> {
        self.real.iter().chain(&self.complex)
    }
}

pub struct Ctx<'a> {
    pub hooks: VerifyHooks,
    pub samples: &'a Samples,
}

/// Largest deviation seen over a set of points.
#[derive(Default)]
struct Tally {
    max: f64,
    points: usize,
}

impl Tally {
    fn add(&mut self, dev: f64) {
        // NaN counts as an unbounded deviation
        self.max = if dev.is_nan() { f64::INFINITY } else { self.max.max(dev) };
        self.points += 1;
    }
}

struct PairTally {
    printed: Tally,
    corrected: Tally,
}

impl PairTally {
    fn new() -> Self {
        PairTally {
            printed: Tally::default(),
            corrected: Tally::default(),
        }
    }

    fn add(&mut self, sim: f64, printed: f64, corrected: f64) {
        self.printed.add((sim - printed).abs());
        self.corrected.add((sim - corrected).abs());
    }
}

enum Measured {
    Single(Tally),
    Pair(PairTally),
}

fn dp(p: f64) -> DampingParams {
    DampingParams::new(p).expect("sample grid lies in [0, 1]")
}

fn sys_state(amps: [Complex64; 4]) -> StateVector {
    StateVector::new(amps.to_vec(), vec![Role::System; 2]).expect("two-qubit register")
}

fn null_result_state(ctx: &Ctx) -> CliResult<Measured> {
    let mut t = Tally::default();
    for c in ctx.samples.all() {
        for &p in &ctx.samples.p {
            let q = 1.0 - p;
            let (prob, s) = damp_null(c, dp(p))?;
            t.add((prob - cf::null_result_normalizer_sq(c, q)).abs());
            t.add(s.phase_distance(&sys_state(cf::null_result_amplitudes(c, q)))?);
        }
    }
    Ok(Measured::Single(t))
}

fn branch_probabilities(ctx: &Ctx) -> CliResult<Measured> {
    let mut t = PairTally::new();
    for c in ctx.samples.all() {
        for &q in &ctx.samples.q {
            let (_, s) = damp_null(c, dp(1.0 - q))?;
            let branches = recovery_round(&s, recovery_angle(q.sqrt()))?;
            let printed = cf::recovery_branch_probabilities_printed(c, q);
            let corrected = cf::recovery_branch_probabilities(c, q);
            for (i, b) in branches.iter().enumerate() {
                t.add(b.probability, printed[i], corrected[i]);
            }
        }
    }
    Ok(Measured::Pair(t))
}

fn success_rounds(ctx: &Ctx, n: usize) -> CliResult<Measured> {
    let mut t = Tally::default();
    let c = &ctx.samples.real[1];
    for &q in &ctx.samples.q {
        let sim = recover_iterative(c, dp(1.0 - q), n)?.success_probability;
        let closed = if n <= 3 {
            cf::success_prob_closed(n, q)?
        } else {
            cf::success_prob_series(n, q)
        };
        t.add((sim - closed).abs());
    }
    Ok(Measured::Single(t))
}

fn success_one(ctx: &Ctx) -> CliResult<Measured> {
    success_rounds(ctx, 1)
}

fn success_two(ctx: &Ctx) -> CliResult<Measured> {
    success_rounds(ctx, 2)
}

fn success_three(ctx: &Ctx) -> CliResult<Measured> {
    success_rounds(ctx, 3)
}

fn success_four(ctx: &Ctx) -> CliResult<Measured> {
    success_rounds(ctx, 4)
}

fn success_bounds(ctx: &Ctx) -> CliResult<Measured> {
    // violation of P_1 <= P_2 <= P_3 <= P_4 <= q^2
    let mut t = Tally::default();
    for &q in &ctx.samples.q {
        let mut last = 0.0;
        for n in 1..=4 {
            let sim = recover_iterative(&ctx.samples.real[0], dp(1.0 - q), n)?.success_probability;
            t.add((last - sim).max(0.0));
            t.add((sim - cf::success_prob_limit(q)).max(0.0));
            last = sim;
        }
    }
    Ok(Measured::Single(t))
}

fn followup_path(ctx: &Ctx) -> CliResult<Measured> {
    // joint probability of reaching 01 and then succeeding on the damped qubit
    let mut t = Tally::default();
    for c in ctx.samples.all() {
        for &q in &ctx.samples.q {
            let r = recover_iterative(c, dp(1.0 - q), 2)?;
            let leaf = r.branch_log.iter().find(|b| b.path == "01/0");
            let sim = leaf.map_or(0.0, |b| b.cumulative);
            let closed = q / (1.0 + q).powi(2) * cf::followup_success_probability(q);
            t.add((sim - closed).abs());
            // the failure weight is state dependent; only conservation is checked
            let weight = |path: &str| {
                r.branch_log
                    .iter()
                    .find(|b| b.path == path)
                    .map_or(0.0, |b| b.cumulative)
            };
            t.add((weight("01") - weight("01/0") - weight("01/1")).abs());
        }
    }
    Ok(Measured::Single(t))
}

fn exact_recovery(ctx: &Ctx) -> CliResult<Measured> {
    let mut t = Tally::default();
    for c in ctx.samples.all() {
        let input = c.to_state();
        for &q in &ctx.samples.q {
            let r = recover_iterative(c, dp(1.0 - q), 3)?;
            for leaf in r.successes() {
                if let Some(s) = &leaf.state {
                    t.add(input.phase_distance(s)?);
                }
            }
        }
    }
    Ok(Measured::Single(t))
}

fn damped_reduction(c: &TwoQubitCoeffs, p: f64) -> CliResult<DensityMatrix> {
    Ok(damp_env(c, dp(p))?.partial_trace(&[0, 1])?)
}

fn damped_concurrence(ctx: &Ctx) -> CliResult<Measured> {
    let mut t = Tally::default();
    for c in ctx.samples.all() {
        for &p in &ctx.samples.p {
            let sim = (ctx.hooks.concurrence)(&damped_reduction(c, p)?)?;
            t.add((sim - cf::damped_concurrence(c, p)).abs());
        }
    }
    Ok(Measured::Single(t))
}

fn recovered_density(ctx: &Ctx) -> CliResult<Measured> {
    let mut t = Tally::default();
    for c in ctx.samples.all() {
        for &p in &ctx.samples.p {
            let r = protect(c, dp(p))?;
            t.add(r.recovered.max_abs_diff(&cf::recovered_density(c, p)?));
            t.add((r.recovered.trace().re - 1.0).abs());
        }
    }
    Ok(Measured::Single(t))
}

fn protect_probability(ctx: &Ctx) -> CliResult<Measured> {
    let mut t = PairTally::new();
    for c in ctx.samples.all() {
        for &p in &ctx.samples.p {
            let sim = protect(c, dp(p))?.success_probability;
            t.add(
                sim,
                cf::protect_probability_printed(c, p),
                cf::protect_probability(c, p),
            );
        }
    }
    Ok(Measured::Pair(t))
}

fn recovered_concurrence(ctx: &Ctx) -> CliResult<Measured> {
    let mut t = Tally::default();
    for c in ctx.samples.all() {
        for &p in &ctx.samples.p {
            let sim = (ctx.hooks.concurrence)(&protect(c, dp(p))?.recovered)?;
            t.add((sim - cf::recovered_concurrence(c, p)).abs());
        }
    }
    Ok(Measured::Single(t))
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> CliResult<f64>) -> CliResult<Option<f64>> {
    let (mut f_lo, f_hi) = (f(lo)?, f(hi)?);
    if f_lo.signum() == f_hi.signum() {
        return Ok(None);
    }
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Crossing of the simulated recovered and damped concurrences.
pub fn simulated_crossing(c: &TwoQubitCoeffs) -> CliResult<Option<f64>> {
    // near complete damping the successful branch itself becomes unobservable
    bisect(1e-9, 0.999, |p| {
        let rec = concurrence_mixed(&protect(c, dp(p))?.recovered)?.value();
        let dam = concurrence_mixed(&damped_reduction(c, p)?)?.value();
        Ok(rec - dam)
    })
}

/// Zero of the unclamped simulated damped concurrence.
pub fn simulated_esd(c: &TwoQubitCoeffs) -> CliResult<Option<f64>> {
    bisect(0.0, 1.0 - 1e-9, |p| Ok(concurrence_margin(&damped_reduction(c, p)?)?))
}

fn crossing_threshold(ctx: &Ctx) -> CliResult<Measured> {
    let mut t = Tally::default();
    for c in ctx.samples.all() {
        let (a, d) = (c.alpha().norm_sqr(), c.delta().norm_sqr());
        // the crossing is only isolated when the concurrences do not both vanish first
        if a >= d || cf::esd_point(c).is_some() {
            continue;
        }
        let sim = simulated_crossing(c)?;
        match (sim, cf::crossing_threshold(c)) {
            (Some(s), Some(closed)) => t.add((s - closed).abs()),
            _ => t.add(f64::INFINITY),
        }
    }
    Ok(Measured::Single(t))
}

fn esd_point(ctx: &Ctx) -> CliResult<Measured> {
    let mut t = Tally::default();
    for c in ctx.samples.all() {
        if let Some(closed) = cf::esd_point(c) {
            match simulated_esd(c)? {
                Some(s) => t.add((s - closed).abs()),
                None => t.add(f64::INFINITY),
            }
        }
    }
    Ok(Measured::Single(t))
}

fn prepared_state(ctx: &Ctx) -> CliResult<Measured> {
    let mut t = Tally::default();
    for c in ctx.samples.all() {
        for &x in ctx.samples.x.iter().chain(&[1.0, 2.0]) {
            let (prob, s) = prepare_robust(c, x)?;
            t.add((prob - cf::prepare_probability(c, x)).abs());
            t.add((prob - cf::prepared_normalizer_sq(c, x) / (1.0 + x).powi(2)).abs());
            t.add(s.phase_distance(&sys_state(cf::prepared_amplitudes(c, x)))?);
        }
    }
    Ok(Measured::Single(t))
}

fn for_extended(
    ctx: &Ctx,
    mut f: impl FnMut(&TwoQubitCoeffs, f64, f64, &DensityMatrix, f64) -> CliResult<()>,
) -> CliResult<()> {
    for c in ctx.samples.all() {
        for &p in &ctx.samples.p {
            for &x in &ctx.samples.x {
                let r = extended_protect(c, SchemeParams::new(dp(p), x)?)?;
                f(c, p, x, &r.recovered, r.success_probability)?;
            }
        }
    }
    Ok(())
}

fn extended_density(ctx: &Ctx) -> CliResult<Measured> {
    let mut t = Tally::default();
    for_extended(ctx, |c, p, x, rho, _| {
        t.add(rho.max_abs_diff(&cf::extended_density(c, p, x)?));
        Ok(())
    })?;
    Ok(Measured::Single(t))
}

fn extended_reduction(ctx: &Ctx) -> CliResult<Measured> {
    let mut t = Tally::default();
    for_extended(ctx, |c, p, x, rho, _| {
        t.add(rho.max_abs_diff(&protect(c, dp(p * x))?.recovered));
        Ok(())
    })?;
    Ok(Measured::Single(t))
}

fn extended_success(ctx: &Ctx) -> CliResult<Measured> {
    let mut t = Tally::default();
    for_extended(ctx, |c, p, x, _, prob| {
        t.add((prob - cf::extended_success_probability(c, p, x)).abs());
        Ok(())
    })?;
    Ok(Measured::Single(t))
}

fn extended_concurrence(ctx: &Ctx) -> CliResult<Measured> {
    let mut t = PairTally::new();
    for_extended(ctx, |c, p, x, rho, _| {
        let sim = (ctx.hooks.concurrence)(rho)?;
        t.add(
            sim,
            cf::extended_concurrence_printed(c, p, x),
            cf::extended_concurrence_corrected(c, p, x),
        );
        Ok(())
    })?;
    Ok(Measured::Pair(t))
}

fn damped_fidelity(ctx: &Ctx) -> CliResult<Measured> {
    let mut t = Tally::default();
    for c in &ctx.samples.real {
        for &p in &ctx.samples.p {
            let sim = fidelity_pure_mixed(&c.to_state(), &damped_reduction(c, p)?)?.value();
            t.add((sim - cf::damped_fidelity(c, p)?).abs());
        }
    }
    Ok(Measured::Single(t))
}

fn recovered_fidelity(ctx: &Ctx) -> CliResult<Measured> {
    let mut t = Tally::default();
    for c in &ctx.samples.real {
        for &p in &ctx.samples.p {
            let sim = fidelity_pure_mixed(&c.to_state(), &protect(c, dp(p))?.recovered)?.value();
            t.add((sim - cf::recovered_fidelity(c, p)?).abs());
        }
    }
    Ok(Measured::Single(t))
}

fn extended_fidelity(ctx: &Ctx) -> CliResult<Measured> {
    let mut t = PairTally::new();
    for c in &ctx.samples.real {
        for &p in &ctx.samples.p {
            for &x in &ctx.samples.x {
                let rho = extended_protect(c, SchemeParams::new(dp(p), x)?)?.recovered;
                let sim = fidelity_pure_mixed(&c.to_state(), &rho)?.value();
                t.add(
                    sim,
                    cf::extended_fidelity_printed(c, p, x)?,
                    cf::extended_fidelity_corrected(c, p, x)?,
                );
            }
        }
    }
    Ok(Measured::Pair(t))
}

fn closed_form_suite(ctx: &Ctx) -> CliResult<Measured> {
    // the bundled record agrees with the individual formulas
    let mut t = Tally::default();
    for c in &ctx.samples.real {
        for &p in &ctx.samples.p {
            let s = cf::closed_form_suite(c, p, 0.5)?;
            let sim_d = (ctx.hooks.concurrence)(&damped_reduction(c, p)?)?;
            let sim_r = (ctx.hooks.concurrence)(&protect(c, dp(p))?.recovered)?;
            t.add((s.c_damped - sim_d).abs());
            t.add((s.c_recovered - sim_r).abs());
            t.add((s.f_recovered - cf::recovered_fidelity(c, p)?).abs());
            t.add((s.c_ext_corrected - cf::extended_concurrence_corrected(c, p, 0.5)).abs());
        }
    }
    Ok(Measured::Single(t))
}

fn pure_concurrence(ctx: &Ctx) -> CliResult<Measured> {
    let mut t = Tally::default();
    for c in ctx.samples.all() {
        let sim = (ctx.hooks.concurrence)(&pure_to_density(&c.to_state())?)?;
        t.add((sim - concurrence_pure(c).value()).abs());
    }
    Ok(Measured::Single(t))
}

fn concurrence_range(ctx: &Ctx) -> CliResult<Measured> {
    // distance of the concurrence from [0, 1], plus known anchor values
    let mut t = Tally::default();
    let basis =
        |i| -> CliResult<DensityMatrix> { Ok(pure_to_density(&StateVector::basis(i, vec![Role::System; 2])?)?) };
    let low = basis(0)?.mix(&basis(1)?, 0.5)?;
    let high = basis(2)?.mix(&basis(3)?, 0.5)?;
    let mixed = low.mix(&high, 0.5)?;
    t.add((ctx.hooks.concurrence)(&mixed)?.abs());
    for c in ctx.samples.all() {
        for &p in &ctx.samples.p {
            let v = (ctx.hooks.concurrence)(&damped_reduction(c, p)?)?;
            t.add((-v).max(v - 1.0).max(0.0));
        }
    }
    Ok(Measured::Single(t))
}

fn completion_independence(ctx: &Ctx) -> CliResult<Measured> {
    let mut t = Tally::default();
    for c in ctx.samples.all() {
        for &p in &ctx.samples.p {
            let a = protect_with(c, dp(p), Completion::GramSchmidt)?;
            let b = protect_with(c, dp(p), Completion::Reflected)?;
            t.add(a.recovered.max_abs_diff(&b.recovered));
            t.add((a.success_probability - b.success_probability).abs());
        }
    }
    Ok(Measured::Single(t))
}

pub struct CheckSpec {
    pub id: &'static str,
    pub description: &'static str,
    pub kind: CheckKind,
    pub tolerance: f64,
    /// Closed-form functions exercised by the check.
    pub covers: &'static [&'static str],
    run: fn(&Ctx) -> CliResult<Measured>,
}

const EXACT: f64 = 1e-12;
const SPECTRAL: f64 = 1e-10;
const ROOT: f64 = 1e-8;

pub static REGISTRY: &[CheckSpec] = &[
    CheckSpec {
        id: "null-result-state",
        description: "state and probability after null results on both qubits",
        kind: CheckKind::Match,
        tolerance: EXACT,
        covers: &["null_result_normalizer_sq", "null_result_amplitudes"],
        run: null_result_state,
    },
    CheckSpec {
        id: "branch-probabilities",
        description: "outcome probabilities of one full recovery round",
        kind: CheckKind::Adjudication,
        tolerance: EXACT,
        covers: &[
            "recovery_branch_probabilities_printed",
            "recovery_branch_probabilities",
            "recovery_branch_norms",
        ],
        run: branch_probabilities,
    },
    CheckSpec {
        id: "followup-path",
        description: "joint probability of a one-qubit follow-up after a partial failure",
        kind: CheckKind::Match,
        tolerance: EXACT,
        covers: &["followup_success_probability"],
        run: followup_path,
    },
    CheckSpec {
        id: "success-one-round",
        description: "success probability with one round",
        kind: CheckKind::Match,
        tolerance: EXACT,
        covers: &["success_prob_closed"],
        run: success_one,
    },
    CheckSpec {
        id: "success-two-rounds",
        description: "success probability with two rounds",
        kind: CheckKind::Match,
        tolerance: EXACT,
        covers: &["success_prob_closed"],
        run: success_two,
    },
    CheckSpec {
        id: "success-three-rounds",
        description: "success probability with three rounds",
        kind: CheckKind::Match,
        tolerance: EXACT,
        covers: &["success_prob_closed", "followup_failure_probability"],
        run: success_three,
    },
    CheckSpec {
        id: "success-four-rounds",
        description: "success probability with four rounds against the per-qubit series",
        kind: CheckKind::Match,
        tolerance: EXACT,
        covers: &["success_prob_series"],
        run: success_four,
    },
    CheckSpec {
        id: "success-bounds",
        description: "success probability grows with rounds and stays below q^2",
        kind: CheckKind::Property,
        tolerance: EXACT,
        covers: &["success_prob_limit"],
        run: success_bounds,
    },
    CheckSpec {
        id: "exact-recovery",
        description: "every successful branch returns the input state",
        kind: CheckKind::Property,
        tolerance: EXACT,
        covers: &[],
        run: exact_recovery,
    },
    CheckSpec {
        id: "pure-concurrence",
        description: "mixed-state concurrence of a pure projector",
        kind: CheckKind::Match,
        tolerance: SPECTRAL,
        covers: &[],
        run: pure_concurrence,
    },
    CheckSpec {
        id: "concurrence-range",
        description: "concurrence stays in [0, 1] and vanishes for I/4",
        kind: CheckKind::Property,
        tolerance: SPECTRAL,
        covers: &[],
        run: concurrence_range,
    },
    CheckSpec {
        id: "damped-concurrence",
        description: "concurrence after environment-coupled damping",
        kind: CheckKind::Match,
        tolerance: SPECTRAL,
        covers: &["damped_concurrence"],
        run: damped_concurrence,
    },
    CheckSpec {
        id: "recovered-density",
        description: "system state after damping and a successful round",
        kind: CheckKind::Match,
        tolerance: EXACT,
        covers: &["recovered_density", "recovered_normalizer"],
        run: recovered_density,
    },
    CheckSpec {
        id: "protect-probability",
        description: "probability of the successful recovery outcome",
        kind: CheckKind::Adjudication,
        tolerance: EXACT,
        covers: &["protect_probability_printed", "protect_probability"],
        run: protect_probability,
    },
    CheckSpec {
        id: "recovered-concurrence",
        description: "concurrence of the recovered state",
        kind: CheckKind::Match,
        tolerance: SPECTRAL,
        covers: &["recovered_concurrence"],
        run: recovered_concurrence,
    },
    CheckSpec {
        id: "crossing-threshold",
        description: "damping above which recovery raises the concurrence",
        kind: CheckKind::Match,
        tolerance: ROOT,
        covers: &["crossing_threshold"],
        run: crossing_threshold,
    },
    CheckSpec {
        id: "esd-point",
        description: "damping at which the damped concurrence vanishes",
        kind: CheckKind::Match,
        tolerance: ROOT,
        covers: &["esd_point"],
        run: esd_point,
    },
    CheckSpec {
        id: "prepared-state",
        description: "state and probability after the preparation step",
        kind: CheckKind::Match,
        tolerance: EXACT,
        covers: &["prepared_amplitudes", "prepared_normalizer_sq", "prepare_probability"],
        run: prepared_state,
    },
    CheckSpec {
        id: "extended-density",
        description: "system state after preparation, damping and recovery",
        kind: CheckKind::Match,
        tolerance: EXACT,
        covers: &["extended_density"],
        run: extended_density,
    },
    CheckSpec {
        id: "extended-reduction",
        description: "extended scheme at (p, x) equals the basic scheme at p x",
        kind: CheckKind::Property,
        tolerance: EXACT,
        covers: &[],
        run: extended_reduction,
    },
    CheckSpec {
        id: "extended-success-probability",
        description: "joint success probability of preparation and recovery",
        kind: CheckKind::Match,
        tolerance: EXACT,
        covers: &["extended_success_probability"],
        run: extended_success,
    },
    CheckSpec {
        id: "extended-concurrence",
        description: "concurrence of the extended-scheme state",
        kind: CheckKind::Adjudication,
        tolerance: SPECTRAL,
        covers: &["extended_concurrence_printed", "extended_concurrence_corrected"],
        run: extended_concurrence,
    },
    CheckSpec {
        id: "damped-fidelity",
        description: "fidelity of the damped state with the input",
        kind: CheckKind::Match,
        tolerance: SPECTRAL,
        covers: &["damped_fidelity"],
        run: damped_fidelity,
    },
    CheckSpec {
        id: "recovered-fidelity",
        description: "fidelity of the recovered state with the input",
        kind: CheckKind::Match,
        tolerance: SPECTRAL,
        covers: &["recovered_fidelity"],
        run: recovered_fidelity,
    },
    CheckSpec {
        id: "extended-fidelity",
        description: "fidelity of the extended-scheme state with the input",
        kind: CheckKind::Adjudication,
        tolerance: SPECTRAL,
        covers: &["extended_fidelity_printed", "extended_fidelity_corrected"],
        run: extended_fidelity,
    },
    CheckSpec {
        id: "closed-form-suite",
        description: "bundled closed forms agree with the simulation",
        kind: CheckKind::Match,
        tolerance: SPECTRAL,
        covers: &["closed_form_suite"],
        run: closed_form_suite,
    },
    CheckSpec {
        id: "completion-independence",
        description: "outputs do not depend on how the damping unitary is completed",
        kind: CheckKind::Property,
        tolerance: EXACT,
        covers: &[],
        run: completion_independence,
    },
];

fn evaluate(entry: &CheckSpec, ctx: &Ctx) -> CliResult<CheckReport> {
    let measured = (entry.run)(ctx)?;
    let tol = entry.tolerance;
    let (passed, max_deviation, points, adjudication) = match measured {
        Measured::Single(t) => (t.points > 0 && t.max <= tol, t.max, t.points, None),
        Measured::Pair(t) => {
            let (pm, cm) = (t.printed.max <= tol, t.corrected.max <= tol);
            let matching = match (pm, cm) {
                (true, true) => Variant::Both,
                (true, false) => Variant::Printed,
                (false, true) => Variant::Corrected,
                (false, false) => Variant::Neither,
            };
            let best = t.printed.max.min(t.corrected.max);
            let adj = Adjudication {
                matching,
                printed_deviation: t.printed.max,
                corrected_deviation: t.corrected.max,
            };
            (pm != cm, best, t.printed.points, Some(adj))
        }
    };
    Ok(CheckReport {
        id: entry.id,
        description: entry.description,
        kind: entry.kind,
        passed,
        max_deviation,
        tolerance: tol,
        points,
        adjudication,
    })
}

pub fn run_verify(hooks: VerifyHooks, threads: usize) -> CliResult<VerifyReport> {
    let samples = Samples::standard();
    let ctx = Ctx {
        hooks,
        samples: &samples,
    };
    let checks = ordered_map(threads, REGISTRY, |entry| evaluate(entry, &ctx))?;
    Ok(VerifyReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
