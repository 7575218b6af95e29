use crate::channels::{
    cnot, damping_couple_with, hadamard_theta, measure_branches, postselect, weak_null, Branch, Completion,
    DampingParams, Outcome,
};
use crate::error::{Error, Result};
use crate::tensor::{DensityMatrix, PartialTrace, Role, StateVector};

use super::coeffs::{SchemeParams, TwoQubitCoeffs};

/// Deepest branch tree [`recover_iterative`] will build.
pub const MAX_ROUNDS: usize = 4;

const SYSTEM: [usize; 2] = [0, 1];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fate {
    /// Further rounds follow from this branch.
    Continue,
    /// The input state (or the target mixed state) has been restored.
    Success,
    /// Unrecovered, and the round budget is spent.
    Abandoned,
}

/// One node of a protocol's branch tree.
#[derive(Debug, Clone, PartialEq)]
pub struct LoggedBranch {
    pub round: usize,
    /// Outcomes from the first round through this one, `/`-separated.
    pub path: String,
    pub outcome: Outcome,
    /// Probability of `outcome` given that this round was reached.
    pub probability: f64,
    /// Probability of the whole path.
    pub cumulative: f64,
    pub fate: Fate,
    /// Post-measurement system state, kept for successful pure-state branches.
    pub state: Option<StateVector>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult<S> {
    pub success_probability: f64,
    pub recovered: S,
    pub branch_log: Vec<LoggedBranch>,
}

impl<S> RecoveryResult<S> {
    pub fn successes(&self) -> impl Iterator<Item = &LoggedBranch> {
        self.branch_log.iter().filter(|b| b.fate == Fate::Success)
    }

    /// Sum of the path probabilities of every successful leaf.
    pub fn logged_success_probability(&self) -> f64 {
        self.successes().map(|b| b.cumulative).sum()
    }
}

/// Rotation angle `atan(1 / r)` that undoes a `|1>` amplitude scaled by `r`.
/// A fully decayed amplitude (`r = 0`) gives a quarter turn.
pub fn recovery_angle(survival_amplitude: f64) -> f64 {
    1.0f64.atan2(survival_amplitude)
}

/// Appends one ancilla per `(system qubit, angle)` pair, rotates it by the angle
/// and applies a CNOT from the system qubit onto it. Returns the state before
/// measurement together with the ancilla indices.
pub fn recovery_circuit(state: &StateVector, targets: &[(usize, f64)]) -> Result<(StateVector, Vec<usize>)> {
    let n = state.num_qubits();
    if let Some(&(bad, _)) = targets.iter().find(|(q, _)| *q >= n) {
        return Err(Error::QubitOutOfRange {
            index: bad,
            num_qubits: n,
        });
    }
    let mut s = state.with_fresh_qubits(Role::Ancilla, targets.len());
    let ancillas: Vec<usize> = (n..n + targets.len()).collect();
    for (&(qubit, theta), &ancilla) in targets.iter().zip(&ancillas) {
        s = s.apply_unitary(&hadamard_theta(theta), &[ancilla])?;
        s = s.apply_unitary(&cnot(), &[qubit, ancilla])?;
    }
    Ok((s, ancillas))
}

/// Runs [`recovery_circuit`] and enumerates the ancilla outcomes. Outcome bits
/// follow the order of `targets`; ancillas are removed from each branch.
pub fn recovery_round_on(state: &StateVector, targets: &[(usize, f64)]) -> Result<Vec<Branch>> {
    let (s, ancillas) = recovery_circuit(state, targets)?;
    measure_branches(&s, &ancillas)
}

/// Full round on both system qubits with the same angle.
pub fn recovery_round(state: &StateVector, theta: f64) -> Result<Vec<Branch>> {
    recovery_round_on(state, &[(SYSTEM[0], theta), (SYSTEM[1], theta)])
}

fn postselect_recovery(state: &StateVector, theta: f64) -> Result<(f64, StateVector)> {
    let (s, ancillas) = recovery_circuit(state, &[(SYSTEM[0], theta), (SYSTEM[1], theta)])?;
    postselect(&s, &ancillas, &[0, 0])
}

/// Null-result weak measurement on both system qubits.
pub fn damp_null(coeffs: &TwoQubitCoeffs, params: DampingParams) -> Result<(f64, StateVector)> {
    let (p_first, s) = weak_null(&coeffs.to_state(), params, SYSTEM[0])?;
    let (p_second, s) = weak_null(&s, params, SYSTEM[1])?;
    Ok((p_first * p_second, s))
}

struct Node {
    state: StateVector,
    /// Per system qubit: `None` once restored, otherwise `k` with the excited
    /// amplitude scaled by `q^(k/2)`.
    exponents: [Option<u32>; 2],
    cumulative: f64,
    path: String,
}

/// Weak-measurement recovery with up to `max_rounds` rounds.
///
/// A full round on both qubits either restores the state (`00`), leaves one
/// qubit with doubled damping (`01`, `10`), which then gets single-qubit rounds,
/// or doubles the damping of both (`11`). Each unresolved qubit's rotation is
/// matched to its current damping exponent.
pub fn recover_iterative(
    coeffs: &TwoQubitCoeffs,
    params: DampingParams,
    max_rounds: usize,
) -> Result<RecoveryResult<StateVector>> {
    if !(1..=MAX_ROUNDS).contains(&max_rounds) {
        return Err(Error::param(
            "max_rounds",
            max_rounds as f64,
            "must lie between 1 and 4",
        ));
    }
    let q = params.q();
    let (p_null, damped) = damp_null(coeffs, params)?;
    let mut log = vec![LoggedBranch {
        round: 0,
        path: String::new(),
        outcome: Outcome(vec![0, 0]),
        probability: p_null,
        cumulative: p_null,
        fate: Fate::Continue,
        state: None,
    }];
    let mut frontier = vec![Node {
        state: damped,
        exponents: [Some(1), Some(1)],
        cumulative: p_null,
        path: String::new(),
    }];
    let mut success_probability = 0.0;
    let mut recovered = None;

    for round in 1..=max_rounds {
        let mut next = Vec::new();
        for node in frontier {
            let active: Vec<(usize, u32)> = node
                .exponents
                .iter()
                .enumerate()
                .filter_map(|(qubit, e)| e.map(|e| (qubit, e)))
                .collect();
            let targets: Vec<(usize, f64)> = active
                .iter()
                .map(|&(qubit, e)| (qubit, recovery_angle(q.powf(f64::from(e) / 2.0))))
                .collect();
            for branch in recovery_round_on(&node.state, &targets)? {
                let mut exponents = node.exponents;
                for (&(qubit, e), &bit) in active.iter().zip(branch.outcome.bits()) {
                    exponents[qubit] = (bit == 1).then_some(2 * e);
                }
                let cumulative = node.cumulative * branch.probability;
                let path = if node.path.is_empty() {
                    branch.outcome.to_string()
                } else {
                    format!("{}/{}", node.path, branch.outcome)
                };
                let fate = if exponents.iter().all(Option::is_none) {
                    Fate::Success
                } else if round == max_rounds {
                    Fate::Abandoned
                } else {
                    Fate::Continue
                };
                let kept_state = (fate == Fate::Success).then(|| branch.post_state.clone());
                if fate == Fate::Success {
                    success_probability += cumulative;
                    recovered.get_or_insert_with(|| branch.post_state.clone());
                }
                log.push(LoggedBranch {
                    round,
                    path: path.clone(),
                    outcome: branch.outcome,
                    probability: branch.probability,
                    cumulative,
                    fate,
                    state: kept_state,
                });
                if fate == Fate::Continue {
                    next.push(Node {
                        state: branch.post_state,
                        exponents,
                        cumulative,
                        path,
                    });
                }
            }
        }
        frontier = next;
    }

    let recovered = recovered.ok_or(Error::ImpossibleBranch(0.0))?;
    Ok(RecoveryResult {
        success_probability,
        recovered,
        branch_log: log,
    })
}

/// Couples every system qubit of `state` to its own fresh environment qubit.
pub fn damp_env_state(state: &StateVector, params: DampingParams, completion: Completion) -> Result<StateVector> {
    let systems = state.qubits_with_role(Role::System);
    let n = state.num_qubits();
    let coupling = damping_couple_with(params, completion);
    let mut s = state.with_fresh_qubits(Role::Environment, systems.len());
    for (j, &qubit) in systems.iter().enumerate() {
        s = s.apply_unitary(&coupling, &[qubit, n + j])?;
    }
    Ok(s)
}

/// Input state after amplitude damping, as a pure state of system plus
/// environment (qubits 2 and 3).
pub fn damp_env(coeffs: &TwoQubitCoeffs, params: DampingParams) -> Result<StateVector> {
    damp_env_state(&coeffs.to_state(), params, Completion::default())
}

fn trace_environment(state: &StateVector) -> Result<DensityMatrix> {
    state.partial_trace(&SYSTEM)
}

/// Damping followed by one full recovery round, post-selected on `00`.
pub fn protect(coeffs: &TwoQubitCoeffs, params: DampingParams) -> Result<RecoveryResult<DensityMatrix>> {
    protect_with(coeffs, params, Completion::default())
}

pub fn protect_with(
    coeffs: &TwoQubitCoeffs,
    params: DampingParams,
    completion: Completion,
) -> Result<RecoveryResult<DensityMatrix>> {
    let damped = damp_env_state(&coeffs.to_state(), params, completion)?;
    let (probability, post) = postselect_recovery(&damped, recovery_angle(params.q().sqrt()))?;
    Ok(RecoveryResult {
        success_probability: probability,
        recovered: trace_environment(&post)?,
        branch_log: vec![LoggedBranch {
            round: 1,
            path: "00".into(),
            outcome: Outcome(vec![0, 0]),
            probability,
            cumulative: probability,
            fate: Fate::Success,
            state: None,
        }],
    })
}

/// First-round outcome with exactly one ancilla flipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartialFailure {
    /// Second ancilla read 1: system qubit 1 carries doubled damping.
    ZeroOne,
    /// First ancilla read 1: system qubit 0 carries doubled damping.
    OneZero,
}

impl PartialFailure {
    pub fn outcome(self) -> [u8; 2] {
        match self {
            PartialFailure::ZeroOne => [0, 1],
            PartialFailure::OneZero => [1, 0],
        }
    }

    pub fn damped_qubit(self) -> usize {
        match self {
            PartialFailure::ZeroOne => 1,
            PartialFailure::OneZero => 0,
        }
    }
}

/// State left after a failed follow-up, ready for another single-qubit round.
#[derive(Debug, Clone, PartialEq)]
pub struct PendingBranch {
    /// Probability of the path leading here.
    pub probability: f64,
    /// System plus environment.
    pub state: StateVector,
    pub qubit: usize,
    /// Angle for the next round, `atan(1 / q^2)`.
    pub next_angle: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FollowupResult {
    pub result: RecoveryResult<DensityMatrix>,
    pub retry: Option<PendingBranch>,
}

/// Continues a partially failed first round with one single-qubit round
/// (`tan theta = 1 / q`) on the damped qubit.
pub fn protect_followup(
    coeffs: &TwoQubitCoeffs,
    params: DampingParams,
    first_outcome: PartialFailure,
) -> Result<FollowupResult> {
    protect_followup_with(coeffs, params, first_outcome, Completion::default())
}

pub fn protect_followup_with(
    coeffs: &TwoQubitCoeffs,
    params: DampingParams,
    first_outcome: PartialFailure,
    completion: Completion,
) -> Result<FollowupResult> {
    let q = params.q();
    let damped = damp_env_state(&coeffs.to_state(), params, completion)?;
    let theta = recovery_angle(q.sqrt());
    let (s, ancillas) = recovery_circuit(&damped, &[(SYSTEM[0], theta), (SYSTEM[1], theta)])?;
    let (p_first, after_first) = postselect(&s, &ancillas, &first_outcome.outcome())?;
    let first = Outcome(first_outcome.outcome().to_vec());

    let mut log = vec![LoggedBranch {
        round: 1,
        path: first.to_string(),
        outcome: first.clone(),
        probability: p_first,
        cumulative: p_first,
        fate: Fate::Continue,
        state: None,
    }];
    let qubit = first_outcome.damped_qubit();
    let mut recovered = None;
    let mut retry = None;
    for branch in recovery_round_on(&after_first, &[(qubit, recovery_angle(q))])? {
        let cumulative = p_first * branch.probability;
        let success = branch.outcome.is_all_zero();
        log.push(LoggedBranch {
            round: 2,
            path: format!("{}/{}", first, branch.outcome),
            outcome: branch.outcome.clone(),
            probability: branch.probability,
            cumulative,
            fate: if success { Fate::Success } else { Fate::Continue },
            state: None,
        });
        if success {
            recovered = Some((cumulative, trace_environment(&branch.post_state)?));
        } else {
            retry = Some(PendingBranch {
                probability: cumulative,
                state: branch.post_state,
                qubit,
                next_angle: recovery_angle(q * q),
            });
        }
    }
    let (success_probability, rho) = recovered.ok_or(Error::ImpossibleBranch(0.0))?;
    Ok(FollowupResult {
        result: RecoveryResult {
            success_probability,
            recovered: rho,
            branch_log: log,
        },
        retry,
    })
}

/// Preparation step of the extended scheme: the recovery circuit with
/// `tan^2 theta = x` and no damping, post-selected on `00`.
pub fn prepare_robust(coeffs: &TwoQubitCoeffs, x: f64) -> Result<(f64, StateVector)> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::param("x", x, "preparation strength must be positive"));
    }
    postselect_recovery(&coeffs.to_state(), x.sqrt().atan())
}

/// Preparation, damping, then recovery with `x q y = 1`, post-selected on `00`.
pub fn extended_protect(coeffs: &TwoQubitCoeffs, scheme: SchemeParams) -> Result<RecoveryResult<DensityMatrix>> {
    extended_protect_with(coeffs, scheme, Completion::default())
}

pub fn extended_protect_with(
    coeffs: &TwoQubitCoeffs,
    scheme: SchemeParams,
    completion: Completion,
) -> Result<RecoveryResult<DensityMatrix>> {
    let params = scheme.damping();
    if params.q() <= 0.0 {
        return Err(Error::param(
            "p",
            params.p(),
            "recovery strength is undefined for complete damping",
        ));
    }
    let (p_prep, prepared) = prepare_robust(coeffs, scheme.x())?;
    let damped = damp_env_state(&prepared, params, completion)?;
    let (p_recover, post) = postselect_recovery(&damped, scheme.recovery_angle())?;
    let cumulative = p_prep * p_recover;
    let zz = Outcome(vec![0, 0]);
    Ok(RecoveryResult {
        success_probability: cumulative,
        recovered: trace_environment(&post)?,
        branch_log: vec![
            LoggedBranch {
                round: 1,
                path: "00".into(),
                outcome: zz.clone(),
                probability: p_prep,
                cumulative: p_prep,
                fate: Fate::Continue,
                state: None,
            },
            LoggedBranch {
                round: 2,
                path: "00/00".into(),
                outcome: zz,
                probability: p_recover,
                cumulative,
                fate: Fate::Success,
                state: None,
            },
        ],
    })
}
