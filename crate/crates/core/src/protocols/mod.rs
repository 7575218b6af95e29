//! The three protection protocols as executable circuits, plus the analytic
//! expressions they are checked against.
//!
//! Register layout: system qubits are 0 and 1; [`damp_env`] appends one
//! environment qubit per system qubit (2 and 3); every recovery round appends
//! fresh ancillas at the end and removes them again once measured.

mod circuits;
pub mod closed_form;
mod coeffs;

pub use circuits::{
    damp_env, damp_env_state, damp_null, extended_protect, extended_protect_with, prepare_robust, protect,
    protect_followup, protect_followup_with, protect_with, recover_iterative, recovery_angle, recovery_circuit,
    recovery_round, recovery_round_on, Fate, FollowupResult, LoggedBranch, PartialFailure, PendingBranch,
    RecoveryResult, MAX_ROUNDS,
};
pub use closed_form::{closed_form_suite, success_prob_closed, ClosedForms};
pub use coeffs::{SchemeParams, TwoQubitCoeffs};
