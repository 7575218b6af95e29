//! The published figure curves, regenerated from the circuit simulation.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ampshield_core::protocols::{damp_env, extended_protect, protect, recover_iterative};
use ampshield_core::{
    concurrence_mixed, fidelity_pure_mixed, DampingParams, DensityMatrix, Error, PartialTrace, SchemeParams,
    TwoQubitCoeffs,
};

use crate::error::{CliError, CliResult};
use crate::runtime::ordered_map;
use crate::table::{Cell, Table};

pub const FIGURE_POINTS: usize = 101;
pub const CAPTION_A: [f64; 4] = [0.7, 0.35, 0.4, 0.48];
pub const CAPTION_B: [f64; 4] = [0.10, 0.55, -0.60, 0.57];
pub const EXTENDED_X: [f64; 3] = [0.8, 0.5, 0.1];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    SuccessProbability,
    ConcurrenceA,
    ConcurrenceB,
    FidelityA,
    FidelityB,
}

impl FigureId {
    pub const ALL: [FigureId; 5] = [
        FigureId::SuccessProbability,
        FigureId::ConcurrenceA,
        FigureId::ConcurrenceB,
        FigureId::FidelityA,
        FigureId::FidelityB,
    ];

    pub fn label(self) -> &'static str {
        match self {
            FigureId::SuccessProbability => "2",
            FigureId::ConcurrenceA => "3a",
            FigureId::ConcurrenceB => "3b",
            FigureId::FidelityA => "6a",
            FigureId::FidelityB => "6b",
        }
    }

    pub fn file_name(self) -> String {
        format!("fig{}.csv", self.label())
    }

    pub fn header(self) -> Vec<String> {
        let mut h: Vec<String> = match self {
            FigureId::SuccessProbability => {
                return ["p", "P_N1", "P_N2", "P_N3", "q2"].map(String::from).to_vec();
            }
            FigureId::ConcurrenceA | FigureId::ConcurrenceB => {
                vec!["p".into(), "C_damped".into(), "C_recovered".into()]
            }
            FigureId::FidelityA | FigureId::FidelityB => vec!["p".into(), "F_damped".into(), "F_recovered".into()],
        };
        let prefix = if self.is_fidelity() { "F" } else { "C" };
        h.extend(EXTENDED_X.iter().map(|x| format!("{prefix}_ext_x{x}")));
        h
    }

    fn is_fidelity(self) -> bool {
        matches!(self, FigureId::FidelityA | FigureId::FidelityB)
    }

    /// Input amplitudes, as printed before renormalization.
    pub fn caption(self) -> [f64; 4] {
        match self {
            FigureId::ConcurrenceB | FigureId::FidelityB => CAPTION_B,
            _ => CAPTION_A,
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for FigureId {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.label() == s.trim())
            .ok_or_else(|| CliError::config("id", format!("unknown figure `{s}`; expected 2, 3a, 3b, 6a or 6b")))
    }
}

pub fn figure_p(i: usize) -> f64 {
    i as f64 / (FIGURE_POINTS - 1) as f64
}

pub fn caption_coeffs(id: FigureId) -> TwoQubitCoeffs {
    let [a, b, g, d] = id.caption();
    TwoQubitCoeffs::real(a, b, g, d).expect("caption amplitudes are non-zero")
}

/// Maps a branch that can no longer occur to a zero entry.
fn or_zero(r: ampshield_core::Result<f64>) -> CliResult<f64> {
    match r {
        Ok(v) => Ok(v),
        Err(Error::ImpossibleBranch(_)) => Ok(0.0),
        Err(e) => Err(e.into()),
    }
}

fn row(id: FigureId, c: &TwoQubitCoeffs, p: f64) -> CliResult<Vec<Cell>> {
    let params = DampingParams::new(p)?;
    let mut cells = vec![Cell::Real(p)];
    let psi = c.to_state();
    let metric = |rho: &DensityMatrix| -> ampshield_core::Result<f64> {
        if id.is_fidelity() {
            Ok(fidelity_pure_mixed(&psi, rho)?.value())
        } else {
            Ok(concurrence_mixed(rho)?.value())
        }
    };
    match id {
        FigureId::SuccessProbability => {
            for n in 1..=3 {
                cells.push(or_zero(recover_iterative(c, params, n).map(|r| r.success_probability))?.into());
            }
            cells.push(Cell::Real(params.q() * params.q()));
        }
        _ => {
            let damped = damp_env(c, params)?.partial_trace(&[0, 1])?;
            cells.push(metric(&damped)?.into());
            cells.push(or_zero(protect(c, params).and_then(|r| metric(&r.recovered)))?.into());
            for x in EXTENDED_X {
                // complete damping leaves nothing to recover
                let value = if params.q() == 0.0 {
                    0.0
                } else {
                    let scheme = SchemeParams::new(params, x)?;
                    or_zero(extended_protect(c, scheme).and_then(|r| metric(&r.recovered)))?
                };
                cells.push(value.into());
            }
        }
    }
    Ok(cells)
}

pub fn figure_table(id: FigureId, threads: usize) -> CliResult<Table> {
    let c = caption_coeffs(id);
    let ps: Vec<f64> = (0..FIGURE_POINTS).map(figure_p).collect();
    let mut table = Table::new(id.header());
    table.rows = ordered_map(threads, &ps, |&p| row(id, &c, p))?;
    Ok(table)
}

pub fn write_figure(id: FigureId, out_dir: &Path, threads: usize) -> CliResult<PathBuf> {
    let path = out_dir.join(id.file_name());
    figure_table(id, threads)?.save(&path)?;
    Ok(path)
}
