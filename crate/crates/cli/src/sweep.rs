//! Parameter sweeps over the damping probability and preparation strength.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use ampshield_core::protocols::closed_form as cf;
use ampshield_core::protocols::{damp_env, extended_protect, protect, recover_iterative, MAX_ROUNDS};
use ampshield_core::{
    concurrence_mixed, fidelity_pure_mixed, DampingParams, DensityMatrix, Error, PartialTrace, SchemeParams,
    TwoQubitCoeffs,
};

use crate::error::{CliError, CliResult};
use crate::parse::{coeffs_from, parse_complex, validate_x_values, PGrid};
use crate::runtime::ordered_map;
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    WeakRecovery,
    AdProtect,
    Extended,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::WeakRecovery => "weak-recovery",
            Scheme::AdProtect => "ad-protect",
            Scheme::Extended => "extended",
        }
    }

    pub fn header(self) -> Vec<String> {
        let cols: &[&str] = match self {
            Scheme::WeakRecovery => &["p", "x", "N", "P_success_sim", "P_success_closed", "P_limit"],
            Scheme::AdProtect => &[
                "p",
                "x",
                "N",
                "C_damped_sim",
                "C_recovered_sim",
                "F_damped_sim",
                "F_recovered_sim",
                "P_success_sim",
                "C_damped_closed",
                "C_recovered_closed",
                "F_damped_closed",
                "F_recovered_closed",
                "P_success_closed",
                "P_success_printed",
            ],
            Scheme::Extended => &[
                "p",
                "x",
                "N",
                "C_damped_sim",
                "C_ext_sim",
                "F_damped_sim",
                "F_ext_sim",
                "P_success_sim",
                "C_damped_closed",
                "C_ext_printed",
                "C_ext_corrected",
                "F_damped_closed",
                "F_ext_printed",
                "F_ext_corrected",
                "P_success_closed",
            ],
        };
        cols.iter().map(|s| s.to_string()).collect()
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        [Scheme::WeakRecovery, Scheme::AdProtect, Scheme::Extended]
            .into_iter()
            .find(|sc| sc.name() == s.trim())
            .ok_or_else(|| {
                CliError::config(
                    "scheme",
                    format!("unknown scheme `{s}`; expected weak-recovery, ad-protect or extended"),
                )
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub scheme: Scheme,
    pub coeffs: TwoQubitCoeffs,
    pub p_grid: PGrid,
    pub x_values: Vec<f64>,
    pub repeats: usize,
    pub output_path: PathBuf,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CoeffInput {
    Real(f64),
    Text(String),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GridInput {
    Text(String),
    Fields { start: f64, stop: f64, steps: usize },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scheme: String,
    coeffs: Vec<CoeffInput>,
    p_grid: GridInput,
    #[serde(default)]
    x_values: Option<Vec<f64>>,
    #[serde(default)]
    repeats: Option<usize>,
    output_path: PathBuf,
}

impl SweepConfig {
    pub fn new(
        scheme: Scheme,
        coeffs: TwoQubitCoeffs,
        p_grid: PGrid,
        x_values: Option<Vec<f64>>,
        repeats: Option<usize>,
        output_path: PathBuf,
    ) -> CliResult<Self> {
        let x_values = x_values.unwrap_or_else(|| vec![1.0]);
        validate_x_values(&x_values)?;
        if scheme != Scheme::Extended && x_values != [1.0] {
            return Err(CliError::config(
                "x_values",
                format!("only the extended scheme takes x_values, not {scheme}"),
            ));
        }
        let repeats = repeats.unwrap_or(1);
        if !(1..=MAX_ROUNDS).contains(&repeats) {
            return Err(CliError::config(
                "repeats",
                format!("must lie between 1 and {MAX_ROUNDS}, got {repeats}"),
            ));
        }
        if scheme != Scheme::WeakRecovery && repeats != 1 {
            return Err(CliError::config(
                "repeats",
                format!("{scheme} runs a single recovery round"),
            ));
        }
        Ok(SweepConfig {
            scheme,
            coeffs,
            p_grid,
            x_values,
            repeats,
            output_path,
        })
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| CliError::config("config", e.to_string()))?;
        let scheme: Scheme = raw.scheme.parse()?;
        if raw.coeffs.len() != 4 {
            return Err(CliError::config(
                "coeffs",
                format!("expected 4 values, got {}", raw.coeffs.len()),
            ));
        }
        let mut c = [Complex64::new(0.0, 0.0); 4];
        for (slot, input) in c.iter_mut().zip(raw.coeffs) {
            *slot = match input {
                CoeffInput::Real(x) => Complex64::new(x, 0.0),
                CoeffInput::Text(s) => parse_complex(&s).map_err(|e| CliError::config("coeffs", e))?,
            };
        }
        let p_grid = match raw.p_grid {
            GridInput::Text(s) => PGrid::parse(&s)?,
            GridInput::Fields { start, stop, steps } => PGrid::new(start, stop, steps)?,
        };
        SweepConfig::new(
            scheme,
            coeffs_from(c)?,
            p_grid,
            raw.x_values,
            raw.repeats,
            raw.output_path,
        )
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        SweepConfig::from_json(&text)
    }
}

fn or_zero<T>(r: ampshield_core::Result<T>, f: impl FnOnce(T) -> ampshield_core::Result<f64>) -> CliResult<f64> {
    match r.and_then(f) {
        Ok(v) => Ok(v),
        Err(Error::ImpossibleBranch(_)) => Ok(0.0),
        Err(e) => Err(e.into()),
    }
}

struct Point {
    p: f64,
    x: f64,
}

fn concurrence(rho: &DensityMatrix) -> ampshield_core::Result<f64> {
    Ok(concurrence_mixed(rho)?.value())
}

fn sweep_row(cfg: &SweepConfig, pt: &Point) -> CliResult<Vec<Cell>> {
    let c = &cfg.coeffs;
    let params = DampingParams::new(pt.p)?;
    let (p, q) = (params.p(), params.q());
    let psi = c.to_state();
    let fidelity = |rho: &DensityMatrix| -> ampshield_core::Result<f64> { Ok(fidelity_pure_mixed(&psi, rho)?.value()) };
    // closed-form fidelities are only defined for real amplitudes
    let real = c.is_real();
    let closed_fidelity = |r: ampshield_core::Result<f64>| -> Cell {
        if real {
            r.ok().into()
        } else {
            Cell::Empty
        }
    };

    let mut cells = vec![Cell::Real(p), Cell::Real(pt.x), Cell::Count(cfg.repeats)];
    match cfg.scheme {
        Scheme::WeakRecovery => {
            let sim = or_zero(recover_iterative(c, params, cfg.repeats), |r| Ok(r.success_probability))?;
            let closed = match cfg.repeats {
                n @ 1..=3 => cf::success_prob_closed(n, q)?,
                n => cf::success_prob_series(n, q),
            };
            cells.extend([sim, closed, cf::success_prob_limit(q)].map(Cell::Real));
        }
        Scheme::AdProtect | Scheme::Extended => {
            let damped = damp_env(c, params)?.partial_trace(&[0, 1])?;
            let result = if cfg.scheme == Scheme::AdProtect {
                protect(c, params)
            } else if q == 0.0 {
                Err(Error::ImpossibleBranch(0.0))
            } else {
                extended_protect(c, SchemeParams::new(params, pt.x)?)
            };
            let result = match result {
                Ok(r) => Some(r),
                Err(Error::ImpossibleBranch(_)) => None,
                Err(e) => return Err(e.into()),
            };
            let on_result = |f: &dyn Fn(&DensityMatrix) -> ampshield_core::Result<f64>| -> CliResult<f64> {
                match &result {
                    Some(r) => Ok(f(&r.recovered)?),
                    None => Ok(0.0),
                }
            };
            cells.push(concurrence(&damped)?.into());
            cells.push(on_result(&concurrence)?.into());
            cells.push(fidelity(&damped)?.into());
            cells.push(on_result(&fidelity)?.into());
            cells.push(result.as_ref().map_or(0.0, |r| r.success_probability).into());
            cells.push(cf::damped_concurrence(c, p).into());
            if cfg.scheme == Scheme::AdProtect {
                cells.push(cf::recovered_concurrence(c, p).into());
                cells.push(closed_fidelity(cf::damped_fidelity(c, p)));
                cells.push(closed_fidelity(cf::recovered_fidelity(c, p)));
                cells.push(cf::protect_probability(c, p).into());
                cells.push(cf::protect_probability_printed(c, p).into());
            } else {
                cells.push(cf::extended_concurrence_printed(c, p, pt.x).into());
                cells.push(cf::extended_concurrence_corrected(c, p, pt.x).into());
                cells.push(closed_fidelity(cf::damped_fidelity(c, p)));
                cells.push(closed_fidelity(cf::extended_fidelity_printed(c, p, pt.x)));
                cells.push(closed_fidelity(cf::extended_fidelity_corrected(c, p, pt.x)));
                cells.push(cf::extended_success_probability(c, p, pt.x).into());
            }
        }
    }
    Ok(cells)
}

/// One row per grid point, ordered by p and then by x.
pub fn sweep_table(cfg: &SweepConfig, threads: usize) -> CliResult<Table> {
    let points: Vec<Point> = cfg
        .p_grid
        .points()
        .into_iter()
        .flat_map(|p| cfg.x_values.iter().map(move |&x| Point { p, x }))
        .collect();
    let mut table = Table::new(cfg.scheme.header());
    table.rows = ordered_map(threads, &points, |pt| sweep_row(cfg, pt))?;
    Ok(table)
}

pub fn run_sweep(cfg: &SweepConfig, threads: usize) -> CliResult<Table> {
    let table = sweep_table(cfg, threads)?;
    table.save(&cfg.output_path)?;
    Ok(table)
}
