//! Parsing of command-line and config values.

use num_complex::Complex64;

use ampshield_core::TwoQubitCoeffs;

use crate::error::{CliError, CliResult};

/// Parses `re`, `imi`, or `re+imi` (exponents allowed, e.g. `1e-3-2e-2i`).
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t = s.trim();
    let z: Complex64 = t.parse().map_err(|_| format!("`{s}` is not a complex number"))?;
    if !z.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(z)
}

/// Four comma-separated complex amplitudes, renormalized.
pub fn parse_coeffs(s: &str) -> CliResult<TwoQubitCoeffs> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(CliError::config(
            "coeffs",
            format!("expected 4 values, got {}", parts.len()),
        ));
    }
    let mut c = [Complex64::new(0.0, 0.0); 4];
    for (slot, part) in c.iter_mut().zip(parts) {
        *slot = parse_complex(part).map_err(|e| CliError::config("coeffs", e))?;
    }
    coeffs_from(c)
}

pub fn coeffs_from(c: [Complex64; 4]) -> CliResult<TwoQubitCoeffs> {
    TwoQubitCoeffs::from_array(c).map_err(|e| CliError::config("coeffs", e.to_string()))
}

/// Uniform grid `start..=stop` with `steps` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PGrid {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl PGrid {
    pub fn new(start: f64, stop: f64, steps: usize) -> CliResult<Self> {
        if !(start.is_finite() && stop.is_finite()) || start < 0.0 || stop > 1.0 || start >= stop {
            return Err(CliError::config(
                "p_grid",
                format!("need 0 <= start < stop <= 1, got {start}:{stop}"),
            ));
        }
        if steps < 2 {
            return Err(CliError::config(
                "p_grid",
                format!("need at least 2 steps, got {steps}"),
            ));
        }
        Ok(PGrid { start, stop, steps })
    }

    /// Parses `start:stop:steps`.
    pub fn parse(s: &str) -> CliResult<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(CliError::config(
                "p_grid",
                format!("expected start:stop:steps, got `{s}`"),
            ));
        }
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| CliError::config("p_grid", format!("`{t}` is not a number")))
        };
        let steps = parts[2]
            .parse::<usize>()
            .map_err(|_| CliError::config("p_grid", format!("`{}` is not a step count", parts[2])))?;
        PGrid::new(num(parts[0])?, num(parts[1])?, steps)
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.steps {
            return self.stop;
        }
        self.start + (self.stop - self.start) * i as f64 / (self.steps - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.point(i)).collect()
    }
}

pub fn parse_x_values(s: &str) -> CliResult<Vec<f64>> {
    let xs = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::config("x_values", format!("`{t}` is not a number")))
        })
        .collect::<CliResult<Vec<f64>>>()?;
    validate_x_values(&xs)?;
    Ok(xs)
}

pub fn validate_x_values(xs: &[f64]) -> CliResult<()> {
    if xs.is_empty() {
        return Err(CliError::config("x_values", "at least one value is required"));
    }
    if let Some(bad) = xs.iter().find(|x| !x.is_finite() || **x <= 0.0) {
        return Err(CliError::config("x_values", format!("{bad} is not a positive number")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("0.5+0.2i").unwrap(), Complex64::new(0.5, 0.2));
        assert_eq!(parse_complex(" -0.6 ").unwrap(), Complex64::new(-0.6, 0.0));
        assert_eq!(parse_complex("0.2i").unwrap(), Complex64::new(0.0, 0.2));
        assert_eq!(parse_complex("1e-3-2e-2i").unwrap(), Complex64::new(1e-3, -2e-2));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("inf").is_err());
    }

    #[test]
    fn coeff_lists() {
        let c = parse_coeffs("1,0,0,1").unwrap();
        assert!((c.alpha().re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(matches!(
            parse_coeffs("1,0,0"),
            Err(CliError::Config { field: "coeffs", .. })
        ));
        assert!(parse_coeffs("0,0,0,0").is_err());
    }

    #[test]
    fn grids() {
        let g = PGrid::parse("0:1:11").unwrap();
        assert_eq!(g.points().len(), 11);
        assert_eq!(g.point(0), 0.0);
        assert_eq!(g.point(10), 1.0);
        assert!((g.point(3) - 0.3).abs() < 1e-15);
        assert!(PGrid::parse("0.5:0.2:4").is_err());
        assert!(PGrid::parse("0:1:1").is_err());
        assert!(PGrid::parse("0:1.5:3").is_err());
        assert!(PGrid::parse("0:1").is_err());
    }

    #[test]
    fn strengths() {
        assert_eq!(parse_x_values("0.8, 0.5,0.1").unwrap(), vec![0.8, 0.5, 0.1]);
        assert!(parse_x_values("0.5,0").is_err());
        assert!(parse_x_values("").is_err());
    }
}
