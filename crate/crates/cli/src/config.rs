//! Run options shared by the command line and JSON config files.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;
use umbilic::geometry::Kappa;
use umbilic::profile::{Branch, InitialCondition, InvariantSurfaceSpec, IsometryClass};
use umbilic::warp::{Interval, Warp};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Obj,
}

/// Every option of every command. Fields left unset fall back to the
/// config file, then to the defaults below.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunOptions {
    /// JSON file with the same keys as the long flags; flags win.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Only checked against the subcommand when given in a config file.
    #[arg(skip)]
    pub command: Option<String>,

    /// Curvature of the fiber: -1, 0 or 1.
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<i32>,
    /// Catalog name (zero, constant:C, linear:A,B, log-cosecant,
    /// log-cos-over-sqrt-sin, log-cotangent, exp-sum:R,A,B, f1:C0,C,
    /// f2:C0,C, umbilic-family:C0,C) or an expression in t.
    #[arg(long, allow_hyphen_values = true)]
    pub warp: Option<String>,
    /// Open interval on which an expression warp is defined.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub domain: Option<Vec<f64>>,
    /// rotational, euclidean, parabolic or hyperbolic.
    #[arg(long)]
    pub class: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub c0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub s0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rho0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t0: Option<f64>,
    /// Sign of rho_s at the start: + or -.
    #[arg(long, allow_hyphen_values = true)]
    pub branch: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub s_end: Option<f64>,
    /// Local error tolerance of the integrator [default: 1e-10].
    #[arg(long)]
    pub tol: Option<f64>,
    /// Step of the finite-difference shape operator [default: 1e-4].
    #[arg(long)]
    pub fd_step: Option<f64>,
    #[arg(long)]
    pub max_turning_points: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub omega_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub omega_max: Option<f64>,
    /// Samples across the orbit [default: 128].
    #[arg(long)]
    pub omega_steps: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Append the numbered discrepancy reports.
    #[arg(long)]
    #[serde(default)]
    pub discrepancies: bool,
    /// Exit 0 even when the profile stops before --s-end.
    #[arg(long)]
    #[serde(default)]
    pub allow_partial: bool,
    /// Sweep values of c0.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub c0_values: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    pub x0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub y0: Option<f64>,
    /// Initial frame velocity a1,a2,a3 (unit length).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub velocity: Option<Vec<f64>>,
    /// Sample spacing of geodesic output [default: 1e-2].
    #[arg(long)]
    pub spacing: Option<f64>,
    /// Geodesic curvature of the cylinder base in the fiber.
    #[arg(long, allow_negative_numbers = true)]
    pub kappa_g2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub t_steps: Option<usize>,
}

macro_rules! prefer {
    ($a:ident, $b:ident; $($field:ident),*) => {
        $( $a.$field = $a.$field.take().or($b.$field); )*
    };
}

impl RunOptions {
    /// Fills unset fields from the config file named by `--config`.
    pub fn resolve(mut self, command: &str) -> Result<RunOptions, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file = load_config(&path)?;
        if let Some(c) = &file.command {
            if c != command {
                return Err(CliError::Validation(format!(
                    "--config: file is for command `{c}`, not `{command}`"
                )));
            }
        }
        prefer!(self, file; kappa, warp, domain, class, c0, s0, rho0, t0, branch, s_end, tol,
            fd_step, max_turning_points, omega_min, omega_max, omega_steps, format, out, input,
            report, c0_values, x0, y0, velocity, spacing, kappa_g2, t_min, t_max, t_steps);
        self.discrepancies |= file.discrepancies;
        self.allow_partial |= file.allow_partial;
        Ok(self)
    }

    pub fn tol(&self) -> Result<f64, CliError> {
        positive("--tol", self.tol.unwrap_or(1e-10))
    }

    pub fn fd_step(&self) -> Result<f64, CliError> {
        positive("--fd-step", self.fd_step.unwrap_or(1e-4))
    }

    pub fn omega_steps(&self) -> Result<usize, CliError> {
        let n = self.omega_steps.unwrap_or(128);
        if n < 2 {
            return Err(CliError::Validation(format!(
                "--omega-steps must be at least 2, got {n}"
            )));
        }
        Ok(n)
    }

    pub fn omega_range(&self, class: IsometryClass) -> (f64, f64) {
        let default = match class {
            IsometryClass::Rotational(_) => (0.0, TAU),
            IsometryClass::HyperbolicTranslation => (0.5, 2.0),
            _ => (-1.0, 1.0),
        };
        (
            self.omega_min.unwrap_or(default.0),
            self.omega_max.unwrap_or(default.1),
        )
    }

    pub fn kappa(&self) -> Result<Kappa, CliError> {
        let k = self.kappa.unwrap_or(0);
        Kappa::new(k)
            .map_err(|_| CliError::Validation(format!("--kappa must be -1, 0 or 1, got {k}")))
    }

    pub fn warp(&self) -> Result<Warp, CliError> {
        let text = self.warp.as_deref().unwrap_or("zero");
        let domain = match self.domain.as_deref() {
            None => Interval::REAL_LINE,
            Some([lo, hi]) => Interval::new(*lo, *hi)
                .map_err(|e| CliError::Validation(format!("--domain: {e}")))?,
            Some(other) => {
                return Err(CliError::Validation(format!(
                    "--domain needs two numbers, got {}",
                    other.len()
                )))
            }
        };
        let kappa = self.kappa()?.value();
        let reference = self.t0.unwrap_or(0.0);
        parse_warp(text, domain, kappa, reference)
            .map_err(|e| CliError::Validation(format!("--warp: {e}")))
    }

    pub fn class(&self) -> Result<IsometryClass, CliError> {
        let name = self.class.as_deref().unwrap_or("rotational");
        IsometryClass::from_name(name, self.kappa()?)
            .map_err(|e| CliError::Validation(format!("--class: {e}")))
    }

    pub fn branch(&self) -> Result<Branch, CliError> {
        match self.branch.as_deref() {
            None => Ok(Branch::Plus),
            Some(b) => b
                .parse()
                .map_err(|_| CliError::Validation(format!("--branch must be + or -, got `{b}`"))),
        }
    }

    pub fn s_end(&self) -> Result<f64, CliError> {
        self.s_end
            .ok_or_else(|| CliError::Validation("missing --s-end".into()))
    }

    /// The invariant surface described by the options, with `c0`
    /// overridden when given.
    pub fn spec_with(&self, c0: Option<f64>) -> Result<InvariantSurfaceSpec, CliError> {
        let class = self.class()?;
        let c0 = c0
            .or(self.c0)
            .ok_or_else(|| CliError::Validation("missing --c0".into()))?;
        let rho0 = self
            .rho0
            .ok_or_else(|| CliError::Validation("missing --rho0".into()))?;
        let t0 = self
            .t0
            .ok_or_else(|| CliError::Validation("missing --t0".into()))?;
        let initial = InitialCondition {
            s0: self.s0.unwrap_or(0.0),
            rho0,
            t0,
            branch: self.branch()?,
        };
        let spec = InvariantSurfaceSpec::new(class, self.warp()?, c0, initial)
            .map_err(|e| CliError::Validation(e.to_string()))?;
        spec.initial_state()
            .map_err(|e| CliError::Validation(format!("c0 = {c0}: {e}")))?;
        Ok(spec)
    }

    pub fn spec(&self) -> Result<InvariantSurfaceSpec, CliError> {
        self.spec_with(None)
    }
}

fn positive(flag: &str, value: f64) -> Result<f64, CliError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(CliError::Validation(format!(
            "{flag} must be positive, got {value}"
        )))
    }
}

pub fn load_config(path: &Path) -> Result<RunOptions, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("--config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("--config {}: {e}", path.display())))
}

fn numbers(name: &str, args: &str, count: usize) -> umbilic::Result<Vec<f64>> {
    let values: Vec<f64> = args
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| umbilic::Error::Invalid(format!("{name}: {e}")))?;
    if values.len() != count {
        return Err(umbilic::Error::Invalid(format!(
            "{name} takes {count} parameters, got {}",
            values.len()
        )));
    }
    Ok(values)
}

/// Catalog warps by name, anything else as an expression on `domain`.
pub fn parse_warp(
    text: &str,
    domain: Interval,
    kappa: f64,
    reference: f64,
) -> umbilic::Result<Warp> {
    let (name, args) = match text.split_once(':') {
        Some((n, a)) => (n.trim(), Some(a)),
        None => (text.trim(), None),
    };
    match (name, args) {
        ("zero", None) => Ok(Warp::zero()),
        ("log-cosecant", None) => Ok(Warp::log_cosecant()),
        ("log-cos-over-sqrt-sin", None) => Ok(Warp::log_cos_over_sqrt_sin()),
        ("log-cotangent", None) => Ok(Warp::log_cotangent()),
        ("constant", Some(a)) => Ok(Warp::constant(numbers(name, a, 1)?[0])),
        ("linear", Some(a)) => {
            let v = numbers(name, a, 2)?;
            Ok(Warp::linear(v[0], v[1]))
        }
        ("exp-sum", Some(a)) => {
            let v = numbers(name, a, 3)?;
            Warp::log_exp_sum(v[0], v[1], v[2], reference)
        }
        ("f1", Some(a)) => {
            let v = numbers(name, a, 2)?;
            Warp::exp_sum_f1(v[0], v[1], kappa, reference)
        }
        ("f2", Some(a)) => {
            let v = numbers(name, a, 2)?;
            Warp::exp_sum_f2(v[0], v[1], kappa)
        }
        ("umbilic-family", Some(a)) => {
            let v = numbers(name, a, 2)?;
            Warp::constant_umbilic_family(v[0], v[1], kappa, reference)
        }
        _ => Warp::expression(text, domain),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_names() {
        let w = parse_warp("linear:1,2", Interval::REAL_LINE, 0.0, 0.0).unwrap();
        assert_eq!(w.eval(3.0).unwrap().f, 5.0);
        assert!(parse_warp("linear:1", Interval::REAL_LINE, 0.0, 0.0).is_err());
        let e = parse_warp("t^2", Interval::REAL_LINE, 0.0, 0.0).unwrap();
        assert_eq!(e.eval(3.0).unwrap().df, 6.0);
    }

    #[test]
    fn defaults_and_bounds() {
        let o = RunOptions::default();
        assert_eq!(o.tol().unwrap(), 1e-10);
        assert_eq!(o.omega_steps().unwrap(), 128);
        assert!(RunOptions {
            tol: Some(-1.0),
            ..o.clone()
        }
        .tol()
        .is_err());
        assert!(RunOptions {
            kappa: Some(2),
            ..o.clone()
        }
        .kappa()
        .is_err());
        assert!(RunOptions {
            domain: Some(vec![1.0]),
            ..o.clone()
        }
        .warp()
        .is_err());
        assert!(matches!(o.spec(), Err(CliError::Validation(m)) if m == "missing --c0"));
    }

    #[test]
    fn config_keys_are_kebab_case() {
        let o: RunOptions = serde_json::from_str(r#"{"s-end": 2.0, "c0-values": [1, 2]}"#).unwrap();
        assert_eq!(o.s_end, Some(2.0));
        assert_eq!(o.c0_values, Some(vec![1.0, 2.0]));
        assert!(serde_json::from_str::<RunOptions>(r#"{"s_end": 2.0}"#).is_err());
    }
}
