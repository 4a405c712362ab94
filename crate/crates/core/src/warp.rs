//! Warping functions `f: I -> R` together with their first two derivatives.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{self, Expr};

/// Open interval `(lo, hi)`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const REAL_LINE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Result<Interval> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::Invalid(format!("empty interval ({lo}, {hi})")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn contains(&self, t: f64) -> bool {
        t > self.lo && t < self.hi
    }
}

/// `f(t)`, `f'(t)`, `f''(t)` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpValue {
    pub f: f64,
    pub df: f64,
    pub d2f: f64,
}

impl WarpValue {
    /// `e^{f}`.
    pub fn scale(&self) -> f64 {
        self.f.exp()
    }
}

/// Closed-form warps plus user expressions.
#[derive(Debug, Clone, PartialEq)]
pub enum WarpKind {
    /// `f = c`.
    Constant { c: f64 },
    /// `f = a t + b`.
    Linear { a: f64, b: f64 },
    /// `f = ln(1/sin t)` on `(0, pi)`.
    LogCosecant,
    /// `f = ln(cos t / sqrt(sin t))` on `(0, pi/2)`.
    LogCosOverSqrtSin,
    /// `f = ln(cot t)` on `(0, pi/2)`.
    LogCotangent,
    /// `f = ln|A e^{rt} + B e^{-rt}|`, the family solving `f'' + k e^{-2f} = 0`
    /// when `4 r^2 A B = -k`.
    LogExpSum { rate: f64, a: f64, b: f64 },
    /// Parsed expression with its symbolic derivatives.
    Expression(Box<CompiledExpr>),
}

/// An expression together with its first and second derivative trees.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledExpr {
    pub source: String,
    pub f: Expr,
    pub df: Expr,
    pub d2f: Expr,
}

impl CompiledExpr {
    pub fn new(text: &str) -> Result<CompiledExpr> {
        let f = expr::parse(text)?;
        let df = f.derivative();
        let d2f = df.derivative();
        Ok(CompiledExpr {
            source: text.to_string(),
            f,
            df,
            d2f,
        })
    }
}

/// A warping function restricted to an open interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Warp {
    kind: WarpKind,
    domain: Interval,
}

impl Warp {
    pub fn constant(c: f64) -> Warp {
        Warp {
            kind: WarpKind::Constant { c },
            domain: Interval::REAL_LINE,
        }
    }

    /// `f = 0`: the plain Riemannian product.
    pub fn zero() -> Warp {
        Warp::constant(0.0)
    }

    pub fn linear(a: f64, b: f64) -> Warp {
        Warp {
            kind: WarpKind::Linear { a, b },
            domain: Interval::REAL_LINE,
        }
    }

    pub fn log_cosecant() -> Warp {
        Warp {
            kind: WarpKind::LogCosecant,
            domain: Interval {
                lo: 0.0,
                hi: std::f64::consts::PI,
            },
        }
    }

    pub fn log_cos_over_sqrt_sin() -> Warp {
        Warp {
            kind: WarpKind::LogCosOverSqrtSin,
            domain: Interval {
                lo: 0.0,
                hi: FRAC_PI_2,
            },
        }
    }

    pub fn log_cotangent() -> Warp {
        Warp {
            kind: WarpKind::LogCotangent,
            domain: Interval {
                lo: 0.0,
                hi: FRAC_PI_2,
            },
        }
    }

    /// `f = ln|A e^{rt} + B e^{-rt}|` on the maximal interval containing
    /// `reference` on which the argument does not vanish.
    pub fn log_exp_sum(rate: f64, a: f64, b: f64, reference: f64) -> Result<Warp> {
        if !(rate > 0.0) || (a == 0.0 && b == 0.0) {
            return Err(Error::Invalid(format!(
                "exp-sum warp needs rate > 0 and (A, B) != 0, got rate={rate}, A={a}, B={b}"
            )));
        }
        let domain = match exp_sum_zero(rate, a, b) {
            None => Interval::REAL_LINE,
            Some(zero) if reference > zero => Interval {
                lo: zero,
                hi: f64::INFINITY,
            },
            Some(zero) if reference < zero => Interval {
                lo: f64::NEG_INFINITY,
                hi: zero,
            },
            Some(zero) => {
                return Err(Error::Invalid(format!(
                    "reference point {reference} is the zero {zero} of the exp-sum warp"
                )))
            }
        };
        Ok(Warp {
            kind: WarpKind::LogExpSum { rate, a, b },
            domain,
        })
    }

    /// `f = ln F_1` with `F_1 = e^{-sqrt(c0) t} / (4 c0 c) [c^2 e^{2 sqrt(c0) t} - 2 c0 k]`
    /// with the literal constants. The domain is the component of `F_1 != 0`
    /// containing `reference`.
    pub fn exp_sum_f1(c0: f64, c: f64, kappa: f64, reference: f64) -> Result<Warp> {
        check_family_constants(c0, c)?;
        let rate = c0.sqrt();
        Warp::log_exp_sum(rate, c / (4.0 * c0), -kappa / (2.0 * c), reference)
    }

    /// `f = ln F_2` with `F_2 = e^{-sqrt(c0) t} / (4 c0 c) [c^2 - 2 c0 e^{2 sqrt(c0)} k]`
    /// with the literal constants.
    pub fn exp_sum_f2(c0: f64, c: f64, kappa: f64) -> Result<Warp> {
        check_family_constants(c0, c)?;
        let rate = c0.sqrt();
        let coeff = (c * c - 2.0 * c0 * (2.0 * rate).exp() * kappa) / (4.0 * c0 * c);
        Warp::log_exp_sum(rate, 0.0, coeff, 0.0)
    }

    /// `F = A e^{sqrt(c0) t} + B e^{-sqrt(c0) t}` with `A = c/(4 c0)` and
    /// `A B = -k/(4 c0)`: the constants for which `f = ln|F|` makes
    /// `f'' + k e^{-2f}` vanish identically.
    pub fn constant_umbilic_family(c0: f64, c: f64, kappa: f64, reference: f64) -> Result<Warp> {
        check_family_constants(c0, c)?;
        let a = c / (4.0 * c0);
        let b = -kappa / (4.0 * c0 * a);
        Warp::log_exp_sum(c0.sqrt(), a, b, reference)
    }

    /// Parses `text` as a warp on `domain`.
    pub fn expression(text: &str, domain: Interval) -> Result<Warp> {
        Ok(Warp {
            kind: WarpKind::Expression(Box::new(CompiledExpr::new(text)?)),
            domain,
        })
    }

    pub fn kind(&self) -> &WarpKind {
        &self.kind
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// Returns `(f, f', f'')` at `t`; `t` must lie strictly inside the domain.
    pub fn eval(&self, t: f64) -> Result<WarpValue> {
        if !self.domain.contains(t) {
            return Err(Error::WarpDomain {
                t,
                lo: self.domain.lo,
                hi: self.domain.hi,
            });
        }
        let value = match &self.kind {
            WarpKind::Constant { c } => WarpValue {
                f: *c,
                df: 0.0,
                d2f: 0.0,
            },
            WarpKind::Linear { a, b } => WarpValue {
                f: a * t + b,
                df: *a,
                d2f: 0.0,
            },
            WarpKind::LogCosecant => {
                let (s, c) = t.sin_cos();
                WarpValue {
                    f: -s.ln(),
                    df: -c / s,
                    d2f: 1.0 / (s * s),
                }
            }
            WarpKind::LogCosOverSqrtSin => {
                let (s, c) = t.sin_cos();
                WarpValue {
                    f: c.ln() - 0.5 * s.ln(),
                    df: -s / c - 0.5 * c / s,
                    d2f: -1.0 / (c * c) + 0.5 / (s * s),
                }
            }
            WarpKind::LogCotangent => {
                let (s, c) = t.sin_cos();
                WarpValue {
                    f: (c / s).ln(),
                    df: -s / c - c / s,
                    d2f: -1.0 / (c * c) + 1.0 / (s * s),
                }
            }
            WarpKind::LogExpSum { rate, a, b } => {
                let (ep, em) = ((rate * t).exp(), (-rate * t).exp());
                let big_f = a * ep + b * em;
                let ratio = rate * (a * ep - b * em) / big_f;
                WarpValue {
                    f: big_f.abs().ln(),
                    df: ratio,
                    d2f: rate * rate - ratio * ratio,
                }
            }
            WarpKind::Expression(compiled) => WarpValue {
                f: compiled.f.eval(t)?,
                df: compiled.df.eval(t)?,
                d2f: compiled.d2f.eval(t)?,
            },
        };
        Ok(value)
    }

    /// Text form accepted by [`Warp::expression`], when one exists.
    pub fn expression_text(&self) -> Option<String> {
        match &self.kind {
            WarpKind::Constant { c } => Some(format!("{c:?}")),
            WarpKind::Linear { a, b } => Some(format!("{a:?}*t + ({b:?})")),
            WarpKind::LogCosecant => Some("log(1/sin(t))".into()),
            WarpKind::LogCosOverSqrtSin => Some("log(cos(t)/sqrt(sin(t)))".into()),
            WarpKind::LogCotangent => Some("log(cos(t)/sin(t))".into()),
            WarpKind::LogExpSum { rate, a, b } => {
                let sum = format!("({a:?})*exp({rate:?}*t) + ({b:?})*exp(-({rate:?}*t))");
                let mid = match (self.domain.lo.is_finite(), self.domain.hi.is_finite()) {
                    (true, true) => 0.5 * (self.domain.lo + self.domain.hi),
                    (true, false) => self.domain.lo + 1.0,
                    (false, true) => self.domain.hi - 1.0,
                    (false, false) => 0.0,
                };
                let sign = a * (rate * mid).exp() + b * (-rate * mid).exp();
                Some(if sign > 0.0 {
                    format!("log({sum})")
                } else {
                    format!("log(-({sum}))")
                })
            }
            WarpKind::Expression(compiled) => Some(compiled.source.clone()),
        }
    }
}

impl fmt::Display for Warp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.expression_text() {
            Some(text) => write!(f, "f(t) = {text}"),
            None => write!(f, "{:?}", self.kind),
        }
    }
}

fn check_family_constants(c0: f64, c: f64) -> Result<()> {
    if c0 > 0.0 && c > 0.0 {
        Ok(())
    } else {
        Err(Error::Invalid(format!(
            "constants c0 and c must be positive, got c0={c0}, c={c}"
        )))
    }
}

// Zero of A e^{rt} + B e^{-rt}, if any.
fn exp_sum_zero(rate: f64, a: f64, b: f64) -> Option<f64> {
    if a * b < 0.0 {
        Some((-b / a).ln() / (2.0 * rate))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalog() -> Vec<(Warp, Vec<f64>)> {
        vec![
            (Warp::constant(0.3), vec![-1.0, 0.0, 2.5]),
            (Warp::linear(1.5, -0.2), vec![-1.0, 0.4, 2.5]),
            (Warp::log_cosecant(), vec![0.3, 1.0, 2.8]),
            (Warp::log_cos_over_sqrt_sin(), vec![0.2, 0.7, 1.4]),
            (Warp::log_cotangent(), vec![0.2, 0.7, 1.4]),
            (
                Warp::exp_sum_f1(1.0, 1.0, 1.0, 0.0).unwrap(),
                vec![-1.0, 0.0, 0.3],
            ),
            (
                Warp::exp_sum_f1(2.0, 0.5, -1.0, 0.0).unwrap(),
                vec![-1.0, 0.0, 1.0],
            ),
            (
                Warp::exp_sum_f2(1.0, 2.0, 0.0).unwrap(),
                vec![-1.0, 0.0, 1.0],
            ),
            (
                Warp::constant_umbilic_family(0.7, 1.2, 1.0, 2.0).unwrap(),
                vec![1.0, 2.0, 3.0],
            ),
        ]
    }

    #[test]
    fn derivatives_match_central_differences_to_second_order() {
        for (warp, points) in catalog() {
            for t in points {
                let v = warp.eval(t).unwrap();
                for h in [1e-3, 5e-4] {
                    let fp = warp.eval(t + h).unwrap();
                    let fm = warp.eval(t - h).unwrap();
                    let d1 = (fp.f - fm.f) / (2.0 * h);
                    let d2 = (fp.df - fm.df) / (2.0 * h);
                    let bound = 50.0 * h * h * (1.0 + v.df.abs() + v.d2f.abs());
                    assert!((v.df - d1).abs() <= bound, "{warp} f' at {t}");
                    assert!((v.d2f - d2).abs() <= 10.0 * bound, "{warp} f'' at {t}");
                }
            }
        }
    }

    #[test]
    fn endpoints_are_rejected() {
        let w = Warp::log_cosecant();
        assert!(matches!(w.eval(0.0), Err(Error::WarpDomain { .. })));
        assert!(matches!(
            w.eval(std::f64::consts::PI),
            Err(Error::WarpDomain { .. })
        ));
        assert!(w.eval(1.0).is_ok());
    }

    #[test]
    fn f1_domain_follows_the_reference_point() {
        // kappa = 1, c0 = c = 1: F_1 = e^t/4 - e^{-t}/2 vanishes at ln(2)/2.
        let zero = 0.5 * 2f64.ln();
        let left = Warp::exp_sum_f1(1.0, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(left.domain().hi, zero);
        let right = Warp::exp_sum_f1(1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(right.domain().lo, zero);
        assert!(Warp::exp_sum_f1(1.0, 1.0, 1.0, zero).is_err());
    }

    #[test]
    fn expression_warp_reports_domain_errors() {
        let w = Warp::expression("log(1/sin(t))", Interval::REAL_LINE).unwrap();
        assert!(matches!(w.eval(0.0), Err(Error::Expr(_))));
    }
}
