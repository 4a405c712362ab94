//! Numbered reports on formulas whose literal form fails a direct check.
//!
//! Each report carries the value of a residual for the literal formula
//! and for the corrected one used by the rest of the crate, plus, where
//! it exists, a value obtained independently by finite differences.

use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::geodesic::{integrate_geodesic, tanh_law_residual};
use crate::geometry::{constant_umbilic_residual, AmbientPoint, FrameVector, Kappa, WarpedProduct};
use crate::profile::{Branch, InitialCondition, InvariantSurfaceSpec, IsometryClass};
use crate::surface::{
    invariant_surface_curvatures, literal_translation_curvatures, numeric_shape_operator,
    umbilic_gradient_residual, FrameGrid, ProfileImmersion,
};
use crate::warp::Warp;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrepancy {
    pub id: usize,
    pub title: &'static str,
    /// What `literal` and `corrected` measure.
    pub quantity: &'static str,
    pub literal: f64,
    pub corrected: f64,
    /// Independent finite-difference value of one side.
    pub numeric: Option<(Side, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Literal,
    Corrected,
}

impl fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: {}: literal {:.9e}, corrected {:.9e}",
            self.id, self.title, self.quantity, self.literal, self.corrected
        )?;
        match self.numeric {
            Some((Side::Literal, n)) => write!(f, ", finite differences (literal) {n:.9e}")?,
            Some((Side::Corrected, n)) => write!(f, ", finite differences (corrected) {n:.9e}")?,
            None => {}
        }
        Ok(())
    }
}

/// `e^{2f} rho_s^2 + t_s^2 - 1` at `s` for the flat rotational example
/// with `f = ln(1/sin t)` and `t = 2 atan(e^s)`, for `rho = 1/cos s`
/// (literal) and `rho = 1/cosh s` (corrected).
pub fn secant_profile_residual(s: f64) -> (f64, f64) {
    // sin t = sech s, so e^{2f} = cosh^2 s and t_s = sech s
    let e2f = s.cosh().powi(2);
    let t_s = 1.0 / s.cosh();
    let literal_rho_s = s.tan() / s.cos();
    let corrected_rho_s = -s.tanh() / s.cosh();
    let residual = |rho_s: f64| e2f * rho_s * rho_s + t_s * t_s - 1.0;
    (residual(literal_rho_s), residual(corrected_rho_s))
}

/// Unit-speed residual along `rho = t = 2 atan(e^s)` for the spherical
/// example under `f = ln(cos t / sqrt(sin t))` (literal) and
/// `f = ln(cot t)` (corrected).
pub fn spherical_warp_residual(s: f64) -> Result<(f64, f64)> {
    let v = 2.0 * s.exp().atan();
    let v_s = 1.0 / s.cosh();
    let residual = |warp: Warp| -> Result<f64> {
        let f = warp.eval(v)?.f;
        Ok((2.0 * f).exp() * v_s * v_s + v_s * v_s - 1.0)
    };
    Ok((
        residual(Warp::log_cos_over_sqrt_sin())?,
        residual(Warp::log_cotangent())?,
    ))
}

/// `f'' + k e^{-2f}` at `t` for `f = ln|F_1|` with the literal constants
/// and with the corrected ones.
pub fn exp_sum_warp_residual(c0: f64, c: f64, kappa: Kappa, t: f64) -> Result<(f64, f64)> {
    let k = kappa.value();
    let literal = Warp::exp_sum_f1(c0, c, k, t)?;
    let corrected = Warp::constant_umbilic_family(c0, c, k, t)?;
    Ok((
        constant_umbilic_residual(&literal, kappa, t)?,
        constant_umbilic_residual(&corrected, kappa, t)?,
    ))
}

fn second_difference(g: impl Fn(f64) -> Result<f64>, t: f64, h: f64) -> Result<f64> {
    Ok((g(t + h)? - 2.0 * g(t)? + g(t - h)?) / (h * h))
}

/// `k0` rotational example: the mesh frame grid around `(s, omega)`.
fn k0_grid(s: f64, omega: f64, h: f64) -> Result<(InvariantSurfaceSpec, FrameGrid)> {
    let spec = InvariantSurfaceSpec::new(
        IsometryClass::Rotational(Kappa::FLAT),
        Warp::log_cosecant(),
        1.0,
        InitialCondition {
            s0: 0.0,
            rho0: 1.0,
            t0: std::f64::consts::FRAC_PI_2,
            branch: Branch::Minus,
        },
    )?;
    let curve = spec.integrate_profile(s + 0.5, 1e-10)?;
    let anchor = curve.samples[curve.nearest(s).unwrap_or(0)];
    let grid = FrameGrid::sample(
        &spec.ambient(),
        &ProfileImmersion::new(&spec, anchor),
        (anchor.s, omega),
        h,
        2,
    )?;
    Ok((spec, grid))
}

/// Distance between a curvature pair and the numeric principal
/// curvatures, minimized over one global sign.
fn pair_distance(pair: (f64, f64), numeric: (f64, f64)) -> f64 {
    let sorted = |a: f64, b: f64| if a <= b { (a, b) } else { (b, a) };
    let n = sorted(numeric.0, numeric.1);
    [1.0, -1.0]
        .iter()
        .map(|sign| {
            let p = sorted(sign * pair.0, sign * pair.1);
            (p.0 - n.0).abs().max((p.1 - n.1).abs())
        })
        .fold(f64::INFINITY, f64::min)
}

fn translation_report(
    id: usize,
    title: &'static str,
    class: IsometryClass,
    warp: Warp,
    rho0: f64,
    t0: f64,
    omega: f64,
) -> Result<Discrepancy> {
    let spec = InvariantSurfaceSpec::new(
        class,
        warp,
        0.5,
        InitialCondition {
            s0: 0.0,
            rho0,
            t0,
            branch: Branch::Plus,
        },
    )?;
    let curve = spec.integrate_profile(1.0, 1e-10)?;
    let anchor = curve.samples[curve.nearest(0.5).unwrap_or(0)];
    let jet = spec.jet(&anchor)?;
    let imm = ProfileImmersion::new(&spec, anchor);
    let frame = numeric_shape_operator(&spec.ambient(), &imm, (anchor.s, omega), 1e-3)?;
    let numeric = frame.principal_curvatures();
    Ok(Discrepancy {
        id,
        title,
        quantity: "distance of the curvature pair to the finite-difference principal curvatures (up to one global sign)",
        literal: pair_distance(literal_translation_curvatures(&spec, &jet)?, numeric),
        corrected: pair_distance(invariant_surface_curvatures(&spec, &jet)?, numeric),
        numeric: None,
    })
}

/// All reports, in a fixed order.
pub fn discrepancy_reports() -> Result<Vec<Discrepancy>> {
    let mut out = Vec::new();

    let (literal, corrected) = secant_profile_residual(1.0);
    out.push(Discrepancy {
        id: 1,
        title: "flat rotational example with rho = 1/cos(s)",
        quantity: "unit-speed residual at s = 1",
        literal,
        corrected,
        numeric: None,
    });

    let (literal, corrected) = spherical_warp_residual(-0.5)?;
    out.push(Discrepancy {
        id: 2,
        title: "spherical rotational example with f = ln(cos t / sqrt(sin t))",
        quantity: "unit-speed residual at s = -0.5 (corrected warp: ln(cot t))",
        literal,
        corrected,
        numeric: None,
    });

    let (literal, corrected) = exp_sum_warp_residual(1.0, 1.0, Kappa::SPHERICAL, 0.0)?;
    let f1 = Warp::exp_sum_f1(1.0, 1.0, 1.0, 0.0)?;
    let fd = second_difference(|t| Ok(f1.eval(t)?.f), 0.0, 1e-4)? + (-2.0 * f1.eval(0.0)?.f).exp();
    out.push(Discrepancy {
        id: 3,
        title: "exp-sum warp F1 with the literal constants, k = c0 = c = 1",
        quantity: "f'' + k e^{-2f} at t = 0 (corrected: A B = -k/(4 c0))",
        literal,
        corrected,
        numeric: Some((Side::Literal, fd)),
    });

    let space = WarpedProduct::new(Kappa::FLAT, Warp::linear(1.0, 0.0));
    let nu0: f64 = 0.5;
    let velocity = FrameVector::new((1.0 - nu0 * nu0).sqrt(), 0.0, nu0);
    let curve = integrate_geodesic(
        &space,
        AmbientPoint::new(0.0, 0.0, 0.0),
        velocity,
        2.0,
        1e-12,
    )?;
    out.push(Discrepancy {
        id: 4,
        title: "angle function of a geodesic, k = 0, f = t, nu(0) = 0.5",
        quantity: "largest drift of nu - tanh(f + C) (literal) and of (1 - nu^2) e^{2f} (corrected) over s in [0, 2]",
        literal: tanh_law_residual(&space, &curve)?,
        corrected: curve.conserved_drift(),
        numeric: None,
    });

    let space = WarpedProduct::new(Kappa::FLAT, Warp::log_cosecant());
    let p = AmbientPoint::new(0.2, 0.1, 1.0);
    let w = space.warp.eval(p.t)?;
    // E1 = d_x / (lambda e^f); d_t E1 + Gamma^x_{tx} E1 in E1 components
    let log_len = |t: f64| -> Result<f64> { Ok(-space.warp.eval(t)?.f) };
    let g_xx = |t: f64| -> Result<f64> { Ok((2.0 * space.warp.eval(t)?.f).exp()) };
    let h = 1e-5;
    let d_log_len = (log_len(p.t + h)? - log_len(p.t - h)?) / (2.0 * h);
    let gamma = 0.5 * (g_xx(p.t + h)? - g_xx(p.t - h)?) / (2.0 * h) / g_xx(p.t)?;
    out.push(Discrepancy {
        id: 5,
        title: "vertical derivative of the horizontal frame",
        quantity: "g(nabla_xi E1, E1) at t = 1 for f = ln(1/sin t) (literal entry f' E1)",
        literal: w.df,
        corrected: space.connection_table(&p)?[2][0][0],
        numeric: Some((Side::Corrected, d_log_len + gamma)),
    });

    let e1 = FrameVector::new(1.0, 0.0, 0.0);
    let xi = WarpedProduct::xi();
    // the plane y = 0 is totally geodesic for k = 0: its Gauss curvature
    // -(e^f)''/e^f is the mixed sectional curvature
    let ef = |t: f64| -> Result<f64> { Ok(space.warp.eval(t)?.f.exp()) };
    let sectional = -second_difference(ef, p.t, 1e-4)? / ef(p.t)?;
    out.push(Discrepancy {
        id: 6,
        title: "mixed curvature R(V, X) Y",
        quantity: "g(R(xi, E1) E1, xi) at t = 1 for f = ln(1/sin t)",
        literal: w.d2f - w.df * w.df,
        corrected: space.curvature(&p, &xi, &e1, &e1)?.dot(&xi),
        numeric: Some((Side::Corrected, -sectional)),
    });

    let (spec, grid) = k0_grid(1.0, 0.3, 1e-3)?;
    out.push(Discrepancy {
        id: 7,
        title: "gradient of the umbilical function",
        quantity: "|grad varrho -+ nu (f'' + k e^{-2f}) T| on the flat rotational example near s = 1, h = 1e-3",
        literal: umbilic_gradient_residual(&grid, spec.kappa(), spec.warp(), 1.0)?,
        corrected: umbilic_gradient_residual(&grid, spec.kappa(), spec.warp(), -1.0)?,
        numeric: None,
    });

    out.push(translation_report(
        8,
        "euclidean translation principal curvatures",
        IsometryClass::EuclideanTranslation,
        Warp::log_cosecant(),
        0.3,
        1.0,
        0.2,
    )?);
    out.push(translation_report(
        9,
        "parabolic translation principal curvatures",
        IsometryClass::ParabolicTranslation,
        Warp::linear(0.5, 0.0),
        2.5,
        0.3,
        0.2,
    )?);
    out.push(translation_report(
        10,
        "hyperbolic translation principal curvatures",
        IsometryClass::HyperbolicTranslation,
        Warp::log_cosecant(),
        1.2,
        1.0,
        1.3,
    )?);
    Ok(out)
}
