//! Profile curves of invariant totally umbilical surfaces.
//!
//! A profile is an arclength-parametrized curve `(rho(s), t(s))` in a
//! vertical totally geodesic plane. Its orbit under a one-parameter group
//! of isometries is umbilical exactly when `t_s = k l(rho)` for the
//! class-dependent function `l` below.
//!
//! Internally the curve is integrated through its slope angle `theta`
//! (`t_s = sin theta`), so turning points where `rho_s` changes sign are
//! regular points of the system instead of square-root branch points.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{AmbientPoint, FrameVector, Kappa, WarpedProduct};
use crate::ode::{self, OdeSystem, Options, Termination};
use crate::warp::Warp;

/// Rotational profiles stop when `rho` drops below this.
pub const AXIS_THRESHOLD: f64 = 1e-9;
/// Default maximum number of turning points before integration stops.
pub const MAX_TURNING_POINTS: usize = 32;

/// The one-parameter isometry group generating the surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IsometryClass {
    /// Rotations about the vertical axis through the origin, any `k`.
    Rotational(Kappa),
    /// Translations of the Euclidean plane (`k = 0`).
    EuclideanTranslation,
    /// Parabolic translations of the half-plane (`k = -1`).
    ParabolicTranslation,
    /// Hyperbolic translations (dilations) of the half-plane (`k = -1`).
    HyperbolicTranslation,
}

impl IsometryClass {
    /// Builds a class from its name and the fiber curvature, rejecting
    /// unsupported pairings.
    pub fn from_name(name: &str, kappa: Kappa) -> Result<IsometryClass> {
        let class = match name {
            "rotational" => IsometryClass::Rotational(kappa),
            "euclidean" | "euclidean-translation" => IsometryClass::EuclideanTranslation,
            "parabolic" | "parabolic-translation" => IsometryClass::ParabolicTranslation,
            "hyperbolic" | "hyperbolic-translation" => IsometryClass::HyperbolicTranslation,
            other => {
                return Err(Error::Invalid(format!(
                    "unknown isometry class '{other}' (expected rotational, euclidean, parabolic or hyperbolic)"
                )))
            }
        };
        if class.kappa() != kappa {
            return Err(Error::Invalid(format!(
                "{} requires kappa = {}, got {}",
                class.name(),
                class.kappa().get(),
                kappa.get()
            )));
        }
        Ok(class)
    }

    pub fn name(self) -> &'static str {
        match self {
            IsometryClass::Rotational(_) => "rotational",
            IsometryClass::EuclideanTranslation => "euclidean",
            IsometryClass::ParabolicTranslation => "parabolic",
            IsometryClass::HyperbolicTranslation => "hyperbolic",
        }
    }

    pub fn kappa(self) -> Kappa {
        match self {
            IsometryClass::Rotational(k) => k,
            IsometryClass::EuclideanTranslation => Kappa::FLAT,
            _ => Kappa::HYPERBOLIC,
        }
    }

    /// The ambient space in the chart used by this class.
    pub fn ambient(self, warp: Warp) -> WarpedProduct {
        match self {
            IsometryClass::ParabolicTranslation | IsometryClass::HyperbolicTranslation => {
                WarpedProduct::half_plane(warp)
            }
            _ => WarpedProduct::new(self.kappa(), warp),
        }
    }

    /// Whether `rho` lies in the open chart of the profile parameter.
    pub fn in_chart(self, rho: f64) -> bool {
        if !rho.is_finite() {
            return false;
        }
        match self {
            IsometryClass::Rotational(k) if k == Kappa::SPHERICAL => rho > 0.0 && rho < PI,
            IsometryClass::Rotational(_) | IsometryClass::ParabolicTranslation => rho > 0.0,
            IsometryClass::EuclideanTranslation => true,
            IsometryClass::HyperbolicTranslation => rho > 0.0 && rho < PI,
        }
    }

    fn check_rho(self, rho: f64) -> Result<()> {
        if self.in_chart(rho) {
            Ok(())
        } else {
            Err(Error::ProfileChart { rho })
        }
    }

    /// Chart data at `rho`: `mu` with `e^f mu |d rho|` the horizontal
    /// length element, `l` the first-integral profile, and derivatives.
    pub(crate) fn jet(self, rho: f64) -> ClassJet {
        match self {
            IsometryClass::Rotational(k) => {
                let (sn, cs) = match k.get() {
                    -1 => (rho.sinh(), rho.cosh()),
                    0 => (rho, 1.0),
                    _ => (rho.sin(), rho.cos()),
                };
                ClassJet {
                    mu: 1.0,
                    dmu: 0.0,
                    ell: sn,
                    dell_du: cs,
                }
            }
            IsometryClass::EuclideanTranslation => ClassJet {
                mu: 1.0,
                dmu: 0.0,
                ell: 1.0,
                dell_du: 0.0,
            },
            IsometryClass::ParabolicTranslation => ClassJet {
                mu: 1.0 / rho,
                dmu: -1.0 / (rho * rho),
                ell: 1.0 / rho,
                dell_du: -1.0 / rho,
            },
            IsometryClass::HyperbolicTranslation => {
                let (s, c) = rho.sin_cos();
                ClassJet {
                    mu: 1.0 / s,
                    dmu: -c / (s * s),
                    ell: 1.0 / s,
                    dell_du: -c / s,
                }
            }
        }
    }

    /// Coefficient multiplying `l(rho)` in the first integral.
    pub(crate) fn coefficient(self, c0: f64) -> f64 {
        match self {
            IsometryClass::ParabolicTranslation => 1.0 / c0,
            _ => c0,
        }
    }

    /// Chart coordinates of the orbit point with parameters `(rho, t, omega)`.
    pub fn position(self, rho: f64, t: f64, omega: f64) -> AmbientPoint {
        match self {
            IsometryClass::Rotational(k) => {
                let r = match k.get() {
                    -1 => (0.5 * rho).tanh(),
                    0 => rho,
                    _ => (0.5 * rho).tan(),
                };
                AmbientPoint::new(r * omega.cos(), r * omega.sin(), t)
            }
            IsometryClass::EuclideanTranslation => AmbientPoint::new(rho, omega, t),
            IsometryClass::ParabolicTranslation => AmbientPoint::new(omega, rho, t),
            IsometryClass::HyperbolicTranslation => {
                AmbientPoint::new(omega * rho.cos(), omega * rho.sin(), t)
            }
        }
    }

    /// `position(rho + d_rho, t + d_t, omega + d_omega) - position(rho, t, omega)`
    /// evaluated without cancellation.
    pub fn displacement(
        self,
        rho: f64,
        omega: f64,
        d_rho: f64,
        d_t: f64,
        d_omega: f64,
    ) -> [f64; 3] {
        // cos(a + d) - cos a and sin(a + d) - sin a
        let dcos = |a: f64, d: f64| -2.0 * (a + 0.5 * d).sin() * (0.5 * d).sin();
        let dsin = |a: f64, d: f64| 2.0 * (a + 0.5 * d).cos() * (0.5 * d).sin();
        match self {
            IsometryClass::Rotational(k) => {
                let half = 0.5 * rho;
                let (r, dr) = match k.get() {
                    -1 => (
                        half.tanh(),
                        (0.5 * d_rho).sinh() / (half.cosh() * (half + 0.5 * d_rho).cosh()),
                    ),
                    0 => (rho, d_rho),
                    _ => (
                        half.tan(),
                        (0.5 * d_rho).sin() / (half.cos() * (half + 0.5 * d_rho).cos()),
                    ),
                };
                let (c, sn) = (omega.cos(), omega.sin());
                let (dc, ds) = (dcos(omega, d_omega), dsin(omega, d_omega));
                [dr * c + r * dc + dr * dc, dr * sn + r * ds + dr * ds, d_t]
            }
            IsometryClass::EuclideanTranslation => [d_rho, d_omega, d_t],
            IsometryClass::ParabolicTranslation => [d_omega, d_rho, d_t],
            IsometryClass::HyperbolicTranslation => {
                let (c, sn) = (rho.cos(), rho.sin());
                let (dc, ds) = (dcos(rho, d_rho), dsin(rho, d_rho));
                [
                    d_omega * c + omega * dc + d_omega * dc,
                    d_omega * sn + omega * ds + d_omega * ds,
                    d_t,
                ]
            }
        }
    }

    /// Unit horizontal direction of increasing `rho` at the orbit point, in
    /// frame components.
    pub fn radial_direction(self, rho: f64, omega: f64) -> FrameVector {
        match self {
            IsometryClass::Rotational(_) => FrameVector::new(omega.cos(), omega.sin(), 0.0),
            IsometryClass::EuclideanTranslation => FrameVector::new(1.0, 0.0, 0.0),
            IsometryClass::ParabolicTranslation => FrameVector::new(0.0, 1.0, 0.0),
            IsometryClass::HyperbolicTranslation => FrameVector::new(-rho.sin(), rho.cos(), 0.0),
        }
    }
}

impl fmt::Display for IsometryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsometryClass::Rotational(k) => write!(f, "rotational (kappa = {})", k.get()),
            other => write!(f, "{}-translation", other.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ClassJet {
    pub mu: f64,
    pub dmu: f64,
    pub ell: f64,
    /// `dl/du` where `du = mu drho`.
    pub dell_du: f64,
}

/// Sign of `rho_s` at the initial point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

impl FromStr for Branch {
    type Err = Error;
    fn from_str(s: &str) -> Result<Branch> {
        match s {
            "+" | "+1" | "1" | "plus" => Ok(Branch::Plus),
            "-" | "-1" | "minus" => Ok(Branch::Minus),
            other => Err(Error::Invalid(format!(
                "branch must be + or -, got '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialCondition {
    pub s0: f64,
    pub rho0: f64,
    pub t0: f64,
    pub branch: Branch,
}

/// A point of the profile with its arclength derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileState {
    pub s: f64,
    pub rho: f64,
    pub t: f64,
    pub rho_s: f64,
    pub t_s: f64,
}

/// A state together with its second derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileJet {
    pub state: ProfileState,
    pub rho_ss: f64,
    pub t_ss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationResult {
    /// Strictly increasing in `s`.
    pub samples: Vec<ProfileState>,
    pub termination: Termination,
    /// Arclength values where `rho_s` changed sign.
    pub turning_points: Vec<f64>,
}

impl IntegrationResult {
    pub fn completed(&self) -> bool {
        self.termination == Termination::ReachedEnd
    }

    /// Index of the sample closest to `s`.
    pub fn nearest(&self, s: f64) -> Option<usize> {
        if self.samples.is_empty() {
            return None;
        }
        let i = self.samples.partition_point(|x| x.s < s);
        let candidates = [i.saturating_sub(1), i.min(self.samples.len() - 1)];
        candidates.into_iter().min_by(|&a, &b| {
            (self.samples[a].s - s)
                .abs()
                .total_cmp(&(self.samples[b].s - s).abs())
        })
    }
}

/// Everything needed to generate one invariant surface.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantSurfaceSpec {
    class: IsometryClass,
    warp: Warp,
    c0: f64,
    initial: InitialCondition,
}

impl InvariantSurfaceSpec {
    pub fn new(
        class: IsometryClass,
        warp: Warp,
        c0: f64,
        initial: InitialCondition,
    ) -> Result<InvariantSurfaceSpec> {
        if !(c0.is_finite() && c0 > 0.0) {
            return Err(Error::Invalid(format!("c0 must be positive, got {c0}")));
        }
        if !initial.s0.is_finite() {
            return Err(Error::Invalid(format!(
                "s0 must be finite, got {}",
                initial.s0
            )));
        }
        warp.eval(initial.t0)?;
        class.check_rho(initial.rho0)?;
        Ok(InvariantSurfaceSpec {
            class,
            warp,
            c0,
            initial,
        })
    }

    pub fn class(&self) -> IsometryClass {
        self.class
    }

    pub fn warp(&self) -> &Warp {
        &self.warp
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn initial(&self) -> InitialCondition {
        self.initial
    }

    pub fn kappa(&self) -> Kappa {
        self.class.kappa()
    }

    pub fn ambient(&self) -> WarpedProduct {
        self.class.ambient(self.warp.clone())
    }

    /// The value of `t_s` prescribed by the first integral at `rho`:
    /// `c0 sinh rho | c0 rho | c0 sin rho` for rotations and
    /// `c0 | 1/(c0 rho) | c0/sin rho` for translations.
    pub fn first_integral_target(&self, rho: f64) -> Result<f64> {
        self.class.check_rho(rho)?;
        Ok(self.class.coefficient(self.c0) * self.class.jet(rho).ell)
    }

    /// `(rho_s, t_s)` at `(rho, t)` on the given branch.
    pub fn profile_rhs(&self, rho: f64, t: f64, branch: Branch) -> Result<(f64, f64)> {
        let t_s = self.first_integral_target(rho)?;
        if t_s.abs() > 1.0 {
            return Err(Error::Inadmissible { target: t_s });
        }
        let w = self.warp.eval(t)?;
        let mu = self.class.jet(rho).mu;
        let rho_s = branch.sign() * (-w.f).exp() * (1.0 - t_s * t_s).sqrt() / mu;
        Ok((rho_s, t_s))
    }

    pub fn initial_state(&self) -> Result<ProfileState> {
        let i = self.initial;
        let (rho_s, t_s) = self.profile_rhs(i.rho0, i.t0, i.branch)?;
        Ok(ProfileState {
            s: i.s0,
            rho: i.rho0,
            t: i.t0,
            rho_s,
            t_s,
        })
    }

    /// `e^{2f} mu^2 rho_s^2 + t_s^2 - 1`.
    pub fn unit_speed_residual(&self, state: &ProfileState) -> Result<f64> {
        let w = self.warp.eval(state.t)?;
        let u_s = self.class.jet(state.rho).mu * state.rho_s;
        Ok((2.0 * w.f).exp() * u_s * u_s + state.t_s * state.t_s - 1.0)
    }

    /// `t_s - first_integral_target(rho)`.
    pub fn first_integral_residual(&self, state: &ProfileState) -> Result<f64> {
        Ok(state.t_s - self.first_integral_target(state.rho)?)
    }

    /// Second derivatives from differentiating the system along the flow.
    pub fn jet(&self, state: &ProfileState) -> Result<ProfileJet> {
        self.class.check_rho(state.rho)?;
        let w = self.warp.eval(state.t)?;
        let cj = self.class.jet(state.rho);
        let inv = (-w.f).exp();
        let cos = state.rho_s * cj.mu / inv;
        let sin = state.t_s;
        let theta_s = self.class.coefficient(self.c0) * cj.dell_du * inv;
        let t_ss = cos * theta_s;
        let rho_ss = -w.df * state.t_s * state.rho_s
            - inv * sin * theta_s / cj.mu
            - state.rho_s * state.rho_s * cj.dmu / cj.mu;
        Ok(ProfileJet {
            state: *state,
            rho_ss,
            t_ss,
        })
    }

    /// Integrates from the initial condition to `s_end` with local
    /// tolerance `tol`.
    pub fn integrate_profile(&self, s_end: f64, tol: f64) -> Result<IntegrationResult> {
        self.integrate_profile_with(s_end, tol, MAX_TURNING_POINTS)
    }

    pub fn integrate_profile_with(
        &self,
        s_end: f64,
        tol: f64,
        max_turning_points: usize,
    ) -> Result<IntegrationResult> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Invalid(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        if !(s_end.is_finite() && s_end > self.initial.s0) {
            return Err(Error::Invalid(format!(
                "s_end must exceed s0 = {}, got {s_end}",
                self.initial.s0
            )));
        }
        let start = self.initial_state()?;
        let system = AngleSystem { spec: self };
        let options = Options {
            tol,
            initial_step: 1e-3,
            max_step: 0.05,
            max_events: max_turning_points,
            ..Options::default()
        };
        let solution = ode::integrate(
            &system,
            start.s,
            system.angle_state(&start)?,
            s_end,
            &options,
        );
        let mut samples = Vec::with_capacity(solution.samples.len());
        let mut turning_points = Vec::new();
        for sample in &solution.samples {
            samples.push(system.profile_state(sample.s, &sample.y)?);
            if sample.event {
                turning_points.push(sample.s);
            }
        }
        Ok(IntegrationResult {
            samples,
            termination: solution.termination,
            turning_points,
        })
    }

    /// Re-integrates from `anchor` to `s` with a fixed number of steps.
    ///
    /// The result is a smooth function of `s`, which finite-difference
    /// stencils centred near `anchor` rely on.
    pub fn evaluate_from(&self, anchor: &ProfileState, s: f64) -> Result<ProfileState> {
        Ok(self.advance(anchor, s - anchor.s)?.0)
    }

    /// The state at `from.s + ds` and the increments `(d rho, d t)`,
    /// accumulated separately so that they keep full relative precision
    /// when `ds` is small.
    pub fn advance(&self, from: &ProfileState, ds: f64) -> Result<(ProfileState, [f64; 2])> {
        let system = AngleSystem { spec: self };
        let y0 = system.angle_state(from)?;
        let steps = ((ds.abs() / 2e-3).ceil() as usize).max(4);
        let h = ds / steps as f64;
        let mut delta = [0.0; 3];
        for k in 0..steps {
            let y = [y0[0] + delta[0], y0[1] + delta[1], y0[2] + delta[2]];
            let inc = ode::increment(&system, from.s + k as f64 * h, &y, h).map_err(|why| {
                Error::Invalid(format!(
                    "profile cannot be continued to s = {}: {why}",
                    from.s + ds
                ))
            })?;
            for i in 0..3 {
                delta[i] += inc[i];
            }
        }
        let y = [y0[0] + delta[0], y0[1] + delta[1], y0[2] + delta[2]];
        Ok((system.profile_state(from.s + ds, &y)?, [delta[0], delta[1]]))
    }
}

/// State `[rho, t, theta]` with `t_s = sin theta`.
struct AngleSystem<'a> {
    spec: &'a InvariantSurfaceSpec,
}

impl AngleSystem<'_> {
    fn angle_state(&self, p: &ProfileState) -> Result<[f64; 3]> {
        let w = self.spec.warp.eval(p.t)?;
        let mu = self.spec.class.jet(p.rho).mu;
        let cos = w.f.exp() * mu * p.rho_s;
        Ok([p.rho, p.t, p.t_s.atan2(cos)])
    }

    fn profile_state(&self, s: f64, y: &[f64; 3]) -> Result<ProfileState> {
        let w = self.spec.warp.eval(y[1])?;
        let mu = self.spec.class.jet(y[0]).mu;
        let (sin, cos) = y[2].sin_cos();
        Ok(ProfileState {
            s,
            rho: y[0],
            t: y[1],
            rho_s: (-w.f).exp() * cos / mu,
            t_s: sin,
        })
    }

    fn classify(&self, y: &[f64; 3]) -> Result<(), Termination> {
        let class = self.spec.class;
        if matches!(class, IsometryClass::Rotational(_)) && y[0] < AXIS_THRESHOLD {
            return Err(Termination::Axis);
        }
        if !class.in_chart(y[0]) {
            return Err(Termination::ChartBoundary);
        }
        if !self.spec.warp.domain().contains(y[1]) {
            return Err(Termination::WarpBoundary);
        }
        Ok(())
    }
}

impl OdeSystem<3> for AngleSystem<'_> {
    fn rhs(&self, _s: f64, y: &[f64; 3]) -> Result<[f64; 3], Termination> {
        let class = self.spec.class;
        if !class.in_chart(y[0]) {
            return Err(Termination::ChartBoundary);
        }
        let w = self
            .spec
            .warp
            .eval(y[1])
            .map_err(|_| Termination::WarpBoundary)?;
        let cj = class.jet(y[0]);
        let inv = (-w.f).exp();
        let (sin, cos) = y[2].sin_cos();
        Ok([
            inv * cos / cj.mu,
            sin,
            class.coefficient(self.spec.c0) * cj.dell_du * inv,
        ])
    }

    fn check(&self, y: &[f64; 3]) -> Result<(), Termination> {
        self.classify(y)
    }

    fn event(&self, y: &[f64; 3]) -> Option<f64> {
        Some(y[2].cos())
    }
}

/// Profiles known in closed form.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedFormExample {
    /// `k = 0`, `f = ln(1/sin t)`, `c0 = 1`: `rho = sech s`, `t = 2 atan(e^s)`.
    K0Rot,
    /// `k = 1`, `f = ln(cot t)`, `c0 = 1`: `rho = t = 2 atan(e^s)`, `s < 0`.
    K1Rot,
    /// Euclidean-translation plane `t = sin(gamma) s + offset` with
    /// `x(s) = int_0^s cos(gamma) e^{-f(t)}`.
    Plane { gamma: f64, offset: f64, warp: Warp },
}

impl ClosedFormExample {
    /// `(rho, t)` at arclength `s`.
    pub fn eval(&self, s: f64) -> Result<(f64, f64)> {
        closed_form_profile(self, s)
    }
}

/// `(rho, t)` of a closed-form profile at `s`.
pub fn closed_form_profile(example: &ClosedFormExample, s: f64) -> Result<(f64, f64)> {
    if !s.is_finite() {
        return Err(Error::Invalid(format!("s must be finite, got {s}")));
    }
    match example {
        ClosedFormExample::K0Rot => Ok((1.0 / s.cosh(), 2.0 * s.exp().atan())),
        ClosedFormExample::K1Rot => {
            if s >= 0.0 {
                return Err(Error::Invalid(format!(
                    "the k = 1 rotational example needs s < 0, got {s}"
                )));
            }
            let v = 2.0 * s.exp().atan();
            Ok((v, v))
        }
        ClosedFormExample::Plane {
            gamma,
            offset,
            warp,
        } => {
            let (sg, cg) = gamma.sin_cos();
            let t = sg * s + offset;
            warp.eval(*offset)?;
            warp.eval(t)?;
            let integrand =
                |sigma: f64| -> Result<f64> { Ok(cg * (-warp.eval(sg * sigma + offset)?.f).exp()) };
            let x = adaptive_simpson(&integrand, 0.0, s, 1e-13)?;
            Ok((x, t))
        }
    }
}

fn adaptive_simpson<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    fn recurse<F: Fn(f64) -> Result<f64>>(
        f: &F,
        (a, fa): (f64, f64),
        (m, fm): (f64, f64),
        (b, fb): (f64, f64),
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm)?, f(rm)?);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        Ok(
            recurse(f, (a, fa), (lm, flm), (m, fm), left, 0.5 * tol, depth - 1)?
                + recurse(f, (m, fm), (rm, frm), (b, fb), right, 0.5 * tol, depth - 1)?,
        )
    }
    if a == b {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a)?, f(m)?, f(b)?);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(f, (a, fa), (m, fm), (b, fb), whole, tol, 40)
}
