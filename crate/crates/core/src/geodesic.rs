//! Geodesics of the warped product and their angle function.

use crate::error::{Error, Result};
use crate::geometry::{contract, AmbientPoint, FrameVector, WarpedProduct};
use crate::ode::{self, OdeSystem, Options, Termination};

/// Default spacing of the emitted samples.
pub const DEFAULT_SPACING: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicSample {
    pub s: f64,
    pub point: AmbientPoint,
    /// Velocity in frame components.
    pub velocity: FrameVector,
    /// `nu = g(gamma', xi)`.
    pub nu: f64,
    /// `(1 - nu^2) e^{2 f(t)}`, constant along geodesics.
    pub conserved: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicCurve {
    /// Uniformly spaced in `s`, except possibly the last sample.
    pub samples: Vec<GeodesicSample>,
    pub termination: Termination,
    pub spacing: f64,
}

impl GeodesicCurve {
    /// Largest deviation of the conserved quantity from its initial value.
    pub fn conserved_drift(&self) -> f64 {
        let Some(first) = self.samples.first() else {
            return 0.0;
        };
        self.samples
            .iter()
            .map(|x| (x.conserved - first.conserved).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `| |gamma'| - 1 |`.
    pub fn speed_drift(&self) -> f64 {
        self.samples
            .iter()
            .map(|x| (x.velocity.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

struct GeodesicSystem<'a> {
    space: &'a WarpedProduct,
}

fn classify(e: &Error) -> Termination {
    match e {
        Error::WarpDomain { .. } | Error::Expr(_) => Termination::WarpBoundary,
        _ => Termination::ChartBoundary,
    }
}

impl OdeSystem<6> for GeodesicSystem<'_> {
    fn rhs(&self, _s: f64, y: &[f64; 6]) -> Result<[f64; 6], Termination> {
        let p = AmbientPoint::new(y[0], y[1], y[2]);
        let table = self.space.connection_table(&p).map_err(|e| classify(&e))?;
        let scale = self
            .space
            .point_data(&p)
            .map_err(|e| classify(&e))?
            .horizontal_scale();
        let a = FrameVector::new(y[3], y[4], y[5]);
        let acc = -contract(&table, &a, &a);
        Ok([a[0] / scale, a[1] / scale, a[2], acc[0], acc[1], acc[2]])
    }

    fn check(&self, y: &[f64; 6]) -> Result<(), Termination> {
        self.space
            .point_data(&AmbientPoint::new(y[0], y[1], y[2]))
            .map(|_| ())
            .map_err(|e| classify(&e))
    }
}

/// Integrates the geodesic through `start` with unit frame velocity
/// `velocity` up to arclength `s_end`.
pub fn integrate_geodesic(
    space: &WarpedProduct,
    start: AmbientPoint,
    velocity: FrameVector,
    s_end: f64,
    tol: f64,
) -> Result<GeodesicCurve> {
    integrate_geodesic_with(space, start, velocity, s_end, tol, DEFAULT_SPACING)
}

pub fn integrate_geodesic_with(
    space: &WarpedProduct,
    start: AmbientPoint,
    velocity: FrameVector,
    s_end: f64,
    tol: f64,
    spacing: f64,
) -> Result<GeodesicCurve> {
    if (velocity.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Invalid(format!(
            "initial velocity must be unit, |v| = {}",
            velocity.norm()
        )));
    }
    if !(tol > 0.0 && spacing > 0.0 && s_end > 0.0) {
        return Err(Error::Invalid(format!(
            "need tol, spacing and s_end positive, got {tol}, {spacing}, {s_end}"
        )));
    }
    space.point_data(&start)?;
    let system = GeodesicSystem { space };
    let options = Options {
        tol,
        max_step: spacing,
        output_spacing: Some(spacing),
        ..Options::default()
    };
    let y0 = [
        start.x,
        start.y,
        start.t,
        velocity[0],
        velocity[1],
        velocity[2],
    ];
    let solution = ode::integrate(&system, 0.0, y0, s_end, &options);
    let mut samples = Vec::with_capacity(solution.samples.len());
    for sample in &solution.samples {
        let y = sample.y;
        let point = AmbientPoint::new(y[0], y[1], y[2]);
        let f = space.warp.eval(point.t)?.f;
        let v = FrameVector::new(y[3], y[4], y[5]);
        samples.push(GeodesicSample {
            s: sample.s,
            point,
            velocity: v,
            nu: v[2],
            conserved: (v[0] * v[0] + v[1] * v[1]) * (2.0 * f).exp(),
        });
    }
    Ok(GeodesicCurve {
        samples,
        termination: solution.termination,
        spacing,
    })
}

/// Largest geodesic curvature, in the fiber metric `lambda^2 (dx^2+dy^2)`,
/// of the projection `(x(s), y(s))`, from fourth-order finite differences
/// on the uniform samples. Samples whose horizontal speed is below
/// `1e-4` are skipped.
pub fn horizontal_pregeodesic_residual(
    space: &WarpedProduct,
    curve: &GeodesicCurve,
) -> Result<f64> {
    let h = curve.spacing;
    let pts: Vec<&GeodesicSample> = curve
        .samples
        .iter()
        .take_while(|x| {
            let k = (x.s / h).round();
            (x.s - k * h).abs() < 1e-9
        })
        .collect();
    let mut worst = 0.0f64;
    if pts.len() < 5 {
        return Ok(worst);
    }
    for i in 2..pts.len() - 2 {
        let c = |j: usize, k: usize| match k {
            0 => pts[j].point.x,
            _ => pts[j].point.y,
        };
        let mut d1 = [0.0; 2];
        let mut d2 = [0.0; 2];
        for k in 0..2 {
            let (m2, m1, z, p1, p2) = (c(i - 2, k), c(i - 1, k), c(i, k), c(i + 1, k), c(i + 2, k));
            d1[k] = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
            d2[k] = (-m2 + 16.0 * m1 - 30.0 * z + 16.0 * p1 - p2) / (12.0 * h * h);
        }
        let speed2 = d1[0] * d1[0] + d1[1] * d1[1];
        if speed2 < 1e-8 {
            continue;
        }
        let jet = space.point_data(&pts[i].point)?.conformal;
        let (ux, uy) = (jet.lambda_x / jet.lambda, jet.lambda_y / jet.lambda);
        // covariant acceleration of the conformal metric lambda^2 delta
        let du = ux * d1[0] + uy * d1[1];
        let acc = [
            d2[0] + 2.0 * du * d1[0] - speed2 * ux,
            d2[1] + 2.0 * du * d1[1] - speed2 * uy,
        ];
        let normal_part = -acc[0] * d1[1] + acc[1] * d1[0];
        let curvature = normal_part / (jet.lambda * speed2.powf(1.5));
        worst = worst.max(curvature.abs());
    }
    Ok(worst)
}

/// Largest `|nu(s) - tanh(f(t(s)) + C)|` with `C` fixed by the first sample.
pub fn tanh_law_residual(space: &WarpedProduct, curve: &GeodesicCurve) -> Result<f64> {
    let Some(first) = curve.samples.first() else {
        return Ok(0.0);
    };
    let c = first.nu.atanh() - space.warp.eval(first.point.t)?.f;
    let mut worst = 0.0f64;
    for x in &curve.samples {
        let law = (space.warp.eval(x.point.t)?.f + c).tanh();
        worst = worst.max((x.nu - law).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Kappa;
    use crate::warp::Warp;

    #[test]
    fn vertical_geodesic_is_a_vertical_line() {
        let space = WarpedProduct::new(Kappa::FLAT, Warp::linear(1.0, 0.0));
        let curve = integrate_geodesic(
            &space,
            AmbientPoint::new(0.3, -0.2, 0.0),
            WarpedProduct::xi(),
            2.0,
            1e-10,
        )
        .unwrap();
        assert_eq!(curve.termination, Termination::ReachedEnd);
        for x in &curve.samples {
            assert_eq!(x.nu, 1.0);
            assert_eq!((x.point.x, x.point.y), (0.3, -0.2));
            assert!((x.point.t - x.s).abs() < 1e-12);
        }
    }

    #[test]
    fn flat_product_geodesics_are_lines() {
        let space = WarpedProduct::new(Kappa::FLAT, Warp::zero());
        let v = FrameVector::new(0.6, 0.0, 0.8);
        let curve =
            integrate_geodesic(&space, AmbientPoint::new(0.0, 1.0, 0.0), v, 1.0, 1e-10).unwrap();
        for x in &curve.samples {
            assert!((x.point.x - 0.6 * x.s).abs() < 1e-12);
            assert!((x.point.t - 0.8 * x.s).abs() < 1e-12);
        }
    }

    #[test]
    fn conserved_quantity_for_linear_warp() {
        let space = WarpedProduct::new(Kappa::FLAT, Warp::linear(1.0, 0.0));
        let nu: f64 = 0.5;
        let v = FrameVector::new((1.0 - nu * nu).sqrt(), 0.0, nu);
        let curve =
            integrate_geodesic(&space, AmbientPoint::new(0.0, 0.0, 0.0), v, 2.0, 1e-10).unwrap();
        for x in &curve.samples {
            assert!((x.conserved - 0.75).abs() < 1e-8);
        }
        assert!(curve.speed_drift() < 1e-8);
        assert!(horizontal_pregeodesic_residual(&space, &curve).unwrap() < 1e-5);
    }

    #[test]
    fn non_unit_velocity_is_rejected() {
        let space = WarpedProduct::new(Kappa::FLAT, Warp::zero());
        assert!(integrate_geodesic(
            &space,
            AmbientPoint::new(0.0, 0.0, 0.0),
            FrameVector::new(1.0, 1.0, 0.0),
            1.0,
            1e-10
        )
        .is_err());
    }

    #[test]
    fn boundary_of_the_warp_stops_integration() {
        let space = WarpedProduct::new(Kappa::FLAT, Warp::log_cosecant());
        let curve = integrate_geodesic(
            &space,
            AmbientPoint::new(0.0, 0.0, 3.0),
            WarpedProduct::xi(),
            1.0,
            1e-10,
        )
        .unwrap();
        assert_eq!(curve.termination, Termination::WarpBoundary);
        assert!(curve.samples.last().unwrap().point.t < std::f64::consts::PI);
    }
}
