//! Ambient geometry of the warped product `M(k)_f x I` with metric
//! `e^{2f(t)} lambda^2 (dx^2 + dy^2) + dt^2`.
//!
//! Vectors are written either in coordinates `(dx, dy, dt)` or in the
//! orthonormal frame `E1 = dx/(lambda e^f)`, `E2 = dy/(lambda e^f)`,
//! `E3 = xi = dt`. Both use [`nalgebra::Vector3`].

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::warp::{Warp, WarpValue};

/// Components in the orthonormal frame `{E1, E2, E3 = xi}`.
pub type FrameVector = Vector3<f64>;
/// Components in the coordinate basis `{dx, dy, dt}`.
pub type CoordVector = Vector3<f64>;

/// `1 + k (x^2 + y^2)` below this is treated as a singular chart.
pub const SINGULAR_CHART_TOL: f64 = 1e-12;

/// Curvature of the fiber space form: -1, 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct Kappa(i8);

impl Kappa {
    pub const HYPERBOLIC: Kappa = Kappa(-1);
    pub const FLAT: Kappa = Kappa(0);
    pub const SPHERICAL: Kappa = Kappa(1);

    pub fn new(value: i32) -> Result<Kappa> {
        match value {
            -1..=1 => Ok(Kappa(value as i8)),
            _ => Err(Error::Invalid(format!(
                "kappa must be -1, 0 or 1, got {value}"
            ))),
        }
    }

    pub fn value(self) -> f64 {
        f64::from(self.0)
    }

    pub fn get(self) -> i32 {
        i32::from(self.0)
    }
}

impl TryFrom<i32> for Kappa {
    type Error = Error;
    fn try_from(value: i32) -> Result<Kappa> {
        Kappa::new(value)
    }
}

impl From<Kappa> for i32 {
    fn from(k: Kappa) -> i32 {
        k.get()
    }
}

/// Conformal model used for the fiber coordinates `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FiberModel {
    /// `lambda = 2 / (1 + k (x^2 + y^2))`, or 1 when `k = 0`: Poincare
    /// disk for `k = -1`, stereographic chart for `k = 1`.
    Conformal,
    /// Upper half-plane `y > 0`, `lambda = 1/y`. Only for `k = -1`.
    HalfPlane,
}

/// A point `(x, y, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmbientPoint {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl AmbientPoint {
    pub fn new(x: f64, y: f64, t: f64) -> AmbientPoint {
        AmbientPoint { x, y, t }
    }

    pub fn coords(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.t)
    }

    pub fn from_coords(c: &Vector3<f64>) -> AmbientPoint {
        AmbientPoint::new(c[0], c[1], c[2])
    }

    /// Moves along the coordinate vector `v` by `step`.
    pub fn offset(&self, v: &CoordVector, step: f64) -> AmbientPoint {
        AmbientPoint::from_coords(&(self.coords() + v * step))
    }
}

/// `lambda = 2/(1 + k(x^2+y^2))` for `k != 0`, `1` for `k = 0`.
pub fn conformal_factor(kappa: Kappa, x: f64, y: f64) -> Result<f64> {
    Ok(conformal_jet(kappa, FiberModel::Conformal, x, y)?.lambda)
}

/// The conformal factor and its partial derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalJet {
    pub lambda: f64,
    pub lambda_x: f64,
    pub lambda_y: f64,
}

fn conformal_jet(kappa: Kappa, model: FiberModel, x: f64, y: f64) -> Result<ConformalJet> {
    if !(x.is_finite() && y.is_finite()) {
        return Err(Error::ChartDomain { x, y });
    }
    match model {
        FiberModel::Conformal => {
            let k = kappa.value();
            if k == 0.0 {
                return Ok(ConformalJet {
                    lambda: 1.0,
                    lambda_x: 0.0,
                    lambda_y: 0.0,
                });
            }
            let denom = 1.0 + k * (x * x + y * y);
            if denom <= 0.0 {
                return Err(Error::ChartDomain { x, y });
            }
            if denom < SINGULAR_CHART_TOL {
                return Err(Error::SingularChart { x, y });
            }
            let lambda = 2.0 / denom;
            // d lambda / dx = -k x lambda^2
            Ok(ConformalJet {
                lambda,
                lambda_x: -k * x * lambda * lambda,
                lambda_y: -k * y * lambda * lambda,
            })
        }
        FiberModel::HalfPlane => {
            if kappa != Kappa::HYPERBOLIC {
                return Err(Error::Invalid(
                    "the half-plane model requires kappa = -1".into(),
                ));
            }
            if y <= 0.0 {
                return Err(Error::ChartDomain { x, y });
            }
            if y < SINGULAR_CHART_TOL {
                return Err(Error::SingularChart { x, y });
            }
            Ok(ConformalJet {
                lambda: 1.0 / y,
                lambda_x: 0.0,
                lambda_y: -1.0 / (y * y),
            })
        }
    }
}

/// Geometric data at one point: conformal factor, warp jet and the
/// connection coefficients `lambda_y/(lambda^2 e^f)`, `lambda_x/(lambda^2 e^f)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointData {
    pub conformal: ConformalJet,
    pub warp: WarpValue,
}

impl PointData {
    /// `lambda e^f`: length of `dx` (and `dy`).
    pub fn horizontal_scale(&self) -> f64 {
        self.conformal.lambda * self.warp.scale()
    }

    fn coeff_y(&self) -> f64 {
        self.conformal.lambda_y / (self.conformal.lambda * self.horizontal_scale())
    }

    fn coeff_x(&self) -> f64 {
        self.conformal.lambda_x / (self.conformal.lambda * self.horizontal_scale())
    }
}

/// The warped product `M(k)_f x I` in a fixed fiber chart.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpedProduct {
    pub kappa: Kappa,
    pub model: FiberModel,
    pub warp: Warp,
}

impl WarpedProduct {
    pub fn new(kappa: Kappa, warp: Warp) -> WarpedProduct {
        WarpedProduct {
            kappa,
            model: FiberModel::Conformal,
            warp,
        }
    }

    /// Hyperbolic fiber in the upper half-plane model.
    pub fn half_plane(warp: Warp) -> WarpedProduct {
        WarpedProduct {
            kappa: Kappa::HYPERBOLIC,
            model: FiberModel::HalfPlane,
            warp,
        }
    }

    pub fn point_data(&self, p: &AmbientPoint) -> Result<PointData> {
        Ok(PointData {
            conformal: conformal_jet(self.kappa, self.model, p.x, p.y)?,
            warp: self.warp.eval(p.t)?,
        })
    }

    /// `g(v, w)` for coordinate vectors.
    pub fn metric_dot(&self, p: &AmbientPoint, v: &CoordVector, w: &CoordVector) -> Result<f64> {
        let d = self.point_data(p)?;
        let s = d.horizontal_scale();
        Ok(s * s * (v[0] * w[0] + v[1] * w[1]) + v[2] * w[2])
    }

    /// Coordinate vector -> frame components.
    pub fn to_frame(&self, p: &AmbientPoint, v: &CoordVector) -> Result<FrameVector> {
        let s = self.point_data(p)?.horizontal_scale();
        Ok(FrameVector::new(s * v[0], s * v[1], v[2]))
    }

    /// Frame components -> coordinate vector.
    pub fn to_coords(&self, p: &AmbientPoint, a: &FrameVector) -> Result<CoordVector> {
        let s = self.point_data(p)?.horizontal_scale();
        Ok(CoordVector::new(a[0] / s, a[1] / s, a[2]))
    }

    /// `E_ij = nabla_{E_i} E_j` for all `i, j` (0-based), in frame components.
    ///
    /// The vertical derivatives `nabla_xi E_1` and `nabla_xi E_2` vanish:
    /// the frame fields rescale with `e^{-f}` exactly as the coordinate
    /// lifts grow with `e^{f}`.
    pub fn connection_table(&self, p: &AmbientPoint) -> Result<[[FrameVector; 3]; 3]> {
        let d = self.point_data(p)?;
        Ok(connection_from(&d))
    }

    /// `E_ij = nabla_{E_i} E_j` with `i, j` in `1..=3`.
    pub fn connection_apply(&self, p: &AmbientPoint, i: usize, j: usize) -> Result<FrameVector> {
        if !(1..=3).contains(&i) || !(1..=3).contains(&j) {
            return Err(Error::Invalid(format!(
                "frame indices must lie in 1..=3, got ({i}, {j})"
            )));
        }
        Ok(self.connection_table(p)?[i - 1][j - 1])
    }

    /// `nabla_X Y` at `p` for `Y` with constant frame components.
    pub fn covariant_constant(
        &self,
        p: &AmbientPoint,
        x: &FrameVector,
        y: &FrameVector,
    ) -> Result<FrameVector> {
        let table = self.connection_table(p)?;
        Ok(contract(&table, x, y))
    }

    /// `R(A, B) C` with the sign convention
    /// `R(A,B)C = nabla_B nabla_A C - nabla_A nabla_B C + nabla_[A,B] C`.
    ///
    /// Inputs are split into horizontal and vertical parts and the
    /// closed forms for lifts are expanded by multilinearity.
    pub fn curvature(
        &self,
        p: &AmbientPoint,
        a: &FrameVector,
        b: &FrameVector,
        c: &FrameVector,
    ) -> Result<FrameVector> {
        let w = self.warp.eval(p.t)?;
        // fiber point must be valid as well
        conformal_jet(self.kappa, self.model, p.x, p.y)?;
        Ok(curvature_closed_form(self.kappa.value(), &w, a, b, c))
    }

    /// `f''(t) + k e^{-2 f(t)}`; zero exactly when umbilical functions are constant.
    pub fn constant_umbilic_residual(&self, t: f64) -> Result<f64> {
        constant_umbilic_residual(&self.warp, self.kappa, t)
    }

    /// The vertical field `xi` in frame components.
    pub fn xi() -> FrameVector {
        FrameVector::new(0.0, 0.0, 1.0)
    }
}

pub(crate) fn connection_from(d: &PointData) -> [[FrameVector; 3]; 3] {
    let fp = d.warp.df;
    let cy = d.coeff_y();
    let cx = d.coeff_x();
    let zero = FrameVector::zeros();
    [
        [
            FrameVector::new(0.0, -cy, -fp),
            FrameVector::new(cy, 0.0, 0.0),
            FrameVector::new(fp, 0.0, 0.0),
        ],
        [
            FrameVector::new(0.0, cx, 0.0),
            FrameVector::new(-cx, 0.0, -fp),
            FrameVector::new(0.0, fp, 0.0),
        ],
        [zero, zero, zero],
    ]
}

/// `sum_ij x_i y_j E_ij`.
pub(crate) fn contract(
    table: &[[FrameVector; 3]; 3],
    x: &FrameVector,
    y: &FrameVector,
) -> FrameVector {
    let mut out = FrameVector::zeros();
    for i in 0..3 {
        for j in 0..3 {
            out += table[i][j] * (x[i] * y[j]);
        }
    }
    out
}

fn curvature_closed_form(
    k: f64,
    w: &WarpValue,
    a: &FrameVector,
    b: &FrameVector,
    c: &FrameVector,
) -> FrameVector {
    let horizontal = |v: &FrameVector| FrameVector::new(v[0], v[1], 0.0);
    let hdot = |u: &FrameVector, v: &FrameVector| u[0] * v[0] + u[1] * v[1];
    let (ah, bh, ch) = (horizontal(a), horizontal(b), horizontal(c));
    let (av, bv, cv) = (a[2], b[2], c[2]);
    let sectional_h = k * (-2.0 * w.f).exp() - w.df * w.df;
    let mixed = w.d2f + w.df * w.df;
    let xi = WarpedProduct::xi();

    // Each group is written as a difference of (a, b)-swapped products so
    // that exchanging A and B negates the result exactly.
    // R(X,Y)Z = (k e^{-2f} - f'^2) [g(X,Z) Y - g(Y,Z) X]
    let leaves = (bh * hdot(&ah, &ch) - ah * hdot(&bh, &ch)) * sectional_h;
    // R(V,X)W = -g(V,W)(f''+f'^2) X and R(X,V)W = -R(V,X)W
    let mixed_vertical = (ah * bv - bh * av) * (cv * mixed);
    // R(V,X)Y = g(X,Y)(f''+f'^2) V and R(X,V)Y = -R(V,X)Y
    let mixed_horizontal = xi * ((av * hdot(&bh, &ch) - bv * hdot(&ah, &ch)) * mixed);
    leaves + mixed_vertical + mixed_horizontal
}

/// `f''(t) + k e^{-2 f(t)}`.
pub fn constant_umbilic_residual(warp: &Warp, kappa: Kappa, t: f64) -> Result<f64> {
    let w = warp.eval(t)?;
    Ok(w.d2f + kappa.value() * (-2.0 * w.f).exp())
}

/// Geodesic curvature after the conformal change `e^{2 phi} sigma`:
/// `e^{-phi} (k_sigma - d phi / d eta)`, with `eta` the inner unit
/// normal in the original metric.
pub fn conformal_geodesic_curvature(kappa_sigma: f64, dphi_dn: f64, phi: f64) -> f64 {
    (-phi).exp() * (kappa_sigma - dphi_dn)
}
