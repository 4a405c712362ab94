//! Curvatures of invariant surfaces, meshes, a finite-difference shape
//! operator and residuals of the structure equations.

use nalgebra::{Matrix2, Matrix3, Vector2};

use crate::error::{Error, Result};
use crate::geometry::{contract, AmbientPoint, CoordVector, FrameVector, Kappa, WarpedProduct};
use crate::profile::{
    IntegrationResult, InvariantSurfaceSpec, IsometryClass, ProfileJet, ProfileState,
    AXIS_THRESHOLD,
};
use crate::warp::{Warp, WarpValue};

/// Relative tolerance on `|k1 - k2|` for a point to count as umbilical.
pub const UMBILIC_TOL: f64 = 1e-6;

/// Principal, mean, extrinsic and intrinsic curvature at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureSample {
    pub kappa1: f64,
    pub kappa2: f64,
    /// `(k1 + k2) / 2`.
    pub mean: f64,
    /// `k1 k2`.
    pub extrinsic: f64,
    pub intrinsic: f64,
    /// Angle function `g(N, xi)`.
    pub nu: f64,
    /// Umbilical function, present when the point is umbilical.
    pub varrho: Option<f64>,
}

impl CurvatureSample {
    pub fn new(kappa1: f64, kappa2: f64, intrinsic: f64, nu: f64) -> CurvatureSample {
        let umbilic = (kappa1 - kappa2).abs() <= UMBILIC_TOL * kappa1.abs().max(1.0);
        CurvatureSample {
            kappa1,
            kappa2,
            mean: 0.5 * (kappa1 + kappa2),
            extrinsic: kappa1 * kappa2,
            intrinsic,
            nu,
            varrho: umbilic.then_some(kappa1),
        }
    }
}

/// `K = det S + k e^{-2f} - f'^2 - (f'' + k e^{-2f}) |T|^2`.
pub fn gauss_intrinsic_curvature(kappa: Kappa, w: &WarpValue, det_s: f64, t_norm2: f64) -> f64 {
    let ke = kappa.value() * (-2.0 * w.f).exp();
    det_s + ke - w.df * w.df - (w.d2f + ke) * t_norm2
}

/// Principal curvatures of the invariant surface through the profile jet,
/// for the normal making `(alpha', N)` positively oriented.
pub fn invariant_surface_curvatures(
    spec: &InvariantSurfaceSpec,
    jet: &ProfileJet,
) -> Result<(f64, f64)> {
    let class = spec.class();
    let st = &jet.state;
    if !class.in_chart(st.rho)
        || (matches!(class, IsometryClass::Rotational(_)) && st.rho < AXIS_THRESHOLD)
    {
        return Err(Error::ProfileChart { rho: st.rho });
    }
    let w = spec.warp().eval(st.t)?;
    let cj = class.jet(st.rho);
    let e = w.f.exp();
    let u_s = cj.mu * st.rho_s;
    let u_ss = cj.mu * jet.rho_ss + cj.dmu * st.rho_s * st.rho_s;
    let (t_s, t_ss) = (st.t_s, jet.t_ss);
    let speed2 = e * e * u_s * u_s + t_s * t_s;
    let kappa1 = e
        * (t_ss * u_s - t_s * u_ss - 2.0 * w.df * u_s * t_s * t_s - w.df * e * e * u_s.powi(3))
        / speed2.powf(1.5);
    let kappa2 = (t_s * cj.dell_du / cj.ell / e - e * w.df * u_s) / speed2.sqrt();
    Ok((kappa1, kappa2))
}

/// Full curvature sample at a profile jet.
pub fn invariant_surface_sample(
    spec: &InvariantSurfaceSpec,
    jet: &ProfileJet,
) -> Result<CurvatureSample> {
    let (k1, k2) = invariant_surface_curvatures(spec, jet)?;
    let st = &jet.state;
    let w = spec.warp().eval(st.t)?;
    let nu = w.f.exp() * spec.class().jet(st.rho).mu * st.rho_s;
    let ki = gauss_intrinsic_curvature(spec.kappa(), &w, k1 * k2, 1.0 - nu * nu);
    Ok(CurvatureSample::new(k1, k2, ki, nu))
}

/// The uncorrected translational principal curvature formulas, including the `k1^0 = -k1^1` sign relation and the
/// `t_s` in the cubic term. Kept only for discrepancy reporting.
pub fn literal_translation_curvatures(
    spec: &InvariantSurfaceSpec,
    jet: &ProfileJet,
) -> Result<(f64, f64)> {
    let st = &jet.state;
    let (lam, m, h, sign) = match spec.class() {
        IsometryClass::EuclideanTranslation => (1.0, 0.0, 0.0, -1.0),
        IsometryClass::ParabolicTranslation => (1.0 / st.rho, 1.0, 1.0 / st.rho, 1.0),
        IsometryClass::HyperbolicTranslation => (
            1.0 / st.rho.sin(),
            st.rho.cos(),
            st.rho.cos() / st.rho.sin(),
            1.0,
        ),
        IsometryClass::Rotational(_) => {
            return Err(Error::Invalid(
                "literal translation formulas need a translational class".into(),
            ))
        }
    };
    let w = spec.warp().eval(st.t)?;
    let e = w.f.exp();
    let (t_s, rho_s) = (st.t_s, st.rho_s);
    let speed2 = t_s * t_s + e * e * rho_s * rho_s * lam * lam;
    let kappa1 = sign
        * e
        * lam
        * (2.0 * w.df * t_s * t_s * rho_s
            + e * e * t_s * rho_s.powi(3) * lam * lam
            + t_s * jet.rho_ss
            - jet.t_ss * rho_s
            - t_s * rho_s * rho_s * h)
        / speed2.powf(1.5);
    let kappa2 = (t_s * m / e + e * w.df * rho_s * lam) / speed2.sqrt();
    Ok((kappa1, kappa2))
}

/// Curvatures of the vertical cylinder over a curve of geodesic
/// curvature `kappa_g2` in the fiber.
pub fn cylinder_curvatures(kappa_g2: f64, warp: &Warp, t: f64) -> Result<CurvatureSample> {
    let w = warp.eval(t)?;
    let k1 = -(-w.f).exp() * kappa_g2;
    Ok(CurvatureSample::new(k1, 0.0, -w.df * w.df - w.d2f, 0.0))
}

/// One vertex of a mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshVertex {
    pub point: AmbientPoint,
    /// Unit normal in frame components.
    pub normal: FrameVector,
    pub curvature: CurvatureSample,
}

/// Orbit of a profile sampled on an `(s, omega)` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    pub class: IsometryClass,
    pub s: Vec<f64>,
    pub omega: Vec<f64>,
    /// Profile state of each row.
    pub profile: Vec<ProfileState>,
    /// Row-major: `vertices[i * omega.len() + j]` sits at `(s[i], omega[j])`.
    pub vertices: Vec<MeshVertex>,
    /// The last omega column wraps around to the first.
    pub periodic: bool,
}

impl SurfaceMesh {
    pub fn vertex(&self, i: usize, j: usize) -> &MeshVertex {
        &self.vertices[i * self.omega.len() + j]
    }

    pub fn rows(&self) -> usize {
        self.s.len()
    }

    pub fn cols(&self) -> usize {
        self.omega.len()
    }

    /// Quad faces as vertex index quadruples, welded across the seam when
    /// periodic.
    pub fn quads(&self) -> Vec<[usize; 4]> {
        let (rows, cols) = (self.rows(), self.cols());
        let wrap = if self.periodic {
            cols
        } else {
            cols.saturating_sub(1)
        };
        let mut quads = Vec::new();
        for i in 0..rows.saturating_sub(1) {
            for j in 0..wrap {
                let jn = (j + 1) % cols;
                quads.push([
                    i * cols + j,
                    (i + 1) * cols + j,
                    (i + 1) * cols + jn,
                    i * cols + jn,
                ]);
            }
        }
        quads
    }
}

/// Sweeps the profile by the isometry group.
///
/// A rotational `omega_range` spanning `2 pi` is treated as periodic and
/// sampled at `omega_steps` points without repeating the end point;
/// other ranges include both ends.
pub fn generate_mesh(
    spec: &InvariantSurfaceSpec,
    curve: &IntegrationResult,
    omega_range: (f64, f64),
    omega_steps: usize,
) -> Result<SurfaceMesh> {
    let (lo, hi) = omega_range;
    if curve.samples.is_empty() {
        return Err(Error::Invalid("profile has no samples".into()));
    }
    if omega_steps < 2 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Invalid(format!(
            "need omega_steps >= 2 and an increasing omega range, got {omega_steps} over [{lo}, {hi}]"
        )));
    }
    let class = spec.class();
    if class == IsometryClass::HyperbolicTranslation && lo <= 0.0 {
        return Err(Error::Invalid(format!(
            "hyperbolic translations need omega > 0, got range [{lo}, {hi}]"
        )));
    }
    let periodic = matches!(class, IsometryClass::Rotational(_))
        && ((hi - lo) - std::f64::consts::TAU).abs() < 1e-9;
    let omega: Vec<f64> = if periodic {
        (0..omega_steps)
            .map(|j| lo + (hi - lo) * j as f64 / omega_steps as f64)
            .collect()
    } else {
        (0..omega_steps)
            .map(|j| lo + (hi - lo) * j as f64 / (omega_steps - 1) as f64)
            .collect()
    };
    let mut vertices = Vec::with_capacity(curve.samples.len() * omega.len());
    for state in &curve.samples {
        let curvature = invariant_surface_sample(spec, &spec.jet(state)?)?;
        let w = spec.warp().eval(state.t)?;
        let cos = w.f.exp() * class.jet(state.rho).mu * state.rho_s;
        let sin = state.t_s;
        for &om in &omega {
            let normal = -sin * class.radial_direction(state.rho, om) + WarpedProduct::xi() * cos;
            vertices.push(MeshVertex {
                point: class.position(state.rho, state.t, om),
                normal,
                curvature,
            });
        }
    }
    Ok(SurfaceMesh {
        class,
        s: curve.samples.iter().map(|x| x.s).collect(),
        omega,
        profile: curve.samples.clone(),
        vertices,
        periodic,
    })
}

/// A parametrized surface `(s, omega) -> psi(s, omega)`.
pub trait Immersion {
    fn point(&self, s: f64, omega: f64) -> Result<AmbientPoint>;

    /// `psi(s + ds, omega + d_omega) - psi(s, omega)`. Implementations
    /// should avoid cancellation so that difference quotients keep full
    /// precision.
    fn displacement(&self, s: f64, omega: f64, ds: f64, d_omega: f64) -> Result<CoordVector> {
        Ok(self.point(s + ds, omega + d_omega)?.coords() - self.point(s, omega)?.coords())
    }
}

impl<F: Fn(f64, f64) -> Result<AmbientPoint>> Immersion for F {
    fn point(&self, s: f64, omega: f64) -> Result<AmbientPoint> {
        self(s, omega)
    }
}

/// The orbit parametrization of an invariant surface near one profile
/// sample, re-integrated from that sample.
#[derive(Debug, Clone)]
pub struct ProfileImmersion<'a> {
    spec: &'a InvariantSurfaceSpec,
    anchor: ProfileState,
}

impl<'a> ProfileImmersion<'a> {
    pub fn new(spec: &'a InvariantSurfaceSpec, anchor: ProfileState) -> ProfileImmersion<'a> {
        ProfileImmersion { spec, anchor }
    }
}

impl Immersion for ProfileImmersion<'_> {
    fn point(&self, s: f64, omega: f64) -> Result<AmbientPoint> {
        let st = self.spec.evaluate_from(&self.anchor, s)?;
        Ok(self.spec.class().position(st.rho, st.t, omega))
    }

    fn displacement(&self, s: f64, omega: f64, ds: f64, d_omega: f64) -> Result<CoordVector> {
        let node = self.spec.evaluate_from(&self.anchor, s)?;
        let (_, [d_rho, d_t]) = self.spec.advance(&node, ds)?;
        let d = self
            .spec
            .class()
            .displacement(node.rho, omega, d_rho, d_t, d_omega);
        Ok(CoordVector::new(d[0], d[1], d[2]))
    }
}

/// The slice `t = t0` parametrized by the fiber coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slice {
    pub t0: f64,
}

impl Immersion for Slice {
    fn point(&self, s: f64, omega: f64) -> Result<AmbientPoint> {
        Ok(AmbientPoint::new(s, omega, self.t0))
    }

    fn displacement(&self, _s: f64, _omega: f64, ds: f64, d_omega: f64) -> Result<CoordVector> {
        Ok(CoordVector::new(ds, d_omega, 0.0))
    }
}

/// The vertical cylinder `(s cos b, s sin b, omega)` over the fiber
/// geodesic through the chart origin in direction `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicCylinder {
    pub direction: f64,
}

impl Immersion for GeodesicCylinder {
    fn point(&self, s: f64, omega: f64) -> Result<AmbientPoint> {
        let (sn, c) = self.direction.sin_cos();
        Ok(AmbientPoint::new(s * c, s * sn, omega))
    }

    fn displacement(&self, _s: f64, _omega: f64, ds: f64, d_omega: f64) -> Result<CoordVector> {
        let (sn, c) = self.direction.sin_cos();
        Ok(CoordVector::new(ds * c, ds * sn, d_omega))
    }
}

/// Tangent basis, induced metric, shape operator and the splitting
/// `xi = T + nu N` at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceFrameSample {
    pub params: (f64, f64),
    pub point: AmbientPoint,
    /// `d psi / ds`, `d psi / d omega` in coordinates.
    pub tangents: [CoordVector; 2],
    pub normal: FrameVector,
    pub metric: Matrix2<f64>,
    /// `S` in the tangent basis: `S psi_a = sum_c shape[(c, a)] psi_c`.
    pub shape: Matrix2<f64>,
    /// Components of `T` in the tangent basis.
    pub tangential: Vector2<f64>,
    pub nu: f64,
}

impl SurfaceFrameSample {
    /// Real eigenvalues of `S`, ascending.
    pub fn principal_curvatures(&self) -> (f64, f64) {
        let half = 0.5 * self.shape.trace();
        let disc = (half * half - self.shape.determinant()).max(0.0).sqrt();
        (half - disc, half + disc)
    }

    pub fn umbilic_gap(&self) -> f64 {
        let (a, b) = self.principal_curvatures();
        b - a
    }

    /// `g(T, T)`.
    pub fn tangential_norm2(&self) -> f64 {
        self.tangential.dot(&(self.metric * self.tangential))
    }
}

fn unit_normal(
    space: &WarpedProduct,
    p: &AmbientPoint,
    ts: &CoordVector,
    tw: &CoordVector,
) -> Result<FrameVector> {
    let n = space.to_frame(p, ts)?.cross(&space.to_frame(p, tw)?);
    let len = n.norm();
    if !(len > 0.0) {
        return Err(Error::DegenerateTangents { det: 0.0 });
    }
    Ok(n / len)
}

/// Shape operator of `-nabla N` from central differences of the
/// immersion with step `h`. Only the connection of the ambient space is
/// used analytically.
pub fn numeric_shape_operator<I: Immersion + ?Sized>(
    space: &WarpedProduct,
    immersion: &I,
    at: (f64, f64),
    h: f64,
) -> Result<SurfaceFrameSample> {
    let (s, w) = at;
    let base = immersion.point(s, w)?;
    let disp = |a: f64, b: f64| immersion.displacement(s, w, a, b);
    // tangents and point at the parameter offset (a, b)
    let tangents = |a: f64, b: f64| -> Result<(AmbientPoint, CoordVector, CoordVector)> {
        let ts = (disp(a + h, b)? - disp(a - h, b)?) / (2.0 * h);
        let tw = (disp(a, b + h)? - disp(a, b - h)?) / (2.0 * h);
        let p = if a == 0.0 && b == 0.0 {
            base
        } else {
            base.offset(&disp(a, b)?, 1.0)
        };
        Ok((p, ts, tw))
    };
    let normal_at = |a: f64, b: f64| -> Result<FrameVector> {
        let (p, ts, tw) = tangents(a, b)?;
        unit_normal(space, &p, &ts, &tw)
    };

    let (p, ts, tw) = tangents(0.0, 0.0)?;
    let n = unit_normal(space, &p, &ts, &tw)?;
    let fs = space.to_frame(&p, &ts)?;
    let fw = space.to_frame(&p, &tw)?;
    let metric = Matrix2::new(fs.dot(&fs), fs.dot(&fw), fw.dot(&fs), fw.dot(&fw));
    let det = metric.determinant();
    if !(det > 1e-12 * metric[(0, 0)] * metric[(1, 1)]) {
        return Err(Error::DegenerateTangents { det });
    }

    let table = space.connection_table(&p)?;
    let dn_s = (normal_at(h, 0.0)? - normal_at(-h, 0.0)?) / (2.0 * h);
    let dn_w = (normal_at(0.0, h)? - normal_at(0.0, -h)?) / (2.0 * h);
    let nabla_s = dn_s + contract(&table, &fs, &n);
    let nabla_w = dn_w + contract(&table, &fw, &n);
    let basis = [fs, fw];
    let derivs = [nabla_s, nabla_w];
    let mut second = Matrix2::zeros();
    for c in 0..2 {
        for a in 0..2 {
            second[(c, a)] = -derivs[a].dot(&basis[c]);
        }
    }
    let inv = metric
        .try_inverse()
        .ok_or(Error::DegenerateTangents { det })?;
    let shape = inv * second;
    let tangential = inv * Vector2::new(ts[2], tw[2]);
    Ok(SurfaceFrameSample {
        params: at,
        point: p,
        tangents: [ts, tw],
        normal: n,
        metric,
        shape,
        tangential,
        nu: n[2],
    })
}

/// Frames on a square `(2 half + 1)^2` grid of spacing `h` around `center`;
/// the shape operator uses the same step.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameGrid {
    pub h: f64,
    pub rows: usize,
    pub cols: usize,
    /// Row-major, rows along `s`.
    pub frames: Vec<SurfaceFrameSample>,
}

impl FrameGrid {
    pub fn sample<I: Immersion + ?Sized>(
        space: &WarpedProduct,
        immersion: &I,
        center: (f64, f64),
        h: f64,
        half: usize,
    ) -> Result<FrameGrid> {
        let n = 2 * half + 1;
        let mut frames = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let s = center.0 + (i as f64 - half as f64) * h;
                let w = center.1 + (j as f64 - half as f64) * h;
                frames.push(numeric_shape_operator(space, immersion, (s, w), h)?);
            }
        }
        Ok(FrameGrid {
            h,
            rows: n,
            cols: n,
            frames,
        })
    }

    pub fn at(&self, i: usize, j: usize) -> &SurfaceFrameSample {
        &self.frames[i * self.cols + j]
    }

    fn field(&self, value: impl Fn(&SurfaceFrameSample) -> f64) -> Grid {
        Grid {
            rows: self.rows,
            cols: self.cols,
            h: self.h,
            data: self.frames.iter().map(value).collect(),
        }
    }
}

/// Scalar field on a grid with second-order differences.
struct Grid {
    rows: usize,
    cols: usize,
    h: f64,
    data: Vec<f64>,
}

impl Grid {
    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    fn diff_line(values: &[f64], h: f64) -> Vec<f64> {
        let n = values.len();
        (0..n)
            .map(|k| {
                if k == 0 {
                    (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h)
                } else if k == n - 1 {
                    (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h)
                } else {
                    (values[k + 1] - values[k - 1]) / (2.0 * h)
                }
            })
            .collect()
    }

    fn second_diff_line(values: &[f64], h: f64) -> Vec<f64> {
        let n = values.len();
        let h2 = h * h;
        (0..n)
            .map(|k| {
                if k > 0 && k < n - 1 {
                    (values[k - 1] - 2.0 * values[k] + values[k + 1]) / h2
                } else if n < 4 {
                    let m = if k == 0 { 1 } else { n - 2 };
                    (values[m - 1] - 2.0 * values[m] + values[m + 1]) / h2
                } else if k == 0 {
                    (2.0 * values[0] - 5.0 * values[1] + 4.0 * values[2] - values[3]) / h2
                } else {
                    (2.0 * values[n - 1] - 5.0 * values[n - 2] + 4.0 * values[n - 3]
                        - values[n - 4])
                        / h2
                }
            })
            .collect()
    }

    /// Derivative along `s` (axis 0) or `omega` (axis 1).
    fn d(&self, axis: usize) -> Grid {
        self.apply(axis, Grid::diff_line)
    }

    fn d2(&self, axis: usize) -> Grid {
        self.apply(axis, Grid::second_diff_line)
    }

    fn apply(&self, axis: usize, line: fn(&[f64], f64) -> Vec<f64>) -> Grid {
        let mut data = vec![0.0; self.data.len()];
        if axis == 0 {
            for j in 0..self.cols {
                let col: Vec<f64> = (0..self.rows).map(|i| self.get(i, j)).collect();
                for (i, v) in line(&col, self.h).into_iter().enumerate() {
                    data[i * self.cols + j] = v;
                }
            }
        } else {
            for i in 0..self.rows {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                data[i * self.cols..(i + 1) * self.cols].copy_from_slice(&line(row, self.h));
            }
        }
        Grid {
            rows: self.rows,
            cols: self.cols,
            h: self.h,
            data,
        }
    }
}

/// Largest residual of each structure equation over a frame grid.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CompatibilityReport {
    /// `|T|^2 + nu^2 - 1`.
    pub unit_angle: f64,
    /// `nabla_X T - nu S X - f'[X - g(X,T) T]`.
    pub tangent_derivative: f64,
    /// `g(SX, T) + d nu(X) + f' nu g(X, T)`.
    pub angle_derivative: f64,
    pub gauss: f64,
    pub codazzi: f64,
    /// `grad varrho + nu (f'' + k e^{-2f}) T`.
    pub umbilic_gradient: f64,
}

impl CompatibilityReport {
    pub fn entries(&self) -> [(&'static str, f64); 6] {
        [
            ("unit-angle", self.unit_angle),
            ("tangent-derivative", self.tangent_derivative),
            ("angle-derivative", self.angle_derivative),
            ("gauss", self.gauss),
            ("codazzi", self.codazzi),
            ("umbilic-gradient", self.umbilic_gradient),
        ]
    }

    pub fn max(&self) -> f64 {
        self.entries().iter().map(|e| e.1).fold(0.0, f64::max)
    }
}

fn g_norm(metric: &Matrix2<f64>, v: &Vector2<f64>) -> f64 {
    v.dot(&(metric * v)).max(0.0).sqrt()
}

/// Intrinsic curvature from the metric coefficients and their
/// derivatives (Brioschi).
fn brioschi(e: f64, f: f64, g: f64, d: &MetricDerivatives) -> f64 {
    let m1 = Matrix3::new(
        -0.5 * d.e_ww + d.f_sw - 0.5 * d.g_ss,
        0.5 * d.e_s,
        d.f_s - 0.5 * d.e_w,
        d.f_w - 0.5 * d.g_s,
        e,
        f,
        0.5 * d.g_w,
        f,
        g,
    );
    let m2 = Matrix3::new(
        0.0,
        0.5 * d.e_w,
        0.5 * d.g_s,
        0.5 * d.e_w,
        e,
        f,
        0.5 * d.g_s,
        f,
        g,
    );
    let w = e * g - f * f;
    (m1.determinant() - m2.determinant()) / (w * w)
}

struct MetricDerivatives {
    e_s: f64,
    e_w: f64,
    f_s: f64,
    f_w: f64,
    g_s: f64,
    g_w: f64,
    e_ww: f64,
    g_ss: f64,
    f_sw: f64,
}

/// Residuals of the structure equations of a surface in `M(k)_f x I`
/// on a frame grid, with surface derivatives from grid differences.
pub fn compatibility_residuals(
    grid: &FrameGrid,
    kappa: Kappa,
    warp: &Warp,
) -> Result<CompatibilityReport> {
    if grid.rows < 3 || grid.cols < 3 {
        return Err(Error::InsufficientGrid {
            rows: grid.rows,
            cols: grid.cols,
        });
    }
    let gij = |a: usize, b: usize| grid.field(move |x| x.metric[(a, b)]);
    let (ge, gf, gg) = (gij(0, 0), gij(0, 1), gij(1, 1));
    let dg = [
        [[ge.d(0), ge.d(1)], [gf.d(0), gf.d(1)]],
        [[gf.d(0), gf.d(1)], [gg.d(0), gg.d(1)]],
    ];
    let tan = [
        grid.field(|x| x.tangential[0]),
        grid.field(|x| x.tangential[1]),
    ];
    let dtan = [[tan[0].d(0), tan[0].d(1)], [tan[1].d(0), tan[1].d(1)]];
    let nu = grid.field(|x| x.nu);
    let dnu = [nu.d(0), nu.d(1)];
    let shape = |c: usize, a: usize| grid.field(move |x| x.shape[(c, a)]);
    let s_cw = [shape(0, 1), shape(1, 1)];
    let s_cs = [shape(0, 0), shape(1, 0)];
    let ds_cw_s = [s_cw[0].d(0), s_cw[1].d(0)];
    let ds_cs_w = [s_cs[0].d(1), s_cs[1].d(1)];
    let rho = grid.field(|x| 0.5 * x.shape.trace());
    let drho = [rho.d(0), rho.d(1)];
    let (e_s, e_w) = (ge.d(0), ge.d(1));
    let (g_s, g_w) = (gg.d(0), gg.d(1));
    let (f_s, f_w) = (gf.d(0), gf.d(1));
    let (e_ww, g_ss, f_sw) = (ge.d2(1), gg.d2(0), f_s.d(1));

    let mut report = CompatibilityReport::default();
    for i in 0..grid.rows {
        for j in 0..grid.cols {
            let fr = grid.at(i, j);
            let w = warp.eval(fr.point.t)?;
            let ke = kappa.value() * (-2.0 * w.f).exp();
            let metric = fr.metric;
            let inv = metric.try_inverse().ok_or(Error::DegenerateTangents {
                det: metric.determinant(),
            })?;
            // Christoffel symbols gamma[c][a][b] of the induced metric.
            let mut gamma = [[[0.0; 2]; 2]; 2];
            for c in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        let mut sum = 0.0;
                        for d in 0..2 {
                            let dg_ab_d = dg[a][b][d].get(i, j);
                            let dg_db_a = dg[d][b][a].get(i, j);
                            let dg_da_b = dg[d][a][b].get(i, j);
                            sum += inv[(c, d)] * (dg_db_a + dg_da_b - dg_ab_d);
                        }
                        gamma[c][a][b] = 0.5 * sum;
                    }
                }
            }
            let t = fr.tangential;
            let g_t = metric * t;
            let t2 = t.dot(&g_t);
            report.unit_angle = report.unit_angle.max((t2 + fr.nu * fr.nu - 1.0).abs());

            for a in 0..2 {
                let len = metric[(a, a)].sqrt();
                let mut v = Vector2::zeros();
                for c in 0..2 {
                    let mut cov = dtan[c][a].get(i, j);
                    for b in 0..2 {
                        cov += gamma[c][a][b] * t[b];
                    }
                    let delta = if c == a { 1.0 } else { 0.0 };
                    v[c] = cov - fr.nu * fr.shape[(c, a)] - w.df * (delta - g_t[a] * t[c]);
                }
                report.tangent_derivative =
                    report.tangent_derivative.max(g_norm(&metric, &v) / len);

                let s_a = Vector2::new(fr.shape[(0, a)], fr.shape[(1, a)]);
                let scalar = s_a.dot(&g_t) + dnu[a].get(i, j) + w.df * fr.nu * g_t[a];
                report.angle_derivative = report.angle_derivative.max(scalar.abs() / len);
            }

            let d = MetricDerivatives {
                e_s: e_s.get(i, j),
                e_w: e_w.get(i, j),
                f_s: f_s.get(i, j),
                f_w: f_w.get(i, j),
                g_s: g_s.get(i, j),
                g_w: g_w.get(i, j),
                e_ww: e_ww.get(i, j),
                g_ss: g_ss.get(i, j),
                f_sw: f_sw.get(i, j),
            };
            let k_intrinsic = brioschi(metric[(0, 0)], metric[(0, 1)], metric[(1, 1)], &d);
            let k_gauss = gauss_intrinsic_curvature(kappa, &w, fr.shape.determinant(), t2);
            report.gauss = report.gauss.max((k_intrinsic - k_gauss).abs());

            // nabla_s (S psi_w) - nabla_w (S psi_s) + nu (f'' + k e^{-2f}) [g(psi_s,T) psi_w - g(psi_w,T) psi_s]
            let mut v = Vector2::zeros();
            for c in 0..2 {
                let mut lhs = ds_cw_s[c].get(i, j) - ds_cs_w[c].get(i, j);
                for d in 0..2 {
                    lhs += gamma[c][0][d] * fr.shape[(d, 1)] - gamma[c][1][d] * fr.shape[(d, 0)];
                }
                let bracket = if c == 1 { g_t[0] } else { -g_t[1] };
                v[c] = lhs + fr.nu * (w.d2f + ke) * bracket;
            }
            let area = (metric[(0, 0)] * metric[(1, 1)]).sqrt();
            report.codazzi = report.codazzi.max(g_norm(&metric, &v) / area);

            let grad = inv * Vector2::new(drho[0].get(i, j), drho[1].get(i, j));
            let v = grad + t * (fr.nu * (w.d2f + ke));
            report.umbilic_gradient = report.umbilic_gradient.max(g_norm(&metric, &v));
        }
    }
    Ok(report)
}

/// Largest `|grad varrho - sign nu (f'' + k e^{-2f}) T|` over the grid,
/// with `varrho = tr S / 2`. The structure equations force `sign = -1`.
pub fn umbilic_gradient_residual(
    grid: &FrameGrid,
    kappa: Kappa,
    warp: &Warp,
    sign: f64,
) -> Result<f64> {
    if grid.rows < 3 || grid.cols < 3 {
        return Err(Error::InsufficientGrid {
            rows: grid.rows,
            cols: grid.cols,
        });
    }
    let rho = grid.field(|x| 0.5 * x.shape.trace());
    let drho = [rho.d(0), rho.d(1)];
    let mut worst = 0.0f64;
    for i in 0..grid.rows {
        for j in 0..grid.cols {
            let fr = grid.at(i, j);
            let w = warp.eval(fr.point.t)?;
            let ke = kappa.value() * (-2.0 * w.f).exp();
            let inv = fr.metric.try_inverse().ok_or(Error::DegenerateTangents {
                det: fr.metric.determinant(),
            })?;
            let grad = inv * Vector2::new(drho[0].get(i, j), drho[1].get(i, j));
            let v = grad - fr.tangential * (sign * fr.nu * (w.d2f + ke));
            worst = worst.max(g_norm(&fr.metric, &v));
        }
    }
    Ok(worst)
}

/// Analytic and numeric umbilicity residuals, kept separate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UmbilicityReport {
    /// Largest `|k1 - k2|` from the closed-form curvatures.
    pub analytic: f64,
    /// Largest eigenvalue gap of the finite-difference shape operator.
    pub numeric: Option<f64>,
}

pub fn umbilicity_residual(
    spec: &InvariantSurfaceSpec,
    curve: &IntegrationResult,
    frames: &[SurfaceFrameSample],
) -> Result<UmbilicityReport> {
    let mut analytic = 0.0f64;
    for st in &curve.samples {
        let (k1, k2) = invariant_surface_curvatures(spec, &spec.jet(st)?)?;
        analytic = analytic.max((k1 - k2).abs());
    }
    let numeric = (!frames.is_empty()).then(|| {
        frames
            .iter()
            .map(SurfaceFrameSample::umbilic_gap)
            .fold(0.0, f64::max)
    });
    Ok(UmbilicityReport { analytic, numeric })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureLineReport {
    /// Largest angle in radians between `S T` and `T`, if any sample
    /// was checked.
    pub max_angle: Option<f64>,
    pub checked: usize,
    /// Samples with `|T| < 1e-8`.
    pub skipped: usize,
}

/// Checks that `T` is a principal direction along a section.
pub fn curvature_line_check(section: &[SurfaceFrameSample]) -> CurvatureLineReport {
    let mut report = CurvatureLineReport {
        max_angle: None,
        checked: 0,
        skipped: 0,
    };
    for fr in section {
        let t_len = g_norm(&fr.metric, &fr.tangential);
        if t_len < 1e-8 {
            report.skipped += 1;
            continue;
        }
        report.checked += 1;
        let st = fr.shape * fr.tangential;
        let st_len = g_norm(&fr.metric, &st);
        let angle = if st_len < 1e-12 {
            0.0
        } else {
            let dot = st.dot(&(fr.metric * fr.tangential)).abs();
            let cross = fr.metric.determinant().sqrt()
                * (st[0] * fr.tangential[1] - st[1] * fr.tangential[0]).abs();
            cross.atan2(dot)
        };
        report.max_angle = Some(report.max_angle.map_or(angle, |m: f64| m.max(angle)));
    }
    report
}
