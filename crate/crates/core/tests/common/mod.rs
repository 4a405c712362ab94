//! Independent numerical oracles shared by the integration tests.
//!
//! Nothing here calls the closed-form curvature formulas of the
//! library; only metric values, the connection table (for the curvature
//! oracle) and plain finite differences.

#![allow(dead_code)]

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use rand::rngs::StdRng;
use rand::Rng;
use umbilic::expr::{Expr, Func};
use umbilic::geometry::{AmbientPoint, CoordVector, FrameVector, WarpedProduct};

pub const H: f64 = 1e-4;

fn basis(i: usize) -> CoordVector {
    let mut v = CoordVector::zeros();
    v[i] = 1.0;
    v
}

/// Coordinate metric matrix from `metric_dot` alone.
pub fn metric_matrix(space: &WarpedProduct, p: &AmbientPoint) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| space.metric_dot(p, &basis(i), &basis(j)).unwrap())
}

/// Christoffel symbols `gamma[k][i][j]` of the coordinate metric by central
/// differences.
pub fn christoffel(space: &WarpedProduct, p: &AmbientPoint, h: f64) -> [[[f64; 3]; 3]; 3] {
    let dg: Vec<Matrix3<f64>> = (0..3)
        .map(|a| {
            (metric_matrix(space, &p.offset(&basis(a), h))
                - metric_matrix(space, &p.offset(&basis(a), -h)))
                / (2.0 * h)
        })
        .collect();
    let inv = metric_matrix(space, p).try_inverse().unwrap();
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                let mut sum = 0.0;
                for l in 0..3 {
                    sum += inv[(k, l)] * (dg[i][(l, j)] + dg[j][(l, i)] - dg[l][(i, j)]);
                }
                gamma[k][i][j] = 0.5 * sum;
            }
        }
    }
    gamma
}

/// Orthonormal frame `E_i` as coordinate vectors, from the metric matrix.
pub fn frame_from_metric(space: &WarpedProduct, p: &AmbientPoint) -> [CoordVector; 3] {
    let g = metric_matrix(space, p);
    [
        basis(0) / g[(0, 0)].sqrt(),
        basis(1) / g[(1, 1)].sqrt(),
        basis(2) / g[(2, 2)].sqrt(),
    ]
}

/// `nabla_{E_i} E_j` in frame components, from Christoffel symbols and
/// differences of the frame fields.
pub fn connection_oracle(space: &WarpedProduct, p: &AmbientPoint, h: f64) -> [[FrameVector; 3]; 3] {
    let gamma = christoffel(space, p, h);
    let e = frame_from_metric(space, p);
    let g = metric_matrix(space, p);
    let mut out = [[FrameVector::zeros(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let ei = e[i];
            let plus = frame_from_metric(space, &p.offset(&ei, h))[j];
            let minus = frame_from_metric(space, &p.offset(&ei, -h))[j];
            let mut v = (plus - minus) / (2.0 * h);
            for k in 0..3 {
                for a in 0..3 {
                    for b in 0..3 {
                        v[k] += gamma[k][a][b] * ei[a] * e[j][b];
                    }
                }
            }
            for m in 0..3 {
                out[i][j][m] = (v.transpose() * g * e[m])[(0, 0)];
            }
        }
    }
    out
}

fn contract(table: &[[FrameVector; 3]; 3], x: &FrameVector, y: &FrameVector) -> FrameVector {
    let mut out = FrameVector::zeros();
    for i in 0..3 {
        for j in 0..3 {
            out += table[i][j] * (x[i] * y[j]);
        }
    }
    out
}

/// `nabla_X Y` at `p` for a frame-component field `y`.
pub fn covariant<F>(
    space: &WarpedProduct,
    p: &AmbientPoint,
    x: &FrameVector,
    y: &F,
    h: f64,
) -> FrameVector
where
    F: Fn(&AmbientPoint) -> FrameVector,
{
    let xc = space.to_coords(p, x).unwrap();
    let dy = (y(&p.offset(&xc, h)) - y(&p.offset(&xc, -h))) / (2.0 * h);
    dy + contract(&space.connection_table(p).unwrap(), x, &y(p))
}

/// `R(A,B)C = nabla_B nabla_A C - nabla_A nabla_B C + nabla_[A,B] C` for
/// fields with constant frame components, by nested central differences.
pub fn commutator_curvature(
    space: &WarpedProduct,
    p: &AmbientPoint,
    a: &FrameVector,
    b: &FrameVector,
    c: &FrameVector,
    h: f64,
) -> FrameVector {
    let nabla_const = |x: FrameVector| {
        move |q: &AmbientPoint| contract(&space.connection_table(q).unwrap(), &x, c)
    };
    let ba = covariant(space, p, b, &nabla_const(*a), h);
    let ab = covariant(space, p, a, &nabla_const(*b), h);
    let coords = |x: FrameVector| move |q: &AmbientPoint| space.to_coords(q, &x).unwrap();
    let ac = space.to_coords(p, a).unwrap();
    let bc = space.to_coords(p, b).unwrap();
    let a_of_b = (coords(*b)(&p.offset(&ac, h)) - coords(*b)(&p.offset(&ac, -h))) / (2.0 * h);
    let b_of_a = (coords(*a)(&p.offset(&bc, h)) - coords(*a)(&p.offset(&bc, -h))) / (2.0 * h);
    let bracket = space.to_frame(p, &(a_of_b - b_of_a)).unwrap();
    ba - ab + contract(&space.connection_table(p).unwrap(), &bracket, c)
}

/// Geodesic curvature of a plane curve under a metric `G(x)` given as a
/// function, with Christoffel symbols from differences of `G` and the
/// curve derivatives from differences of `curve`. Orientation: the left
/// normal.
pub fn numeric_geodesic_curvature<C, G>(curve: &C, metric: &G, u: f64, h: f64) -> f64
where
    C: Fn(f64) -> Vector2<f64>,
    G: Fn(&Vector2<f64>) -> Matrix2<f64>,
{
    let x = curve(u);
    let d1 = (curve(u + h) - curve(u - h)) / (2.0 * h);
    let d2 = (curve(u + h) - 2.0 * x + curve(u - h)) / (h * h);
    let e = [Vector2::new(1.0, 0.0), Vector2::new(0.0, 1.0)];
    let dg: Vec<Matrix2<f64>> = (0..2)
        .map(|a| (metric(&(x + e[a] * h)) - metric(&(x - e[a] * h))) / (2.0 * h))
        .collect();
    let g = metric(&x);
    let inv = g.try_inverse().unwrap();
    let mut acc = d2;
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                let mut gamma = 0.0;
                for l in 0..2 {
                    gamma += 0.5 * inv[(k, l)] * (dg[i][(l, j)] + dg[j][(l, i)] - dg[l][(i, j)]);
                }
                acc[k] += gamma * d1[i] * d1[j];
            }
        }
    }
    let speed = d1.dot(&(g * d1)).sqrt();
    g.determinant().sqrt() * (d1[0] * acc[1] - d1[1] * acc[0]) / speed.powi(3)
}

/// A random star-shaped smooth closed curve `r(u) (cos u, sin u)`.
#[derive(Debug, Clone, Copy)]
pub struct StarCurve {
    pub radius: f64,
    pub a: f64,
    pub b: f64,
    pub k: f64,
    pub m: f64,
    pub phase: f64,
}

impl StarCurve {
    pub fn random(rng: &mut StdRng) -> StarCurve {
        StarCurve {
            radius: rng.gen_range(0.5..1.5),
            a: rng.gen_range(0.0..0.2),
            b: rng.gen_range(0.0..0.2),
            k: rng.gen_range(2..5) as f64,
            m: rng.gen_range(2..5) as f64,
            phase: rng.gen_range(0.0..std::f64::consts::TAU),
        }
    }

    pub fn point(&self, u: f64) -> Vector2<f64> {
        let r = self.radius
            * (1.0 + self.a * (self.k * u).cos() + self.b * (self.m * u + self.phase).sin());
        Vector2::new(r * u.cos(), r * u.sin())
    }
}

/// A random smooth conformal exponent `phi(x, y)`.
#[derive(Debug, Clone, Copy)]
pub struct Exponent {
    pub c: [f64; 5],
}

impl Exponent {
    pub fn random(rng: &mut StdRng) -> Exponent {
        Exponent {
            c: [
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.5..0.5),
                rng.gen_range(0.5..2.0),
                rng.gen_range(-0.3..0.3),
            ],
        }
    }

    pub fn value(&self, x: &Vector2<f64>) -> f64 {
        let c = &self.c;
        c[0] * x[0] + c[1] * x[1] + c[2] * (c[3] * x[0] + x[1]).sin() + c[4] * x[0] * x[1]
    }
}

/// Random expression trees with non-negative constants (the printer and
/// parser have no negative literal).
pub fn random_expr(rng: &mut StdRng, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.6) {
            Expr::Var
        } else {
            let v: f64 = rng.gen_range(0.0..5.0);
            Expr::Const((v * 100.0).round() / 100.0)
        };
    }
    let sub = |rng: &mut StdRng| Box::new(random_expr(rng, depth - 1));
    match rng.gen_range(0..9) {
        0 => Expr::Add(sub(rng), sub(rng)),
        1 => Expr::Sub(sub(rng), sub(rng)),
        2 => Expr::Mul(sub(rng), sub(rng)),
        3 => Expr::Div(sub(rng), sub(rng)),
        4 => Expr::Neg(sub(rng)),
        5 => Expr::Pow(sub(rng), rng.gen_range(-3..5)),
        _ => {
            let f = Func::ALL[rng.gen_range(0..Func::ALL.len())];
            Expr::Call(f, sub(rng))
        }
    }
}

/// `| f'(t) - central difference |` against the bound
/// `(|f'''| / 6 + slack) h^2 + roundoff / h`, with `f'''` evaluated
/// symbolically on `[t - h, t + h]`. Returns `None` when the expression
/// cannot be evaluated around `t`.
pub fn derivative_within_bound(e: &Expr, t: f64, h: f64) -> Option<bool> {
    let d1 = e.derivative();
    let d3 = d1.derivative().derivative();
    let fp = e.eval(t + h).ok()?;
    let fm = e.eval(t - h).ok()?;
    let exact = d1.eval(t).ok()?;
    let mut third = 0.0f64;
    for k in -4..=4 {
        third = third.max(d3.eval(t + h * k as f64 / 4.0).ok()?.abs());
    }
    let scale = fp.abs().max(fm.abs()).max(1.0);
    if !third.is_finite() || scale > 1e8 {
        return None;
    }
    let fd = (fp - fm) / (2.0 * h);
    let bound = (third / 6.0 * 1.5 + 1e-9) * h * h + 1e3 * f64::EPSILON * scale / h;
    Some((exact - fd).abs() <= bound)
}

pub fn vec3(a: [f64; 3]) -> Vector3<f64> {
    Vector3::new(a[0], a[1], a[2])
}
