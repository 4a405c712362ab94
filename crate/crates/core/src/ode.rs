//! Adaptive Dormand–Prince 5(4) integration with boundary and sign-change
//! events.

use serde::{Deserialize, Serialize};

/// Why an integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    ReachedEnd,
    /// Rotational profile reached the rotation axis.
    Axis,
    ChartBoundary,
    WarpBoundary,
    TurningPointLimit,
    StepUnderflow,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::ReachedEnd => "reached-end",
            Termination::Axis => "axis",
            Termination::ChartBoundary => "chart-boundary",
            Termination::WarpBoundary => "warp-boundary",
            Termination::TurningPointLimit => "turning-point-limit",
            Termination::StepUnderflow => "step-underflow",
        }
    }
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A first-order system `y' = F(s, y)` with admissibility checks.
pub trait OdeSystem<const N: usize> {
    /// Right-hand side; `Err` classifies why the state cannot be evaluated.
    fn rhs(&self, s: f64, y: &[f64; N]) -> Result<[f64; N], Termination>;

    /// Rejects states outside the region of interest (axis, chart, warp).
    fn check(&self, _y: &[f64; N]) -> Result<(), Termination> {
        Ok(())
    }

    /// Scalar whose sign changes are reported as events.
    fn event(&self, _y: &[f64; N]) -> Option<f64> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    /// Local error tolerance per step (mixed absolute/relative).
    pub tol: f64,
    pub initial_step: f64,
    pub max_step: f64,
    /// Events beyond this count stop the integration.
    pub max_events: usize,
    /// Emit samples on this uniform grid instead of at every step.
    pub output_spacing: Option<f64>,
    pub max_steps: usize,
}

impl Default for Options {
    fn default() -> Options {
        Options {
            tol: 1e-10,
            initial_step: 1e-3,
            max_step: 0.1,
            max_events: 32,
            output_spacing: None,
            max_steps: 2_000_000,
        }
    }
}

/// One emitted sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample<const N: usize> {
    pub s: f64,
    pub y: [f64; N],
    /// Located sign change of the event function.
    pub event: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution<const N: usize> {
    pub samples: Vec<Sample<N>>,
    pub termination: Termination,
    pub events: usize,
}

/// Location accuracy (in `s`) for boundaries and events.
pub const LOCATE_TOL: f64 = 1e-12;
/// Event values smaller than this count as "no sign".
const EVENT_DEAD_ZONE: f64 = 1e-14;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn stages<const N: usize, S: OdeSystem<N> + ?Sized>(
    system: &S,
    s: f64,
    y: &[f64; N],
    h: f64,
) -> Result<([f64; N], [f64; N]), Termination> {
    let mut k = [[0.0; N]; 7];
    for stage in 0..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(stage) {
            let a = A[stage][j];
            if a != 0.0 {
                for i in 0..N {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[stage] = system.rhs(s + C[stage] * h, &ys)?;
    }
    let mut d5 = [0.0; N];
    let mut d4 = [0.0; N];
    for i in 0..N {
        for stage in 0..7 {
            d5[i] += B5[stage] * k[stage][i];
            d4[i] += B4[stage] * k[stage][i];
        }
    }
    Ok((d5, d4))
}

/// The fifth-order increment `y(s + h) - y(s)` of one step, without
/// adding it to `y`.
pub fn increment<const N: usize, S: OdeSystem<N> + ?Sized>(
    system: &S,
    s: f64,
    y: &[f64; N],
    h: f64,
) -> Result<[f64; N], Termination> {
    let (d5, _) = stages(system, s, y, h)?;
    Ok(d5.map(|v| h * v))
}

/// One Dormand–Prince step: fifth-order solution and scaled error norm.
pub fn step<const N: usize, S: OdeSystem<N> + ?Sized>(
    system: &S,
    s: f64,
    y: &[f64; N],
    h: f64,
    tol: f64,
) -> Result<([f64; N], f64), Termination> {
    let (d5, d4) = stages(system, s, y, h)?;
    let mut y5 = *y;
    let mut err = 0.0f64;
    for i in 0..N {
        y5[i] += h * d5[i];
        let scale = tol * (1.0 + y[i].abs().max(y5[i].abs()));
        err = err.max((h * (d5[i] - d4[i])).abs() / scale);
    }
    if y5.iter().any(|v| !v.is_finite()) {
        return Err(Termination::StepUnderflow);
    }
    Ok((y5, err))
}

fn event_sign(value: Option<f64>) -> Option<f64> {
    value.filter(|v| v.abs() > EVENT_DEAD_ZONE).map(f64::signum)
}

/// Integrates from `(s0, y0)` towards `s_end > s0`.
///
/// The initial state must pass [`OdeSystem::check`]; otherwise the
/// solution contains no samples and reports the failed check.
pub fn integrate<const N: usize, S: OdeSystem<N> + ?Sized>(
    system: &S,
    s0: f64,
    y0: [f64; N],
    s_end: f64,
    options: &Options,
) -> Solution<N> {
    let mut out = Solution {
        samples: Vec::new(),
        termination: Termination::ReachedEnd,
        events: 0,
    };
    if let Err(halt) = system.check(&y0) {
        out.termination = halt;
        return out;
    }
    out.samples.push(Sample {
        s: s0,
        y: y0,
        event: false,
    });

    let tol = options.tol;
    let mut s = s0;
    let mut y = y0;
    let mut h = options.initial_step.min(options.max_step);
    let mut last_halt: Option<Termination> = None;
    let mut sign = event_sign(system.event(&y0));
    let mut next_output = options.output_spacing.map(|ds| s0 + ds);
    let end_slack = LOCATE_TOL * (1.0 + s_end.abs());

    for _ in 0..options.max_steps {
        if s >= s_end - end_slack {
            return out;
        }
        let mut target = s_end;
        if let Some(next) = next_output {
            target = target.min(next);
        }
        h = h.min(target - s).min(options.max_step);
        if h < 1e-14 * (1.0 + s.abs()) {
            out.termination = last_halt.unwrap_or(Termination::StepUnderflow);
            return out;
        }
        let (y1, err) = match step(system, s, &y, h, tol) {
            Ok(result) => result,
            Err(halt) => {
                last_halt = Some(halt);
                h *= 0.25;
                continue;
            }
        };
        if err > 1.0 {
            h *= (0.9 * err.powf(-0.2)).max(0.2);
            continue;
        }

        if let Err(halt) = system.check(&y1) {
            // Largest admissible partial step.
            let (mut lo, mut hi) = (0.0, h);
            let mut y_lo = y;
            while hi - lo > LOCATE_TOL {
                let mid = 0.5 * (lo + hi);
                match step(system, s, &y, mid, tol) {
                    Ok((ym, _)) if system.check(&ym).is_ok() => {
                        lo = mid;
                        y_lo = ym;
                    }
                    _ => hi = mid,
                }
            }
            if lo > 0.0 {
                out.samples.push(Sample {
                    s: s + lo,
                    y: y_lo,
                    event: false,
                });
            }
            out.termination = halt;
            return out;
        }

        let new_sign = event_sign(system.event(&y1));
        if let (Some(before), Some(after)) = (sign, new_sign) {
            if before != after {
                let (mut lo, mut hi) = (0.0, h);
                let mut y_root = y1;
                while hi - lo > LOCATE_TOL {
                    let mid = 0.5 * (lo + hi);
                    let Ok((ym, _)) = step(system, s, &y, mid, tol) else {
                        break;
                    };
                    y_root = ym;
                    match event_sign(system.event(&ym)) {
                        Some(v) if v == before => lo = mid,
                        _ => hi = mid,
                    }
                }
                out.events += 1;
                let root = 0.5 * (lo + hi);
                if root > LOCATE_TOL && root < h - LOCATE_TOL {
                    out.samples.push(Sample {
                        s: s + root,
                        y: y_root,
                        event: true,
                    });
                }
                if out.events > options.max_events {
                    out.termination = Termination::TurningPointLimit;
                    return out;
                }
            }
        }
        if new_sign.is_some() {
            sign = new_sign;
        }

        s += h;
        y = y1;
        last_halt = None;
        let emit = match next_output.as_mut() {
            None => true,
            Some(next) => {
                if (s - *next).abs() <= end_slack {
                    s = *next;
                    *next = s0
                        + ((s - s0) / options.output_spacing.unwrap()).round()
                            * options.output_spacing.unwrap()
                        + options.output_spacing.unwrap();
                    true
                } else {
                    false
                }
            }
        };
        if emit || s >= s_end - end_slack {
            out.samples.push(Sample { s, y, event: false });
        }
        h *= (0.9 * err.max(1e-10).powf(-0.2)).min(5.0);
    }
    out.termination = Termination::StepUnderflow;
    out
}
