use super::{Expr, Func};

// Constructors that fold the trivial identities produced by the
// derivative rules (0*x, 1*x, x+0, ...). Nothing beyond that.

fn is_const(e: &Expr, value: f64) -> bool {
    matches!(e, Expr::Const(c) if *c == value)
}

fn add(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        _ if is_const(&a, 0.0) => b,
        _ if is_const(&b, 0.0) => a,
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        _ if is_const(&b, 0.0) => a,
        _ if is_const(&a, 0.0) => neg(b),
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        _ if is_const(&a, 0.0) || is_const(&b, 0.0) => Expr::Const(0.0),
        _ if is_const(&a, 1.0) => b,
        _ if is_const(&b, 1.0) => a,
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
        _ => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    if is_const(&a, 0.0) {
        Expr::Const(0.0)
    } else if is_const(&b, 1.0) {
        a
    } else {
        Expr::Div(Box::new(a), Box::new(b))
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn pow(a: Expr, n: i32) -> Expr {
    match n {
        0 => Expr::Const(1.0),
        1 => a,
        _ => Expr::Pow(Box::new(a), n),
    }
}

fn call(func: Func, a: Expr) -> Expr {
    Expr::call(func, a)
}

impl Expr {
    /// Exact derivative with respect to `t`.
    pub fn derivative(&self) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Var => Expr::Const(1.0),
            Expr::Add(a, b) => add(a.derivative(), b.derivative()),
            Expr::Sub(a, b) => sub(a.derivative(), b.derivative()),
            Expr::Mul(a, b) => add(
                mul(a.derivative(), (**b).clone()),
                mul((**a).clone(), b.derivative()),
            ),
            Expr::Div(a, b) => {
                // (a'b - ab') / b^2
                let num = sub(
                    mul(a.derivative(), (**b).clone()),
                    mul((**a).clone(), b.derivative()),
                );
                div(num, pow((**b).clone(), 2))
            }
            Expr::Neg(a) => neg(a.derivative()),
            Expr::Pow(a, n) => mul(
                mul(Expr::Const(f64::from(*n)), pow((**a).clone(), n - 1)),
                a.derivative(),
            ),
            Expr::Call(func, a) => {
                let inner = a.derivative();
                let u = (**a).clone();
                let outer = match func {
                    Func::Sin => call(Func::Cos, u),
                    Func::Cos => neg(call(Func::Sin, u)),
                    Func::Tan => div(Expr::Const(1.0), pow(call(Func::Cos, u), 2)),
                    Func::Sinh => call(Func::Cosh, u),
                    Func::Cosh => call(Func::Sinh, u),
                    Func::Tanh => div(Expr::Const(1.0), pow(call(Func::Cosh, u), 2)),
                    Func::Exp => call(Func::Exp, u),
                    Func::Log => return div(inner, u),
                    Func::Sqrt => div(Expr::Const(1.0), mul(Expr::Const(2.0), call(Func::Sqrt, u))),
                };
                mul(outer, inner)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::parse;

    #[test]
    fn square_derivative_is_two_t() {
        let d = parse("t*t").unwrap().derivative();
        for t in [-2.0, -0.5, 0.0, 1.25, 3.0] {
            assert!((d.eval(t).unwrap() - 2.0 * t).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_derivative_is_zero() {
        assert_eq!(parse("3").unwrap().derivative().eval(0.7).unwrap(), 0.0);
    }

    #[test]
    fn log_cosecant_derivative_vanishes_at_half_pi() {
        let d = parse("log(1/sin(t))").unwrap().derivative();
        let t = std::f64::consts::FRAC_PI_2;
        assert!(d.eval(t).unwrap().abs() < 1e-15);
        // f' = -cot t elsewhere
        let t = 0.4;
        assert!((d.eval(t).unwrap() + t.cos() / t.sin()).abs() < 1e-13);
    }

    #[test]
    fn every_function_matches_central_differences() {
        let cases = [
            "sin(2*t)",
            "cos(t^2)",
            "tan(t/3)",
            "sinh(t) - t",
            "cosh(-t)",
            "tanh(t)^3",
            "exp(t/2)*t",
            "log(t + 2)",
            "sqrt(t*t + 1)",
            "t^-3",
        ];
        let t = 0.83;
        let h = 1e-5;
        for text in cases {
            let e = parse(text).unwrap();
            let d = e.derivative().eval(t).unwrap();
            let fd = (e.eval(t + h).unwrap() - e.eval(t - h).unwrap()) / (2.0 * h);
            assert!(
                (d - fd).abs() < 1e-8 * (1.0 + d.abs()),
                "{text}: {d} vs {fd}"
            );
        }
    }
}
