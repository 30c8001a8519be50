//! Second-order forward-mode jets over the 4 chart coordinates.
//!
//! A [`Jet2`] carries a value, its 4-gradient and the full symmetric 4x4
//! Hessian, propagated exactly through every arithmetic node. This is what
//! makes the curvature pipeline finite-difference-free: metric components
//! evaluated as jets hand back g, dg and d2g to machine precision.
//!
//! The Hessian is stored as the 10 packed upper-triangle entries, so
//! symmetry is structural rather than something to re-enforce.

use super::{Expr, Func};
use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// Packed index of the (i,j) Hessian entry, i <= j.
#[inline]
fn hidx(i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < 4);
    i * 4 + j - i * (i + 1) / 2
}

/// Value + gradient + symmetric Hessian at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub val: f64,
    pub grad: [f64; 4],
    hess: [f64; 10],
}

impl Jet2 {
    pub fn constant(v: f64) -> Jet2 {
        Jet2 {
            val: v,
            grad: [0.0; 4],
            hess: [0.0; 10],
        }
    }

    /// Seed jet for coordinate `k`: value x_k, unit gradient slot, zero Hessian.
    pub fn coord(value: f64, k: usize) -> Jet2 {
        let mut grad = [0.0; 4];
        grad[k] = 1.0;
        Jet2 {
            val: value,
            grad,
            hess: [0.0; 10],
        }
    }

    /// Hessian entry d^2 f / dx_i dx_j (symmetric access).
    #[inline]
    pub fn hess(&self, i: usize, j: usize) -> f64 {
        if i <= j {
            self.hess[hidx(i, j)]
        } else {
            self.hess[hidx(j, i)]
        }
    }

    pub fn is_finite(&self) -> bool {
        self.val.is_finite()
            && self.grad.iter().all(|g| g.is_finite())
            && self.hess.iter().all(|h| h.is_finite())
    }

    fn add(&self, o: &Jet2) -> Jet2 {
        let mut r = *self;
        r.val += o.val;
        for k in 0..4 {
            r.grad[k] += o.grad[k];
        }
        for k in 0..10 {
            r.hess[k] += o.hess[k];
        }
        r
    }

    fn sub(&self, o: &Jet2) -> Jet2 {
        let mut r = *self;
        r.val -= o.val;
        for k in 0..4 {
            r.grad[k] -= o.grad[k];
        }
        for k in 0..10 {
            r.hess[k] -= o.hess[k];
        }
        r
    }

    fn neg(&self) -> Jet2 {
        let mut r = *self;
        r.val = -r.val;
        for k in 0..4 {
            r.grad[k] = -r.grad[k];
        }
        for k in 0..10 {
            r.hess[k] = -r.hess[k];
        }
        r
    }

    fn mul(&self, o: &Jet2) -> Jet2 {
        let mut r = Jet2::constant(self.val * o.val);
        for k in 0..4 {
            r.grad[k] = self.grad[k] * o.val + self.val * o.grad[k];
        }
        for i in 0..4 {
            for j in i..4 {
                r.hess[hidx(i, j)] = self.hess(i, j) * o.val
                    + self.grad[i] * o.grad[j]
                    + self.grad[j] * o.grad[i]
                    + self.val * o.hess(i, j);
            }
        }
        r
    }

    /// Quotient rule, derived from q*b = a:
    ///   q_i  = (a_i - q b_i) / b
    ///   q_ij = (a_ij - q_i b_j - q_j b_i - q b_ij) / b
    fn div(&self, o: &Jet2) -> Jet2 {
        let b = o.val;
        let mut r = Jet2::constant(self.val / b);
        for k in 0..4 {
            r.grad[k] = (self.grad[k] - r.val * o.grad[k]) / b;
        }
        for i in 0..4 {
            for j in i..4 {
                r.hess[hidx(i, j)] = (self.hess(i, j)
                    - r.grad[i] * o.grad[j]
                    - r.grad[j] * o.grad[i]
                    - r.val * o.hess(i, j))
                    / b;
            }
        }
        r
    }

    /// Chain rule through a scalar function with derivatives f1 = f', f2 = f''.
    fn chain(&self, f0: f64, f1: f64, f2: f64) -> Jet2 {
        let mut r = Jet2::constant(f0);
        for k in 0..4 {
            r.grad[k] = f1 * self.grad[k];
        }
        for i in 0..4 {
            for j in i..4 {
                r.hess[hidx(i, j)] = f2 * self.grad[i] * self.grad[j] + f1 * self.hess(i, j);
            }
        }
        r
    }

    /// Integer power by repeated multiplication; valid for any base,
    /// including zero and negative values.
    fn powi(&self, n: i64) -> Jet2 {
        match n {
            0 => Jet2::constant(1.0),
            n if n < 0 => Jet2::constant(1.0).div(&self.powi(-n)),
            n => {
                let mut acc = *self;
                for _ in 1..n {
                    acc = acc.mul(self);
                }
                acc
            }
        }
    }
}

/// Parameter map for evaluation. BTreeMap keeps iteration (and therefore
/// report output) deterministic.
pub type Params = BTreeMap<String, f64>;

fn lookup(name: &str, params: &Params) -> Result<f64> {
    params
        .get(name)
        .copied()
        .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
}

fn domain_err(node: &Expr, msg: &str) -> Error {
    Error::EvalDomain {
        subexpr: node.to_string(),
        msg: msg.to_string(),
    }
}

/// Integer fast path for `^`: a literal (possibly negated) whole number in
/// exponent position selects repeated multiplication, which is defined for
/// any base. Everything else goes through exp(e*log(b)) and requires b > 0.
fn literal_int(e: &Expr) -> Option<i64> {
    match e {
        Expr::Num(v) if v.fract() == 0.0 && v.abs() <= 1e15 => Some(*v as i64),
        Expr::Neg(inner) => literal_int(inner).map(|n| -n),
        _ => None,
    }
}

/// Evaluate an expression as a second-order jet at `point`.
pub fn eval_jet2(expr: &Expr, point: &[f64; 4], params: &Params) -> Result<Jet2> {
    let jet = eval_node(expr, point, params)?;
    if !jet.is_finite() {
        return Err(domain_err(expr, "non-finite value or derivative"));
    }
    Ok(jet)
}

fn eval_node(expr: &Expr, point: &[f64; 4], params: &Params) -> Result<Jet2> {
    Ok(match expr {
        Expr::Num(v) => Jet2::constant(*v),
        Expr::Sym { name, slot } => match slot {
            super::Slot::Coord(k) => Jet2::coord(point[*k], *k),
            super::Slot::Param => Jet2::constant(lookup(name, params)?),
        },
        Expr::Neg(x) => eval_node(x, point, params)?.neg(),
        Expr::Add(a, b) => eval_node(a, point, params)?.add(&eval_node(b, point, params)?),
        Expr::Sub(a, b) => eval_node(a, point, params)?.sub(&eval_node(b, point, params)?),
        Expr::Mul(a, b) => eval_node(a, point, params)?.mul(&eval_node(b, point, params)?),
        Expr::Div(a, b) => {
            let den = eval_node(b, point, params)?;
            if den.val == 0.0 {
                return Err(domain_err(expr, "division by zero"));
            }
            eval_node(a, point, params)?.div(&den)
        }
        Expr::Pow(base, exp) => {
            let b = eval_node(base, point, params)?;
            if let Some(n) = literal_int(exp) {
                b.powi(n)
            } else {
                // Real exponent: b^e = exp(e * log b), b > 0 required.
                if b.val <= 0.0 {
                    return Err(domain_err(expr, "real-exponent power needs a positive base"));
                }
                let e = eval_node(exp, point, params)?;
                let ln = b.chain(b.val.ln(), 1.0 / b.val, -1.0 / (b.val * b.val));
                let prod = e.mul(&ln);
                let ev = prod.val.exp();
                prod.chain(ev, ev, ev)
            }
        }
        Expr::Call(func, arg) => {
            let u = eval_node(arg, point, params)?;
            let x = u.val;
            match func {
                Func::Sin => u.chain(x.sin(), x.cos(), -x.sin()),
                Func::Cos => u.chain(x.cos(), -x.sin(), -x.cos()),
                Func::Tan => {
                    let t = x.tan();
                    let s = 1.0 + t * t; // sec^2
                    u.chain(t, s, 2.0 * t * s)
                }
                Func::Exp => {
                    let e = x.exp();
                    u.chain(e, e, e)
                }
                Func::Log => {
                    if x <= 0.0 {
                        return Err(domain_err(expr, "log of a non-positive value"));
                    }
                    u.chain(x.ln(), 1.0 / x, -1.0 / (x * x))
                }
                Func::Sqrt => {
                    // x == 0 sits on the boundary where the derivative blows
                    // up, so it is rejected along with negative arguments.
                    if x <= 0.0 {
                        return Err(domain_err(expr, "sqrt of a non-positive value"));
                    }
                    let s = x.sqrt();
                    u.chain(s, 0.5 / s, -0.25 / (s * x))
                }
                Func::Sinh => u.chain(x.sinh(), x.cosh(), x.sinh()),
                Func::Cosh => u.chain(x.cosh(), x.sinh(), x.cosh()),
                Func::Abs => {
                    if x == 0.0 {
                        return Err(domain_err(expr, "abs is not differentiable at 0"));
                    }
                    u.chain(x.abs(), x.signum(), 0.0)
                }
            }
        }
    })
}

/// Value-only evaluation with the same domain checks as [`eval_jet2`].
pub fn eval_value(expr: &Expr, point: &[f64; 4], params: &Params) -> Result<f64> {
    let v = eval_value_node(expr, point, params)?;
    if !v.is_finite() {
        return Err(domain_err(expr, "non-finite value"));
    }
    Ok(v)
}

fn eval_value_node(expr: &Expr, point: &[f64; 4], params: &Params) -> Result<f64> {
    Ok(match expr {
        Expr::Num(v) => *v,
        Expr::Sym { name, slot } => match slot {
            super::Slot::Coord(k) => point[*k],
            super::Slot::Param => lookup(name, params)?,
        },
        Expr::Neg(x) => -eval_value_node(x, point, params)?,
        Expr::Add(a, b) => eval_value_node(a, point, params)? + eval_value_node(b, point, params)?,
        Expr::Sub(a, b) => eval_value_node(a, point, params)? - eval_value_node(b, point, params)?,
        Expr::Mul(a, b) => eval_value_node(a, point, params)? * eval_value_node(b, point, params)?,
        Expr::Div(a, b) => {
            let den = eval_value_node(b, point, params)?;
            if den == 0.0 {
                return Err(domain_err(expr, "division by zero"));
            }
            eval_value_node(a, point, params)? / den
        }
        Expr::Pow(base, exp) => {
            let b = eval_value_node(base, point, params)?;
            if let Some(n) = literal_int(exp) {
                let mut acc = 1.0;
                let p = b.powi(n.unsigned_abs().min(u32::MAX as u64) as i32);
                acc *= p;
                if n < 0 {
                    if p == 0.0 {
                        return Err(domain_err(expr, "zero base with negative exponent"));
                    }
                    acc = 1.0 / p;
                }
                acc
            } else {
                if b <= 0.0 {
                    return Err(domain_err(expr, "real-exponent power needs a positive base"));
                }
                let e = eval_value_node(exp, point, params)?;
                (e * b.ln()).exp()
            }
        }
        Expr::Call(func, arg) => {
            let x = eval_value_node(arg, point, params)?;
            match func {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan => x.tan(),
                Func::Exp => x.exp(),
                Func::Log => {
                    if x <= 0.0 {
                        return Err(domain_err(expr, "log of a non-positive value"));
                    }
                    x.ln()
                }
                Func::Sqrt => {
                    if x < 0.0 {
                        return Err(domain_err(expr, "sqrt of a negative value"));
                    }
                    x.sqrt()
                }
                Func::Sinh => x.sinh(),
                Func::Cosh => x.cosh(),
                Func::Abs => x.abs(),
            }
        }
    })
}
