//! Scalar expressions over a 4-coordinate chart and named parameters.
//!
//! Metric components, conformal factors, domain guards and hypersurface
//! functions are all instances of [`Expr`]. The grammar is deliberately
//! small: literals, symbols, `+ - * / ^`, unary minus and a fixed set of
//! unary functions. Precedence is `^` > unary `-` > `* /` > `+ -`, so
//! `-r^2` is `-(r^2)` and `-a*b` is `(-a)*b`.
//!
//! Symbols are resolved at parse time against the chart and the declared
//! parameter names; anything else is rejected immediately rather than at
//! evaluation. Display emits a minimal-parenthesis form whose re-parse is
//! structurally identical to the original tree.

mod parse;

pub mod jet;

pub use jet::{eval_jet2, eval_value, Jet2};
pub use parse::parse;

use std::fmt;

/// Unary functions available in expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
    Abs,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "abs" => Func::Abs,
            _ => return None,
        })
    }
}

/// What a resolved symbol refers to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Slot {
    /// Chart coordinate with its index into the point array.
    Coord(usize),
    /// Named parameter, looked up in the parameter map at evaluation.
    Param,
}

/// Expression tree. Binary nodes keep their parse shape, so structural
/// equality distinguishes `a+(b+c)` from `(a+b)+c`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Sym { name: String, slot: Slot },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn coord(name: &str, index: usize) -> Expr {
        Expr::Sym {
            name: name.to_string(),
            slot: Slot::Coord(index),
        }
    }

    pub fn param(name: &str) -> Expr {
        Expr::Sym {
            name: name.to_string(),
            slot: Slot::Param,
        }
    }

    pub fn product(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    /// Binding strength used both by the printer and (implicitly) by the
    /// parser: higher binds tighter.
    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(..) | Expr::Sym { .. } | Expr::Call(..) => 5,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, wrap: bool) -> fmt::Result {
        if wrap {
            write!(f, "({})", self)
        } else {
            write!(f, "{}", self)
        }
    }
}

impl fmt::Display for Expr {
    /// Minimal-parenthesis form. The invariant backing serialization is
    /// `parse(e.to_string()) == e` for any tree produced by [`parse`] or the
    /// public constructors (checked by property tests).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // {:?} keeps a round-trippable shortest decimal form ("0.5",
            // "1e-30") where {} would print "0.0000...".
            Expr::Num(v) => write!(f, "{:?}", v),
            Expr::Sym { name, .. } => write!(f, "{}", name),
            Expr::Neg(x) => {
                write!(f, "-")?;
                x.fmt_child(f, x.prec() < 3)
            }
            Expr::Add(l, r) => {
                l.fmt_child(f, l.prec() < 1)?;
                write!(f, " + ")?;
                r.fmt_child(f, r.prec() <= 1)
            }
            Expr::Sub(l, r) => {
                l.fmt_child(f, l.prec() < 1)?;
                write!(f, " - ")?;
                r.fmt_child(f, r.prec() <= 1)
            }
            Expr::Mul(l, r) => {
                l.fmt_child(f, l.prec() < 2)?;
                write!(f, "*")?;
                r.fmt_child(f, r.prec() <= 2 && !matches!(**r, Expr::Neg(_)))
            }
            Expr::Div(l, r) => {
                l.fmt_child(f, l.prec() < 2)?;
                write!(f, "/")?;
                // Anything at or below * / in the divisor changes meaning
                // without parens; a bare unary minus does not.
                r.fmt_child(f, r.prec() <= 2 && !matches!(**r, Expr::Neg(_)))
            }
            Expr::Pow(b, e) => {
                b.fmt_child(f, b.prec() <= 4)?;
                write!(f, "^")?;
                e.fmt_child(f, e.prec() < 3)
            }
            Expr::Call(func, arg) => write!(f, "{}({})", func.name(), arg),
        }
    }
}
