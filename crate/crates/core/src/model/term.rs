use std::fmt;
use std::sync::Arc;

/// Interned-by-value name for constants, predicates and variables.
pub type Symbol = Arc<str>;

/// A ground value. The derived ordering puts every integer before every
/// constant; integers compare numerically, constants lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(i64),
    Sym(Symbol),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Sym(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn as_str(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            ArithOp::Add | ArithOp::Sub => 1,
            ArithOp::Mul | ArithOp::Div => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Const(Symbol),
    Int(i64),
    Var(Symbol),
    Arith(ArithOp, Box<Term>, Box<Term>),
}

impl Term {
    pub fn is_ground(&self) -> bool {
        match self {
            Term::Const(_) | Term::Int(_) => true,
            Term::Var(_) => false,
            Term::Arith(_, l, r) => l.is_ground() && r.is_ground(),
        }
    }

    /// Pushes every variable occurrence, left to right.
    pub fn collect_vars<'a>(&'a self, out: &mut Vec<&'a Symbol>) {
        match self {
            Term::Var(v) => out.push(v),
            Term::Arith(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Term::Const(_) | Term::Int(_) => {}
        }
    }

    /// The value of a flat ground term; `None` for variables and arithmetic.
    pub fn as_value(&self) -> Option<Value> {
        match self {
            Term::Const(s) => Some(Value::Sym(s.clone())),
            Term::Int(n) => Some(Value::Int(*n)),
            _ => None,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Term::Arith(op, _, _) => op.precedence(),
            _ => 3,
        }
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>, parent: u8, right: bool) -> fmt::Result {
        let own = self.precedence();
        let negative = matches!(self, Term::Int(n) if *n < 0);
        if own < parent || (right && own == parent) || negative {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(s) => f.write_str(s),
            Term::Var(v) => f.write_str(v),
            Term::Int(n) => write!(f, "{n}"),
            Term::Arith(op, l, r) => {
                l.fmt_operand(f, op.precedence(), false)?;
                f.write_str(op.as_str())?;
                r.fmt_operand(f, op.precedence(), true)
            }
        }
    }
}

impl From<Value> for Term {
    fn from(v: Value) -> Self {
        match v {
            Value::Int(n) => Term::Int(n),
            Value::Sym(s) => Term::Const(s),
        }
    }
}
