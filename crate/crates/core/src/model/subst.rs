use std::fmt;

use super::ground::GroundAtom;
use super::rule::{Atom, CmpOp, Literal};
use super::term::{ArithOp, Symbol, Term, Value};
use super::EvalError;

/// Variable bindings to ground values. Rules carry at most a handful of
/// variables, so a flat vector beats a map here.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: Vec<(Symbol, Value)>,
}

impl Substitution {
    pub fn new() -> Self {
        Substitution::default()
    }

    pub fn get(&self, var: &str) -> Option<&Value> {
        self.bindings.iter().find(|(v, _)| &**v == var).map(|(_, val)| val)
    }

    pub fn bind(&mut self, var: Symbol, value: Value) {
        debug_assert!(self.get(&var).is_none());
        self.bindings.push((var, value));
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Drops bindings made after the substitution had `len` entries.
    pub fn truncate(&mut self, len: usize) {
        self.bindings.truncate(len);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Value)> {
        self.bindings.iter().map(|(k, v)| (k, v))
    }

    /// Extends `self` in place so that `pattern` maps onto `candidate`.
    /// On failure the substitution is left exactly as it was.
    pub fn match_into(&mut self, pattern: &Atom, candidate: &GroundAtom) -> bool {
        if pattern.predicate != candidate.predicate || pattern.args.len() != candidate.args.len() {
            return false;
        }
        let mark = self.len();
        for (term, value) in pattern.args.iter().zip(&candidate.args) {
            let ok = match term {
                Term::Var(v) => match self.get(v) {
                    Some(bound) => bound == value,
                    None => {
                        self.bindings.push((v.clone(), value.clone()));
                        true
                    }
                },
                Term::Const(c) => matches!(value, Value::Sym(s) if s == c),
                Term::Int(n) => matches!(value, Value::Int(m) if m == n),
                // Ground arithmetic never reaches an atom argument after
                // parsing; treat it as a non-match.
                Term::Arith(..) => false,
            };
            if !ok {
                self.truncate(mark);
                return false;
            }
        }
        true
    }

    pub fn eval(&self, term: &Term) -> Result<Value, EvalError> {
        match term {
            Term::Const(s) => Ok(Value::Sym(s.clone())),
            Term::Int(n) => Ok(Value::Int(*n)),
            Term::Var(v) => self.get(v).cloned().ok_or_else(|| EvalError::Unbound(v.to_string())),
            Term::Arith(op, l, r) => {
                let (a, b) = match (self.eval(l)?, self.eval(r)?) {
                    (Value::Int(a), Value::Int(b)) => (a, b),
                    (x, y) => {
                        let bad = if matches!(x, Value::Sym(_)) { x } else { y };
                        return Err(EvalError::NonInteger(bad.to_string()));
                    }
                };
                let out = match op {
                    ArithOp::Add => a.checked_add(b),
                    ArithOp::Sub => a.checked_sub(b),
                    ArithOp::Mul => a.checked_mul(b),
                    ArithOp::Div => {
                        if b == 0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        a.checked_div(b)
                    }
                };
                out.map(Value::Int).ok_or(EvalError::Overflow)
            }
        }
    }

    /// Applies the substitution to an atom whose arguments are flat.
    pub fn ground_atom(&self, atom: &Atom) -> Result<GroundAtom, EvalError> {
        let args = atom.args.iter().map(|t| self.eval(t)).collect::<Result<_, _>>()?;
        Ok(GroundAtom { predicate: atom.predicate.clone(), args })
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}↦{v}")?;
        }
        f.write_str("}")
    }
}

/// One-sided unification of a rule atom against a ground atom.
pub fn match_atom(pattern: &Atom, candidate: &GroundAtom, subst: &Substitution) -> Option<Substitution> {
    let mut out = subst.clone();
    out.match_into(pattern, candidate).then_some(out)
}

pub fn compare(op: CmpOp, left: &Value, right: &Value) -> bool {
    match op {
        CmpOp::Eq => left == right,
        CmpOp::Ne => left != right,
        CmpOp::Lt => left < right,
        CmpOp::Le => left <= right,
        CmpOp::Gt => left > right,
        CmpOp::Ge => left >= right,
    }
}

/// Evaluates a comparison literal under a substitution binding all its variables.
pub fn eval_comparison(literal: &Literal, subst: &Substitution) -> Result<bool, EvalError> {
    match literal {
        Literal::Cmp(op, l, r) => Ok(compare(*op, &subst.eval(l)?, &subst.eval(r)?)),
        other => Err(EvalError::NotAComparison(other.to_string())),
    }
}
