use std::collections::HashMap;

use super::lexer::{tokenize, Token, TokenKind};
use super::{ParseDiagnostic, ParseError};
use crate::model::{sym, ArithOp, Atom, CmpOp, FactSet, GroundAtom, Literal, NonGroundProgram, Rule, Symbol, Term};

type PResult<T> = Result<T, ParseDiagnostic>;

/// A statement plus the position of its first token.
struct Located<T> {
    item: T,
    line: usize,
    column: usize,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn new(text: &str, tokens: Vec<Token>) -> Self {
        let line = text.lines().count().max(1);
        let column = text.lines().last().map_or(1, |l| l.chars().count().max(1));
        Parser { tokens, pos: 0, end: (line, column) }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, offset: usize) -> Option<&Token> {
        self.tokens.get(self.pos + offset)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn next(&mut self) -> PResult<Token> {
        let tok = self.tokens.get(self.pos).cloned().ok_or_else(|| self.error_here("unexpected end of input"))?;
        self.pos += 1;
        Ok(tok)
    }

    fn error_here(&self, msg: impl Into<String>) -> ParseDiagnostic {
        match self.peek() {
            Some(t) => ParseDiagnostic::error(msg, t.line, t.column),
            None => ParseDiagnostic::error(msg, self.end.0, self.end.1),
        }
    }

    fn unexpected(&self, what: &str) -> ParseDiagnostic {
        match self.peek() {
            Some(t) => ParseDiagnostic::error(format!("expected {what}, found {t}"), t.line, t.column),
            None => self.error_here(format!("expected {what}, found end of input")),
        }
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.peek().is_some_and(|t| t.is_punct(p)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{p}`")))
        }
    }

    /// Skips past the next `.` after an error.
    fn recover(&mut self) {
        while let Some(t) = self.peek() {
            let stop = t.is_punct(".");
            self.pos += 1;
            if stop {
                break;
            }
        }
    }

    fn statement(&mut self) -> PResult<Located<Rule>> {
        let first = self.peek().cloned().ok_or_else(|| self.error_here("unexpected end of input"))?;
        if first.kind == TokenKind::Directive {
            return Err(ParseDiagnostic::error(
                format!("unexpected directive {}", first.lexeme),
                first.line,
                first.column,
            ));
        }
        let head = if first.is_punct(":-") { None } else { Some(self.atom()?) };
        let mut body = Vec::new();
        if self.eat_punct(":-") {
            loop {
                body.push(self.literal()?);
                if !self.eat_punct(",") {
                    break;
                }
            }
        } else if head.is_none() {
            return Err(self.unexpected("rule head"));
        }
        self.expect_punct(".")?;
        Ok(Located { item: Rule { head, body }, line: first.line, column: first.column })
    }

    fn atom(&mut self) -> PResult<Atom> {
        let tok = self.next()?;
        if tok.kind != TokenKind::Identifier {
            self.pos -= 1;
            return Err(self.unexpected("predicate name"));
        }
        let mut args = Vec::new();
        if self.eat_punct("(") {
            loop {
                args.push(self.argument()?);
                if !self.eat_punct(",") {
                    break;
                }
            }
            self.expect_punct(")")?;
        }
        Ok(Atom::new(tok.lexeme.as_str(), args))
    }

    /// Atom arguments are flat: constants, integers and variables only.
    fn argument(&mut self) -> PResult<Term> {
        let term = self.primary()?;
        if let Some(t) = self.peek() {
            if t.kind == TokenKind::Arithmetic {
                return Err(ParseDiagnostic::error("arithmetic is only allowed in comparisons", t.line, t.column));
            }
        }
        match term {
            Term::Arith(..) => Err(self.error_here("arithmetic is only allowed in comparisons")),
            t => Ok(t),
        }
    }

    fn literal(&mut self) -> PResult<Literal> {
        let first = self.peek().cloned().ok_or_else(|| self.unexpected("literal"))?;
        let second = self.peek_at(1).cloned();
        if first.is(TokenKind::Identifier, "not") && second.as_ref().is_some_and(|t| t.kind == TokenKind::Identifier) {
            self.pos += 1;
            return Ok(Literal::Neg(self.atom()?));
        }
        let starts_term = match (&first.kind, &second) {
            (TokenKind::Identifier, Some(s)) => matches!(s.kind, TokenKind::Comparison | TokenKind::Arithmetic),
            (TokenKind::Identifier, None) => false,
            _ => true,
        };
        if !starts_term {
            let atom = self.atom()?;
            if let Some(t) = self.peek() {
                if t.kind == TokenKind::Comparison {
                    return Err(ParseDiagnostic::error("function symbols are not supported", first.line, first.column));
                }
            }
            return Ok(Literal::Pos(atom));
        }
        let left = self.expr()?;
        let op_tok = self.next().map_err(|_| self.unexpected("comparison operator"))?;
        let op = match (op_tok.kind, op_tok.lexeme.as_str()) {
            (TokenKind::Comparison, "=") => CmpOp::Eq,
            (TokenKind::Comparison, "!=") => CmpOp::Ne,
            (TokenKind::Comparison, "<") => CmpOp::Lt,
            (TokenKind::Comparison, "<=") => CmpOp::Le,
            (TokenKind::Comparison, ">") => CmpOp::Gt,
            (TokenKind::Comparison, ">=") => CmpOp::Ge,
            _ => {
                self.pos -= 1;
                return Err(self.unexpected("comparison operator"));
            }
        };
        let right = self.expr()?;
        Ok(Literal::Cmp(op, left, right))
    }

    fn expr(&mut self) -> PResult<Term> {
        let mut left = self.product()?;
        while let Some(op) = self.arith_op(&["+", "-"]) {
            let right = self.product()?;
            left = Term::Arith(op, Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn product(&mut self) -> PResult<Term> {
        let mut left = self.primary()?;
        while let Some(op) = self.arith_op(&["*", "/"]) {
            let right = self.primary()?;
            left = Term::Arith(op, Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn arith_op(&mut self, allowed: &[&str]) -> Option<ArithOp> {
        let t = self.peek()?;
        if t.kind != TokenKind::Arithmetic || !allowed.contains(&t.lexeme.as_str()) {
            return None;
        }
        let op = match t.lexeme.as_str() {
            "+" => ArithOp::Add,
            "-" => ArithOp::Sub,
            "*" => ArithOp::Mul,
            _ => ArithOp::Div,
        };
        self.pos += 1;
        Some(op)
    }

    fn primary(&mut self) -> PResult<Term> {
        let tok = self.next().map_err(|_| self.unexpected("term"))?;
        match tok.kind {
            TokenKind::Integer => Ok(Term::Int(tok.lexeme.parse().expect("lexer checked range"))),
            TokenKind::Variable if tok.lexeme == "_" => {
                Err(ParseDiagnostic::error("anonymous variables are not supported", tok.line, tok.column))
            }
            TokenKind::Variable => Ok(Term::Var(sym(&tok.lexeme))),
            TokenKind::Identifier => {
                if self.peek().is_some_and(|t| t.is_punct("(")) {
                    return Err(ParseDiagnostic::error("function symbols are not supported", tok.line, tok.column));
                }
                Ok(Term::Const(sym(&tok.lexeme)))
            }
            TokenKind::Arithmetic if tok.lexeme == "-" => match self.primary()? {
                Term::Int(n) => Ok(Term::Int(-n)),
                other => Ok(Term::Arith(ArithOp::Sub, Box::new(Term::Int(0)), Box::new(other))),
            },
            TokenKind::Punctuation if tok.lexeme == "(" => {
                let inner = self.expr()?;
                self.expect_punct(")")?;
                Ok(inner)
            }
            _ => {
                self.pos -= 1;
                Err(self.unexpected("term"))
            }
        }
    }
}

fn check_arity(atom: &Atom, line: usize, column: usize, seen: &mut HashMap<Symbol, usize>) -> Option<ParseDiagnostic> {
    let arity = *seen.entry(atom.predicate.clone()).or_insert(atom.args.len());
    (arity != atom.args.len()).then(|| {
        ParseDiagnostic::error(
            format!("predicate {} used with arity {}, previously {}", atom.predicate, atom.args.len(), arity),
            line,
            column,
        )
    })
}

fn check_safety(rule: &Rule, line: usize, column: usize) -> Option<ParseDiagnostic> {
    rule.unsafe_vars().first().map(|v| ParseDiagnostic::error(format!("unsafe variable {v}"), line, column))
}

/// Parses a program. Every accepted rule is safe and uses each predicate
/// name with one arity throughout.
pub fn parse_program(text: &str) -> Result<NonGroundProgram, ParseError> {
    let tokens = tokenize(text).map_err(|d| ParseError::new(vec![d]))?;
    let mut parser = Parser::new(text, tokens);
    let mut rules = Vec::new();
    let mut diags = Vec::new();
    let mut arities = HashMap::new();
    while !parser.at_end() {
        match parser.statement() {
            Ok(Located { item, line, column }) => {
                let atoms = item.head.iter().chain(item.positive_atoms()).chain(item.negative_atoms());
                for atom in atoms {
                    if let Some(d) = check_arity(atom, line, column, &mut arities) {
                        diags.push(d);
                    }
                }
                if let Some(d) = check_safety(&item, line, column) {
                    diags.push(d);
                }
                rules.push(item);
            }
            Err(d) => {
                diags.push(d);
                parser.recover();
            }
        }
    }
    if diags.is_empty() {
        Ok(NonGroundProgram::new(rules))
    } else {
        Err(ParseError::new(diags))
    }
}

/// Parses a shot's fact file.
pub fn parse_facts(text: &str) -> Result<FactSet, ParseError> {
    let tokens = tokenize(text).map_err(|d| ParseError::new(vec![d]))?;
    let mut parser = Parser::new(text, tokens);
    let mut facts = FactSet::new();
    let mut diags = Vec::new();
    while !parser.at_end() {
        match fact_statement(&mut parser) {
            Ok(atom) => {
                facts.insert(atom);
            }
            Err(d) => {
                diags.push(d);
                parser.recover();
            }
        }
    }
    if diags.is_empty() {
        Ok(facts)
    } else {
        Err(ParseError::new(diags))
    }
}

fn fact_statement(parser: &mut Parser) -> PResult<GroundAtom> {
    if let Some(t) = parser.peek() {
        if t.is_punct(":-") {
            return Err(ParseDiagnostic::error("shots contain facts only", t.line, t.column));
        }
    }
    let (line, column) = parser.peek().map(|t| (t.line, t.column)).unwrap_or(parser.end);
    let atom = parser.atom()?;
    if let Some(t) = parser.peek() {
        if t.is_punct(":-") {
            return Err(ParseDiagnostic::error("shots contain facts only", t.line, t.column));
        }
    }
    parser.expect_punct(".")?;
    GroundAtom::try_from(&atom).map_err(|_| ParseDiagnostic::error("variable in fact", line, column))
}

/// Parses exactly one ground atom with no trailing `.`.
pub fn parse_ground_atom(text: &str) -> Result<GroundAtom, ParseError> {
    let tokens = tokenize(text).map_err(|d| ParseError::new(vec![d]))?;
    let mut parser = Parser::new(text, tokens);
    let atom = parser.atom().map_err(|d| ParseError::new(vec![d]))?;
    if !parser.at_end() {
        return Err(ParseError::new(vec![parser.unexpected("end of atom")]));
    }
    GroundAtom::try_from(&atom).map_err(|_| ParseError::new(vec![ParseDiagnostic::error("variable in fact", 1, 1)]))
}
