//! The `.qtp` guarded-command language: lexer, parser and AST.
//! The grammar is documented in `docs/grammar.ebnf`.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::domains::{parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub lo: i64,
    pub hi: i64,
}

impl VarDecl {
    pub fn size(&self) -> u64 {
        (self.hi - self.lo + 1) as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AExpr {
    Int(i64),
    Var(usize),
    Neg(Box<AExpr>),
    Add(Box<AExpr>, Box<AExpr>),
    Sub(Box<AExpr>, Box<AExpr>),
    Mul(Box<AExpr>, Box<AExpr>),
    Max(Box<AExpr>, Box<AExpr>),
    Min(Box<AExpr>, Box<AExpr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BExpr {
    Const(bool),
    Cmp(RelOp, AExpr, AExpr),
    Not(Box<BExpr>),
    And(Box<BExpr>, Box<BExpr>),
    Or(Box<BExpr>, Box<BExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Assign { var: usize, expr: AExpr, pos: Pos },
    Skip,
    /// Weighted mode: no successor at all.
    Fail,
    Add { weight: u64, body: Vec<Stmt> },
    If { cond: BExpr, then: Vec<Stmt>, otherwise: Vec<Stmt> },
    /// Branch `i` taken with probability `probs[i]`; the last branch gets
    /// the remainder.
    Prob { branches: Vec<Vec<Stmt>>, probs: Vec<Rational> },
    Nondet { branches: Vec<Vec<Stmt>> },
    Block(Vec<Stmt>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProgramMode {
    /// Neither probabilistic nor weighted constructs occur.
    Plain,
    Probabilistic,
    Weighted,
}

/// A label case: one pattern element per label argument (`None` = `_`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelCase {
    pub pattern: Vec<Option<i64>>,
    pub symbol: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub vars: Vec<VarDecl>,
    pub labels: Vec<String>,
    pub label_args: Vec<usize>,
    pub label_cases: Vec<LabelCase>,
    pub init: Vec<i64>,
    pub guard: BExpr,
    pub body: Vec<Stmt>,
    pub mode: ProgramMode,
}

impl Program {
    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Decimal(String),
    Punct(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: Pos,
}

const PUNCT: [&str; 22] = [
    "<-", ":=", "=>", "==", "!=", "<=", ">=", "&&", "||", "{", "}", "(", ")", "[", "]", ";", ",", "=", "+", "-",
    "*", "/",
];
const PUNCT1: [&str; 3] = ["<", ">", "!"];

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, column, message: String| ParseError { line, column, message };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token { tok: Tok::Ident(word), pos });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let mut decimal = false;
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                decimal = true;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = if decimal {
                Tok::Decimal(word)
            } else {
                Tok::Int(word.parse().map_err(|_| err(pos.line, pos.column, format!("integer `{word}` too large")))?)
            };
            out.push(Token { tok, pos });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        if let Some(p) = PUNCT.iter().find(|p| rest.starts_with(**p)) {
            i += p.len();
            col += p.len();
            out.push(Token { tok: Tok::Punct(p), pos });
            continue;
        }
        if let Some(p) = PUNCT1.iter().find(|p| rest.starts_with(**p)) {
            i += 1;
            col += 1;
            out.push(Token { tok: Tok::Punct(p), pos });
            continue;
        }
        return Err(err(line, col, format!("unexpected character `{c}`")));
    }
    out.push(Token { tok: Tok::Eof, pos: Pos { line, column: col } });
    Ok(out)
}

const KEYWORDS: [&str; 17] = [
    "var", "in", "labels", "label", "init", "while", "if", "else", "skip", "fail", "add", "max", "min", "true",
    "false", "and", "or",
];

struct Parser {
    toks: Vec<Token>,
    at: usize,
    vars: Vec<VarDecl>,
    var_index: HashMap<String, usize>,
    uses_prob: Option<Pos>,
    uses_weight: Option<Pos>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        let p = self.pos();
        Err(ParseError { line: p.line, column: p.column, message: message.into() })
    }

    fn error_at<T>(&self, pos: Pos, message: impl Into<String>) -> PResult<T> {
        Err(ParseError { line: pos.line, column: pos.column, message: message.into() })
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].tok.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(w) if w == k)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_keyword(&mut self, k: &str) -> bool {
        if self.is_keyword(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.error(format!("expected `{p}`, found {}", describe(self.peek())))
        }
    }

    fn expect_keyword(&mut self, k: &str) -> PResult<()> {
        if self.eat_keyword(k) {
            Ok(())
        } else {
            self.error(format!("expected `{k}`, found {}", describe(self.peek())))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(w) if !KEYWORDS.contains(&w.as_str()) => {
                self.bump();
                Ok(w)
            }
            other => self.error(format!("expected an identifier, found {}", describe(&other))),
        }
    }

    fn int(&mut self) -> PResult<i64> {
        let negative = self.eat_punct("-");
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(if negative { -n } else { n })
            }
            other => self.error(format!("expected an integer, found {}", describe(&other))),
        }
    }

    fn var(&mut self) -> PResult<usize> {
        let pos = self.pos();
        let name = self.ident()?;
        match self.var_index.get(&name) {
            Some(&i) => Ok(i),
            None => self.error_at(pos, format!("undeclared variable `{name}`")),
        }
    }

    fn program(&mut self) -> PResult<Program> {
        let mut labels: Option<Vec<String>> = None;
        let mut label_spec: Option<(Vec<usize>, Vec<(Vec<Option<i64>>, String, Pos)>)> = None;
        let mut init: HashMap<usize, i64> = HashMap::new();
        loop {
            if self.eat_keyword("var") {
                let pos = self.pos();
                let name = self.ident()?;
                self.expect_keyword("in")?;
                self.expect_punct("[")?;
                let lo = self.int()?;
                self.expect_punct(",")?;
                let hi = self.int()?;
                self.expect_punct("]")?;
                self.expect_punct(";")?;
                if lo > hi {
                    return self.error_at(pos, format!("empty range [{lo}, {hi}] for `{name}`"));
                }
                if self.var_index.insert(name.clone(), self.vars.len()).is_some() {
                    return self.error_at(pos, format!("variable `{name}` declared twice"));
                }
                self.vars.push(VarDecl { name, lo, hi });
            } else if self.eat_keyword("labels") {
                let mut syms = vec![self.ident()?];
                while self.eat_punct(",") {
                    syms.push(self.ident()?);
                }
                self.expect_punct(";")?;
                labels = Some(syms);
            } else if self.is_keyword("label") {
                self.bump();
                label_spec = Some(self.label_decl()?);
                self.eat_punct(";");
            } else if self.eat_keyword("init") {
                loop {
                    let v = self.var()?;
                    self.expect_punct("=")?;
                    init.insert(v, self.int()?);
                    if !self.eat_punct(",") {
                        break;
                    }
                }
                self.expect_punct(";")?;
            } else {
                break;
            }
        }
        let while_pos = self.pos();
        self.expect_keyword("while")?;
        self.expect_punct("(")?;
        let guard = self.bexpr()?;
        self.expect_punct(")")?;
        let body = self.block()?;
        self.eat_punct(";");
        if !matches!(self.peek(), Tok::Eof) {
            return self.error("trailing input after the loop");
        }

        let labels = match labels {
            Some(l) => l,
            None => return self.error_at(while_pos, "missing `labels` declaration"),
        };
        let (label_args, raw_cases) = match label_spec {
            Some(spec) => spec,
            None => return self.error_at(while_pos, "missing `label` declaration"),
        };
        let mut label_cases = Vec::new();
        for (pattern, sym, pos) in raw_cases {
            let symbol = match labels.iter().position(|l| *l == sym) {
                Some(i) => i,
                None => return self.error_at(pos, format!("label `{sym}` is not declared in `labels`")),
            };
            label_cases.push(LabelCase { pattern, symbol });
        }
        let mut init_vals = Vec::with_capacity(self.vars.len());
        for (i, v) in self.vars.iter().enumerate() {
            match init.get(&i) {
                Some(&x) if x < v.lo || x > v.hi => {
                    return self.error_at(
                        while_pos,
                        format!("initial value {x} of `{}` outside [{}, {}]", v.name, v.lo, v.hi),
                    )
                }
                Some(&x) => init_vals.push(x),
                None => return self.error_at(while_pos, format!("variable `{}` is not initialised", v.name)),
            }
        }
        let mode = match (self.uses_prob, self.uses_weight) {
            (Some(_), Some(_)) => unreachable!("mode conflict reported when detected"),
            (Some(_), None) => ProgramMode::Probabilistic,
            (None, Some(_)) => ProgramMode::Weighted,
            (None, None) => ProgramMode::Plain,
        };
        Ok(Program {
            vars: self.vars.clone(),
            labels,
            label_args,
            label_cases,
            init: init_vals,
            guard,
            body,
            mode,
        })
    }

    #[allow(clippy::type_complexity)]
    fn label_decl(&mut self) -> PResult<(Vec<usize>, Vec<(Vec<Option<i64>>, String, Pos)>)> {
        self.expect_punct("(")?;
        let mut args = vec![self.var()?];
        while self.eat_punct(",") {
            args.push(self.var()?);
        }
        self.expect_punct(")")?;
        self.expect_punct("{")?;
        let mut cases = Vec::new();
        while !self.is_punct("}") {
            let pos = self.pos();
            let pattern = if self.eat_ident_underscore() {
                vec![None; args.len()]
            } else {
                self.expect_punct("(")?;
                let mut elems = vec![self.pattern_elem()?];
                while self.eat_punct(",") {
                    elems.push(self.pattern_elem()?);
                }
                self.expect_punct(")")?;
                if elems.len() != args.len() {
                    return self.error_at(
                        pos,
                        format!("pattern has {} components, label takes {}", elems.len(), args.len()),
                    );
                }
                elems
            };
            self.expect_punct("=>")?;
            let sym_pos = self.pos();
            let sym = self.ident()?;
            cases.push((pattern, sym, sym_pos));
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct("}")?;
        Ok((args, cases))
    }

    fn eat_ident_underscore(&mut self) -> bool {
        if matches!(self.peek(), Tok::Ident(w) if w == "_") {
            self.bump();
            true
        } else {
            false
        }
    }

    fn pattern_elem(&mut self) -> PResult<Option<i64>> {
        if self.eat_ident_underscore() {
            Ok(None)
        } else {
            Ok(Some(self.int()?))
        }
    }

    fn block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect_punct("{")?;
        let mut stmts = Vec::new();
        while !self.is_punct("}") {
            if matches!(self.peek(), Tok::Eof) {
                return self.error("unterminated block");
            }
            stmts.push(self.stmt()?);
        }
        self.expect_punct("}")?;
        Ok(stmts)
    }

    fn note_prob(&mut self, pos: Pos) -> PResult<()> {
        if let Some(w) = self.uses_weight {
            return self.error_at(pos, format!("mode conflict: probabilistic choice mixed with weighted constructs (at {w})"));
        }
        self.uses_prob.get_or_insert(pos);
        Ok(())
    }

    fn note_weight(&mut self, pos: Pos) -> PResult<()> {
        if let Some(p) = self.uses_prob {
            return self.error_at(pos, format!("mode conflict: weighted construct mixed with probabilistic choice (at {p})"));
        }
        self.uses_weight.get_or_insert(pos);
        Ok(())
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let pos = self.pos();
        if self.eat_keyword("skip") {
            self.expect_punct(";")?;
            return Ok(Stmt::Skip);
        }
        if self.eat_keyword("fail") {
            self.note_weight(pos)?;
            self.expect_punct(";")?;
            return Ok(Stmt::Fail);
        }
        if self.eat_keyword("add") {
            self.note_weight(pos)?;
            self.expect_punct("(")?;
            let w = self.int()?;
            if w < 0 {
                return self.error_at(pos, "weights must be natural numbers");
            }
            self.expect_punct(")")?;
            let body = if self.eat_punct(";") { Vec::new() } else { self.block()? };
            return Ok(Stmt::Add { weight: w as u64, body });
        }
        if self.eat_keyword("if") {
            return self.if_rest();
        }
        if self.is_punct("{") {
            let first = self.block()?;
            return self.choice_rest(first);
        }
        let var = self.var()?;
        if !(self.eat_punct("<-") || self.eat_punct(":=")) {
            return self.error(format!("expected `<-` or `:=`, found {}", describe(self.peek())));
        }
        let expr = self.aexpr()?;
        self.expect_punct(";")?;
        Ok(Stmt::Assign { var, expr, pos })
    }

    fn if_rest(&mut self) -> PResult<Stmt> {
        self.expect_punct("(")?;
        let cond = self.bexpr()?;
        self.expect_punct(")")?;
        let then = self.block()?;
        let otherwise = if self.eat_keyword("else") {
            if self.eat_keyword("if") {
                vec![self.if_rest()?]
            } else {
                self.block()?
            }
        } else {
            Vec::new()
        };
        Ok(Stmt::If { cond, then, otherwise })
    }

    fn choice_rest(&mut self, first: Vec<Stmt>) -> PResult<Stmt> {
        if self.is_punct("[") && matches!(self.peek_at(1), Tok::Punct("]")) {
            let pos = self.pos();
            self.note_weight(pos)?;
            let mut branches = vec![first];
            while self.is_punct("[") && matches!(self.peek_at(1), Tok::Punct("]")) {
                self.bump();
                self.bump();
                branches.push(self.block()?);
            }
            self.eat_punct(";");
            return Ok(Stmt::Nondet { branches });
        }
        if self.is_punct("[") {
            let pos = self.pos();
            self.note_prob(pos)?;
            let mut branches = vec![first];
            let mut probs = Vec::new();
            let mut total = Rational::zero();
            while self.is_punct("[") {
                let ppos = self.pos();
                self.bump();
                let p = self.probability()?;
                if p < Rational::zero() || p > Rational::one() {
                    return self.error_at(ppos, format!("probability out of range: {p}"));
                }
                self.expect_punct("]")?;
                total += &p;
                if total > Rational::one() {
                    return self.error_at(ppos, "probability out of range: branch probabilities exceed 1");
                }
                probs.push(p);
                branches.push(self.block()?);
            }
            self.eat_punct(";");
            return Ok(Stmt::Prob { branches, probs });
        }
        self.eat_punct(";");
        Ok(Stmt::Block(first))
    }

    fn probability(&mut self) -> PResult<Rational> {
        let pos = self.pos();
        let text = match self.bump() {
            Tok::Int(n) => {
                if self.eat_punct("/") {
                    match self.bump() {
                        Tok::Int(d) => format!("{n}/{d}"),
                        other => return self.error_at(pos, format!("expected a denominator, found {}", describe(&other))),
                    }
                } else {
                    n.to_string()
                }
            }
            Tok::Decimal(d) => d,
            other => return self.error_at(pos, format!("expected a probability literal, found {}", describe(&other))),
        };
        match parse_rational(&text) {
            Ok(p) => Ok(p),
            Err(_) => self.error_at(pos, format!("malformed probability `{text}`")),
        }
    }

    fn aexpr(&mut self) -> PResult<AExpr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat_punct("+") {
                lhs = AExpr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat_punct("-") {
                lhs = AExpr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> PResult<AExpr> {
        let mut lhs = self.factor()?;
        while self.eat_punct("*") {
            lhs = AExpr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> PResult<AExpr> {
        if self.eat_punct("-") {
            return Ok(AExpr::Neg(Box::new(self.factor()?)));
        }
        if self.eat_punct("(") {
            let e = self.aexpr()?;
            self.expect_punct(")")?;
            return Ok(e);
        }
        for (kw, is_max) in [("max", true), ("min", false)] {
            if self.eat_keyword(kw) {
                self.expect_punct("(")?;
                let a = self.aexpr()?;
                self.expect_punct(",")?;
                let b = self.aexpr()?;
                self.expect_punct(")")?;
                return Ok(if is_max { AExpr::Max(Box::new(a), Box::new(b)) } else { AExpr::Min(Box::new(a), Box::new(b)) });
            }
        }
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(AExpr::Int(n))
            }
            Tok::Ident(_) => Ok(AExpr::Var(self.var()?)),
            other => self.error(format!("expected an expression, found {}", describe(&other))),
        }
    }

    fn bexpr(&mut self) -> PResult<BExpr> {
        let mut lhs = self.bterm()?;
        while self.eat_keyword("or") || self.eat_punct("||") {
            lhs = BExpr::Or(Box::new(lhs), Box::new(self.bterm()?));
        }
        Ok(lhs)
    }

    fn bterm(&mut self) -> PResult<BExpr> {
        let mut lhs = self.bfactor()?;
        while self.eat_keyword("and") || self.eat_punct("&&") {
            lhs = BExpr::And(Box::new(lhs), Box::new(self.bfactor()?));
        }
        Ok(lhs)
    }

    fn bfactor(&mut self) -> PResult<BExpr> {
        if self.eat_keyword("not") || self.eat_punct("!") {
            return Ok(BExpr::Not(Box::new(self.bfactor()?)));
        }
        if self.eat_keyword("true") {
            return Ok(BExpr::Const(true));
        }
        if self.eat_keyword("false") {
            return Ok(BExpr::Const(false));
        }
        if self.is_punct("(") {
            let save = self.at;
            self.bump();
            if let Ok(b) = self.bexpr() {
                if self.eat_punct(")") {
                    return Ok(b);
                }
            }
            self.at = save;
        }
        let lhs = self.aexpr()?;
        let op = match self.peek() {
            Tok::Punct("==") => RelOp::Eq,
            Tok::Punct("!=") => RelOp::Ne,
            Tok::Punct("<") => RelOp::Lt,
            Tok::Punct("<=") => RelOp::Le,
            Tok::Punct(">") => RelOp::Gt,
            Tok::Punct(">=") => RelOp::Ge,
            other => return self.error(format!("expected a comparison operator, found {}", describe(other))),
        };
        self.bump();
        let rhs = self.aexpr()?;
        Ok(BExpr::Cmp(op, lhs, rhs))
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(w) => format!("`{w}`"),
        Tok::Int(n) => format!("`{n}`"),
        Tok::Decimal(d) => format!("`{d}`"),
        Tok::Punct(p) => format!("`{p}`"),
        Tok::Eof => "end of input".to_string(),
    }
}

pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, vars: Vec::new(), var_index: HashMap::new(), uses_prob: None, uses_weight: None };
    p.program()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fig2_program_declares_the_grid() {
        let p = parse_program(fixtures::source("fig2-grid").unwrap()).unwrap();
        assert_eq!(p.vars, vec![
            VarDecl { name: "i".into(), lo: 1, hi: 5 },
            VarDecl { name: "j".into(), lo: 1, hi: 3 },
        ]);
        assert_eq!(p.init, vec![5, 3]);
        assert_eq!(p.mode, ProgramMode::Probabilistic);
    }

    #[test]
    fn probability_above_one_is_rejected() {
        let text = "var i in [0,1]; labels a; label (i) { _ => a }; init i = 0;
            while (i < 1) { { i <- 1; } [5/4] { skip; } }";
        let e = parse_program(text).unwrap_err();
        assert!(e.message.starts_with("probability out of range"), "{e}");
        assert_eq!((e.line, e.column), (2, 41));
    }

    #[test]
    fn mixing_modes_is_a_conflict() {
        let text = "var i in [0,1]; labels a; label (i) { _ => a }; init i = 0;
            while (i < 1) { add(2) { i <- 1; } { i <- 1; } [1/2] { skip; } }";
        let e = parse_program(text).unwrap_err();
        assert!(e.message.starts_with("mode conflict"), "{e}");
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_program("var i in [0, 1]\nlabels a;").unwrap_err();
        assert_eq!((e.line, e.column), (2, 1));
        let e = parse_program("var i in [0,1]; labels a; label (i) { _ => a }; init i = 0; while (k > 0) { skip; }")
            .unwrap_err();
        assert!(e.message.contains("undeclared variable `k`"));
        assert!(parse_program("var i in [0,1]; @").is_err());
    }

    #[test]
    fn parenthesised_arithmetic_in_conditions() {
        let text = "var i in [0,3]; labels a; label (i) { _ => a }; init i = 0;
            while ((i + 1) * 2 < 6 and (i >= 0 or false)) { i <- i + 1; }";
        let p = parse_program(text).unwrap();
        assert!(matches!(p.guard, BExpr::And(_, _)));
        assert_eq!(p.mode, ProgramMode::Plain);
    }
}
