//! The expression language used by guards and updates.
//!
//! Guards are conjunctions of comparisons (`counter < 10 && p == "x"`).
//! Updates are concurrent assignments (`counter := counter + 1; code := code + p`):
//! every right-hand side reads the values from *before* the update. Arithmetic
//! is integer-only (`+`, `*`, `/` with truncation toward zero); `+` doubles as
//! string concatenation. The identifier `p` always refers to the parameter of
//! the input being processed.
//!
//! The grammar is small enough that a hand-rolled recursive-descent parser is
//! clearer than a parser generator; `Display` renders the canonical form the
//! parser accepts, and `parse(render(x)) == x` holds for every AST.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// A runtime value: machines carry int and string variables only.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Int(i64),
    Str(String),
}

impl Value {
    pub fn kind(&self) -> VarKind {
        match self {
            Value::Int(_) => VarKind::Int,
            Value::Str(_) => VarKind::Str,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Str(s) => write!(f, "{}", quote(s)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    Int,
    Str,
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarKind::Int => write!(f, "int"),
            VarKind::Str => write!(f, "string"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Lit(Value),
    /// A declared variable.
    Var(String),
    /// The parameter of the input being processed (`p` in source form).
    Param,
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl CmpOp {
    fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }

    /// Ordered comparisons apply to ints only; equality applies to any
    /// matching pair of kinds.
    pub fn is_ordered(self) -> bool {
        !matches!(self, CmpOp::Eq | CmpOp::Ne)
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Comparison {
    pub lhs: Expr,
    pub op: CmpOp,
    pub rhs: Expr,
}

/// A conjunction of comparisons. A transition with no guard is always enabled;
/// that case is represented as `Option<Guard>::None` on the transition, so a
/// `Guard` here always has at least one clause.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Guard {
    pub clauses: Vec<Comparison>,
}

/// Concurrent assignments, applied as a single step: all right-hand sides are
/// evaluated against the pre-update environment, then all writes land.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Update {
    pub assignments: Vec<(String, Expr)>,
}

pub type Env = BTreeMap<String, Value>;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("unknown variable {0:?}")]
    UnknownVar(String),
    #[error("expression references p but the input carries no parameter")]
    NoParam,
    #[error("operator {op} needs {want}, got {got}")]
    KindMismatch {
        op: &'static str,
        want: &'static str,
        got: String,
    },
    #[error("division by zero")]
    DivideByZero,
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
}

impl Expr {
    pub fn eval(&self, env: &Env, param: Option<&Value>) -> Result<Value, EvalError> {
        match self {
            Expr::Lit(v) => Ok(v.clone()),
            Expr::Var(name) => env
                .get(name)
                .cloned()
                .ok_or_else(|| EvalError::UnknownVar(name.clone())),
            Expr::Param => param.cloned().ok_or(EvalError::NoParam),
            Expr::Add(a, b) => match (a.eval(env, param)?, b.eval(env, param)?) {
                (Value::Int(x), Value::Int(y)) => x
                    .checked_add(y)
                    .map(Value::Int)
                    .ok_or(EvalError::Overflow("+")),
                (Value::Str(mut x), Value::Str(y)) => {
                    x.push_str(&y);
                    Ok(Value::Str(x))
                }
                (x, y) => Err(EvalError::KindMismatch {
                    op: "+",
                    want: "two ints or two strings",
                    got: format!("{} and {}", x.kind(), y.kind()),
                }),
            },
            Expr::Mul(a, b) => int_op(a, b, env, param, "*", |x, y| {
                x.checked_mul(y).ok_or(EvalError::Overflow("*"))
            }),
            Expr::Div(a, b) => int_op(a, b, env, param, "/", |x, y| {
                if y == 0 {
                    Err(EvalError::DivideByZero)
                } else {
                    // i64 division truncates toward zero, which is the
                    // contract for scaled fractional constants.
                    Ok(x / y)
                }
            }),
        }
    }
}

fn int_op(
    a: &Expr,
    b: &Expr,
    env: &Env,
    param: Option<&Value>,
    op: &'static str,
    f: impl Fn(i64, i64) -> Result<i64, EvalError>,
) -> Result<Value, EvalError> {
    match (a.eval(env, param)?, b.eval(env, param)?) {
        (Value::Int(x), Value::Int(y)) => f(x, y).map(Value::Int),
        (x, y) => Err(EvalError::KindMismatch {
            op,
            want: "two ints",
            got: format!("{} and {}", x.kind(), y.kind()),
        }),
    }
}

impl Comparison {
    pub fn eval(&self, env: &Env, param: Option<&Value>) -> Result<bool, EvalError> {
        let l = self.lhs.eval(env, param)?;
        let r = self.rhs.eval(env, param)?;
        match (&l, &r) {
            (Value::Int(x), Value::Int(y)) => Ok(cmp_ord(self.op, x.cmp(y))),
            (Value::Str(x), Value::Str(y)) if !self.op.is_ordered() => {
                Ok(cmp_ord(self.op, x.cmp(y)))
            }
            _ => Err(EvalError::KindMismatch {
                op: self.op.symbol(),
                want: if self.op.is_ordered() {
                    "two ints"
                } else {
                    "two values of one kind"
                },
                got: format!("{} and {}", l.kind(), r.kind()),
            }),
        }
    }
}

fn cmp_ord(op: CmpOp, ord: std::cmp::Ordering) -> bool {
    use std::cmp::Ordering::*;
    match op {
        CmpOp::Lt => ord == Less,
        CmpOp::Le => ord != Greater,
        CmpOp::Eq => ord == Equal,
        CmpOp::Ne => ord != Equal,
        CmpOp::Ge => ord != Less,
        CmpOp::Gt => ord == Greater,
    }
}

impl Guard {
    pub fn eval(&self, env: &Env, param: Option<&Value>) -> Result<bool, EvalError> {
        for c in &self.clauses {
            if !c.eval(env, param)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// True when the guard uses neither variables nor the parameter, so its
    /// value is fixed at parse time. Used by static overlap detection.
    pub fn is_constant(&self) -> bool {
        fn expr_const(e: &Expr) -> bool {
            match e {
                Expr::Lit(_) => true,
                Expr::Var(_) | Expr::Param => false,
                Expr::Add(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                    expr_const(a) && expr_const(b)
                }
            }
        }
        self.clauses
            .iter()
            .all(|c| expr_const(&c.lhs) && expr_const(&c.rhs))
    }
}

impl Update {
    pub fn apply(&self, env: &Env, param: Option<&Value>) -> Result<Env, EvalError> {
        // Snapshot semantics: evaluate every RHS first, then write.
        let mut staged = Vec::with_capacity(self.assignments.len());
        for (name, rhs) in &self.assignments {
            staged.push((name.clone(), rhs.eval(env, param)?));
        }
        let mut next = env.clone();
        for (name, value) in staged {
            next.insert(name, value);
        }
        Ok(next)
    }
}

// ---------------------------------------------------------------------------
// Static typing, used by machine validation and document lowering.

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TypeError {
    #[error("unknown variable {0:?}")]
    UnknownVar(String),
    #[error("p is referenced but the input declares no parameter")]
    NoParamDeclared,
    #[error("operator {op} needs {want}, got {lhs} and {rhs}")]
    Mismatch {
        op: &'static str,
        want: &'static str,
        lhs: VarKind,
        rhs: VarKind,
    },
    #[error("assignment to {var:?} expects {want}, expression has kind {got}")]
    AssignKind {
        var: String,
        want: VarKind,
        got: VarKind,
    },
    #[error("variable {0:?} is assigned twice in one update")]
    DuplicateTarget(String),
}

/// Declared kinds visible to an expression: the machine's variables plus the
/// parameter kind of the input the expression is attached to.
pub struct ExprCtx<'a> {
    pub vars: &'a BTreeMap<String, VarKind>,
    pub param: Option<VarKind>,
}

pub fn expr_kind(e: &Expr, ctx: &ExprCtx<'_>) -> Result<VarKind, TypeError> {
    match e {
        Expr::Lit(v) => Ok(v.kind()),
        Expr::Var(name) => ctx
            .vars
            .get(name)
            .copied()
            .ok_or_else(|| TypeError::UnknownVar(name.clone())),
        Expr::Param => ctx.param.ok_or(TypeError::NoParamDeclared),
        Expr::Add(a, b) => {
            let (l, r) = (expr_kind(a, ctx)?, expr_kind(b, ctx)?);
            if l == r {
                Ok(l)
            } else {
                Err(TypeError::Mismatch {
                    op: "+",
                    want: "matching kinds",
                    lhs: l,
                    rhs: r,
                })
            }
        }
        Expr::Mul(a, b) | Expr::Div(a, b) => {
            let op = if matches!(e, Expr::Mul(..)) { "*" } else { "/" };
            let (l, r) = (expr_kind(a, ctx)?, expr_kind(b, ctx)?);
            if l == VarKind::Int && r == VarKind::Int {
                Ok(VarKind::Int)
            } else {
                Err(TypeError::Mismatch {
                    op,
                    want: "two ints",
                    lhs: l,
                    rhs: r,
                })
            }
        }
    }
}

pub fn check_guard(g: &Guard, ctx: &ExprCtx<'_>) -> Result<(), TypeError> {
    for c in &g.clauses {
        let (l, r) = (expr_kind(&c.lhs, ctx)?, expr_kind(&c.rhs, ctx)?);
        let ok = if c.op.is_ordered() {
            l == VarKind::Int && r == VarKind::Int
        } else {
            l == r
        };
        if !ok {
            return Err(TypeError::Mismatch {
                op: c.op.symbol(),
                want: if c.op.is_ordered() {
                    "two ints"
                } else {
                    "matching kinds"
                },
                lhs: l,
                rhs: r,
            });
        }
    }
    Ok(())
}

pub fn check_update(u: &Update, ctx: &ExprCtx<'_>) -> Result<(), TypeError> {
    let mut seen = std::collections::BTreeSet::new();
    for (name, rhs) in &u.assignments {
        if !seen.insert(name.clone()) {
            return Err(TypeError::DuplicateTarget(name.clone()));
        }
        let want = *ctx
            .vars
            .get(name)
            .ok_or_else(|| TypeError::UnknownVar(name.clone()))?;
        let got = expr_kind(rhs, ctx)?;
        if want != got {
            return Err(TypeError::AssignKind {
                var: name.clone(),
                want,
                got,
            });
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Canonical rendering. Parenthesization is minimal: parentheses appear only
// where re-parsing would otherwise regroup (right-nested chains).

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        _ => 3,
    }
}

fn render(e: &Expr, out: &mut String, parent: u8, right: bool) {
    let mine = prec(e);
    let wrap = mine < parent || (mine == parent && right && mine < 3);
    if wrap {
        out.push('(');
    }
    match e {
        Expr::Lit(v) => out.push_str(&v.to_string()),
        Expr::Var(name) => out.push_str(name),
        Expr::Param => out.push('p'),
        Expr::Add(a, b) => {
            render(a, out, mine, false);
            out.push_str(" + ");
            render(b, out, mine, true);
        }
        Expr::Mul(a, b) => {
            render(a, out, mine, false);
            out.push_str(" * ");
            render(b, out, mine, true);
        }
        Expr::Div(a, b) => {
            render(a, out, mine, false);
            out.push_str(" / ");
            render(b, out, mine, true);
        }
    }
    if wrap {
        out.push(')');
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        render(self, &mut s, 0, false);
        write!(f, "{s}")
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.op, self.rhs)
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.clauses.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(" && "))
    }
}

impl fmt::Display for Update {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .assignments
            .iter()
            .map(|(name, rhs)| format!("{name} := {rhs}"))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            other => out.push(other),
        }
    }
    out.push('"');
    out
}

// ---------------------------------------------------------------------------
// Parsing.

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(i64),
    Str(String),
    Ident(String),
    Cmp(CmpOp),
    Plus,
    Star,
    Slash,
    LParen,
    RParen,
    Semi,
    Assign,
    And,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn err(&self, at: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            offset: at,
            message: message.into(),
        }
    }

    fn tokens(mut self) -> Result<Vec<(usize, Tok)>, ParseError> {
        let mut out = Vec::new();
        while self.pos < self.src.len() {
            let at = self.pos;
            let b = self.src[self.pos];
            match b {
                b' ' | b'\t' => {
                    self.pos += 1;
                }
                b'(' => {
                    self.pos += 1;
                    out.push((at, Tok::LParen));
                }
                b')' => {
                    self.pos += 1;
                    out.push((at, Tok::RParen));
                }
                b';' => {
                    self.pos += 1;
                    out.push((at, Tok::Semi));
                }
                b'+' => {
                    self.pos += 1;
                    out.push((at, Tok::Plus));
                }
                b'*' => {
                    self.pos += 1;
                    out.push((at, Tok::Star));
                }
                b'/' => {
                    self.pos += 1;
                    out.push((at, Tok::Slash));
                }
                b'&' => {
                    if self.src.get(self.pos + 1) == Some(&b'&') {
                        self.pos += 2;
                        out.push((at, Tok::And));
                    } else {
                        return Err(self.err(at, "expected &&"));
                    }
                }
                b':' => {
                    if self.src.get(self.pos + 1) == Some(&b'=') {
                        self.pos += 2;
                        out.push((at, Tok::Assign));
                    } else {
                        return Err(self.err(at, "expected :="));
                    }
                }
                b'<' | b'>' | b'=' | b'!' => {
                    let two = self.src.get(self.pos + 1) == Some(&b'=');
                    let op = match (b, two) {
                        (b'<', true) => CmpOp::Le,
                        (b'<', false) => CmpOp::Lt,
                        (b'>', true) => CmpOp::Ge,
                        (b'>', false) => CmpOp::Gt,
                        (b'=', true) => CmpOp::Eq,
                        (b'!', true) => CmpOp::Ne,
                        _ => return Err(self.err(at, "expected comparison operator")),
                    };
                    self.pos += if two { 2 } else { 1 };
                    out.push((at, Tok::Cmp(op)));
                }
                b'"' => {
                    self.pos += 1;
                    let mut s = String::new();
                    loop {
                        match self.src.get(self.pos) {
                            None => return Err(self.err(at, "unterminated string literal")),
                            Some(b'"') => {
                                self.pos += 1;
                                break;
                            }
                            Some(b'\\') => {
                                match self.src.get(self.pos + 1) {
                                    Some(b'"') => s.push('"'),
                                    Some(b'\\') => s.push('\\'),
                                    _ => {
                                        return Err(
                                            self.err(self.pos, "unknown escape (only \\\\ and \\\")")
                                        )
                                    }
                                }
                                self.pos += 2;
                            }
                            Some(_) => {
                                // Consume one UTF-8 scalar, not one byte.
                                let rest = std::str::from_utf8(&self.src[self.pos..])
                                    .map_err(|_| self.err(self.pos, "invalid utf-8"))?;
                                let ch = rest.chars().next().unwrap();
                                s.push(ch);
                                self.pos += ch.len_utf8();
                            }
                        }
                    }
                    out.push((at, Tok::Str(s)));
                }
                b'-' | b'0'..=b'9' => {
                    let start = self.pos;
                    self.pos += 1;
                    while self
                        .src
                        .get(self.pos)
                        .map(|c| c.is_ascii_digit())
                        .unwrap_or(false)
                    {
                        self.pos += 1;
                    }
                    let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    if text == "-" {
                        return Err(self.err(at, "expected digits after -"));
                    }
                    let n: i64 = text
                        .parse()
                        .map_err(|_| self.err(at, format!("integer out of range: {text}")))?;
                    out.push((at, Tok::Int(n)));
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let start = self.pos;
                    while self
                        .src
                        .get(self.pos)
                        .map(|c| c.is_ascii_alphanumeric() || *c == b'_')
                        .unwrap_or(false)
                    {
                        self.pos += 1;
                    }
                    let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    out.push((at, Tok::Ident(text.to_string())));
                }
                other => {
                    return Err(self.err(at, format!("unexpected byte {:?}", other as char)));
                }
            }
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self, ParseError> {
        let toks = Lexer::new(src).tokens()?;
        Ok(Parser {
            toks,
            pos: 0,
            end: src.len(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            offset: self.offset(),
            message: message.into(),
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.bump() {
            Some(Tok::Int(n)) => Ok(Expr::Lit(Value::Int(n))),
            Some(Tok::Str(s)) => Ok(Expr::Lit(Value::Str(s))),
            Some(Tok::Ident(name)) => {
                if name == "p" {
                    Ok(Expr::Param)
                } else {
                    Ok(Expr::Var(name))
                }
            }
            Some(Tok::LParen) => {
                let e = self.sum()?;
                self.expect(Tok::RParen, ")")?;
                Ok(e)
            }
            _ => {
                self.pos = self.pos.saturating_sub(0);
                Err(self.err("expected a value, variable, p, or ("))
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.atom()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    e = Expr::Mul(Box::new(e), Box::new(self.atom()?));
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    e = Expr::Div(Box::new(e), Box::new(self.atom()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.term()?;
        while self.peek() == Some(&Tok::Plus) {
            self.pos += 1;
            e = Expr::Add(Box::new(e), Box::new(self.term()?));
        }
        Ok(e)
    }

    fn comparison(&mut self) -> Result<Comparison, ParseError> {
        let lhs = self.sum()?;
        let op = match self.bump() {
            Some(Tok::Cmp(op)) => op,
            _ => return Err(self.err("expected comparison operator")),
        };
        let rhs = self.sum()?;
        Ok(Comparison { lhs, op, rhs })
    }

    fn done(&self) -> bool {
        self.pos == self.toks.len()
    }
}

/// Parse a guard: one or more comparisons joined by `&&`.
pub fn parse_guard(src: &str) -> Result<Guard, ParseError> {
    let mut p = Parser::new(src)?;
    let mut clauses = vec![p.comparison()?];
    while p.peek() == Some(&Tok::And) {
        p.pos += 1;
        clauses.push(p.comparison()?);
    }
    if !p.done() {
        return Err(p.err("trailing input after guard"));
    }
    Ok(Guard { clauses })
}

/// Parse an update: one or more `var := expr` joined by `;`.
pub fn parse_update(src: &str) -> Result<Update, ParseError> {
    let mut p = Parser::new(src)?;
    let mut assignments = Vec::new();
    loop {
        let name = match p.bump() {
            Some(Tok::Ident(name)) if name != "p" => name,
            Some(Tok::Ident(_)) => return Err(p.err("cannot assign to the parameter p")),
            _ => return Err(p.err("expected a variable name")),
        };
        p.expect(Tok::Assign, ":=")?;
        assignments.push((name, p.sum()?));
        if p.peek() == Some(&Tok::Semi) {
            p.pos += 1;
        } else {
            break;
        }
    }
    if !p.done() {
        return Err(p.err("trailing input after update"));
    }
    Ok(Update { assignments })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(pairs: &[(&str, Value)]) -> Env {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect()
    }

    #[test]
    fn parses_the_counter_guard() {
        let g = parse_guard("counter < 10").unwrap();
        assert_eq!(g.clauses.len(), 1);
        assert_eq!(g.to_string(), "counter < 10");
        let e = env(&[("counter", Value::Int(9))]);
        assert!(g.eval(&e, None).unwrap());
        let e = env(&[("counter", Value::Int(10))]);
        assert!(!g.eval(&e, None).unwrap());
    }

    #[test]
    fn concurrent_update_reads_pre_state() {
        // The classic swap: both right-hand sides see the old values.
        let u = parse_update("x := y; y := x").unwrap();
        let e = env(&[("x", Value::Int(1)), ("y", Value::Int(2))]);
        let out = u.apply(&e, None).unwrap();
        assert_eq!(out["x"], Value::Int(2));
        assert_eq!(out["y"], Value::Int(1));
    }

    #[test]
    fn counter_and_code_update() {
        let u = parse_update("counter := counter + 1; code := code + p").unwrap();
        let e = env(&[
            ("counter", Value::Int(0)),
            ("code", Value::Str(String::new())),
        ]);
        let one = u.apply(&e, Some(&Value::Str("B".into()))).unwrap();
        assert_eq!(one["counter"], Value::Int(1));
        assert_eq!(one["code"], Value::Str("B".into()));
        let two = u.apply(&one, Some(&Value::Str("A".into()))).unwrap();
        assert_eq!(two["counter"], Value::Int(2));
        assert_eq!(two["code"], Value::Str("BA".into()));
    }

    #[test]
    fn scaled_division_truncates_toward_zero() {
        let u = parse_update("distance := p * 34 / 2000").unwrap();
        let e = env(&[("distance", Value::Int(0))]);
        // 100 * 34 = 3400; 3400 / 2000 = 1 (exact real value 1.7)
        let out = u.apply(&e, Some(&Value::Int(100))).unwrap();
        assert_eq!(out["distance"], Value::Int(1));
        // 1000 * 34 / 2000 = 17 exactly
        let out = u.apply(&e, Some(&Value::Int(1000))).unwrap();
        assert_eq!(out["distance"], Value::Int(17));
        // 58 * 34 = 1972 -> 0
        let out = u.apply(&e, Some(&Value::Int(58))).unwrap();
        assert_eq!(out["distance"], Value::Int(0));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let u = parse_update("x := 1 / 0").unwrap();
        let e = env(&[("x", Value::Int(0))]);
        assert_eq!(u.apply(&e, None).unwrap_err(), EvalError::DivideByZero);
    }

    #[test]
    fn precedence_and_grouping() {
        let u = parse_update("x := 2 + 3 * 4").unwrap();
        let e = env(&[("x", Value::Int(0))]);
        assert_eq!(u.apply(&e, None).unwrap()["x"], Value::Int(14));
        let u = parse_update("x := (2 + 3) * 4").unwrap();
        assert_eq!(u.apply(&e, None).unwrap()["x"], Value::Int(20));
    }

    #[test]
    fn display_round_trips_right_nested_trees() {
        // Hand-built right-nested tree must render with parens and re-parse
        // to the same tree.
        let tree = Expr::Add(
            Box::new(Expr::Var("a".into())),
            Box::new(Expr::Add(
                Box::new(Expr::Var("b".into())),
                Box::new(Expr::Var("c".into())),
            )),
        );
        let text = tree.to_string();
        assert_eq!(text, "a + (b + c)");
        let u = parse_update(&format!("x := {text}")).unwrap();
        assert_eq!(u.assignments[0].1, tree);

        let flat = parse_update("x := a + b + c").unwrap();
        assert_eq!(flat.assignments[0].1.to_string(), "a + b + c");
    }

    #[test]
    fn string_literals_escape_and_round_trip() {
        let g = parse_guard(r#"p == "a\"b\\c""#).unwrap();
        assert_eq!(g.to_string(), r#"p == "a\"b\\c""#);
        let again = parse_guard(&g.to_string()).unwrap();
        assert_eq!(g, again);
        assert!(g
            .eval(&Env::new(), Some(&Value::Str("a\"b\\c".into())))
            .unwrap());
    }

    #[test]
    fn ordered_comparison_on_strings_is_rejected_statically() {
        let g = parse_guard("code < \"x\"").unwrap();
        let vars: BTreeMap<String, VarKind> = [("code".to_string(), VarKind::Str)].into();
        let ctx = ExprCtx {
            vars: &vars,
            param: None,
        };
        assert!(matches!(
            check_guard(&g, &ctx),
            Err(TypeError::Mismatch { op: "<", .. })
        ));
    }

    #[test]
    fn duplicate_update_target_is_rejected() {
        let u = parse_update("x := 1; x := 2").unwrap();
        let vars: BTreeMap<String, VarKind> = [("x".to_string(), VarKind::Int)].into();
        let ctx = ExprCtx {
            vars: &vars,
            param: None,
        };
        assert_eq!(
            check_update(&u, &ctx),
            Err(TypeError::DuplicateTarget("x".into()))
        );
    }

    #[test]
    fn parse_errors_carry_offsets() {
        let err = parse_guard("counter <").unwrap_err();
        assert_eq!(err.offset, 9);
        let err = parse_guard("counter ! 3").unwrap_err();
        assert_eq!(err.offset, 8);
        let err = parse_update("x = 3").unwrap_err();
        assert_eq!(err.offset, 2);
    }

    #[test]
    fn negative_literals_parse() {
        let g = parse_guard("x >= -1").unwrap();
        let e = env(&[("x", Value::Int(0))]);
        assert!(g.eval(&e, None).unwrap());
        assert_eq!(g.to_string(), "x >= -1");
    }
}
