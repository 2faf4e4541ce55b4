//! Restricted arithmetic expressions for operators, kernels and coefficients.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | primary
//! primary := number | var | func '(' expr (',' expr)* ')' | '(' expr ')'
//! var     := t | s | x | x1 … xn | u1 … u4
//! func    := exp | sin | cos | abs | min | max
//! ```
//!
//! `u1 … u4` are independent uniforms in `[0, 1)` drawn from the outcome ω,
//! which is how a problem file expresses randomness.

use std::fmt;

use randfix_core::OmegaSample;

pub const N_UNIFORMS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprError {
    pub source: String,
    pub message: String,
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "in expression {:?}: {}", self.source, self.message)
    }
}

impl std::error::Error for ExprError {}

/// Which variables an expression may mention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// Component of an operator on ℝⁿ: `x1 … xn` (and `x` when `n = 1`), `u`.
    Operator { dim: usize },
    /// `k(t, s; ω)`
    Kernel,
    /// `h(t; ω)`
    FreeTerm,
    /// `f(t, x)`, deterministic.
    Nonlinearity,
    /// A coefficient depending on ω only.
    Coefficient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Var {
    T,
    S,
    X(usize),
    U(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Func {
    Exp,
    Sin,
    Cos,
    Abs,
    Min,
    Max,
}

impl Func {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "abs" => Func::Abs,
            "min" => Func::Min,
            "max" => Func::Max,
            _ => return None,
        })
    }

    fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Var(Var),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

/// Values bound to the variables during evaluation.
#[derive(Debug, Clone, Copy)]
pub struct Env<'a> {
    pub t: f64,
    pub s: f64,
    pub x: &'a [f64],
    pub u: [f64; N_UNIFORMS],
}

impl<'a> Env<'a> {
    pub fn new(omega: Option<&OmegaSample>) -> Self {
        Self {
            t: 0.0,
            s: 0.0,
            x: &[],
            u: uniforms(omega),
        }
    }
}

/// `u1 … u4` at `omega`; zeros when there is no outcome.
pub fn uniforms(omega: Option<&OmegaSample>) -> [f64; N_UNIFORMS] {
    let mut u = [0.0; N_UNIFORMS];
    if let Some(w) = omega {
        for (i, v) in u.iter_mut().enumerate() {
            *v = w.uniform(i as u64 + 1);
        }
    }
    u
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    source: String,
    root: Node,
    uses_omega: bool,
}

impl Expr {
    pub fn parse(source: &str, scope: Scope) -> Result<Self, ExprError> {
        let err = |message: String| ExprError {
            source: source.to_string(),
            message,
        };
        let tokens = tokenize(source).map_err(err)?;
        let mut p = Parser {
            tokens: &tokens,
            pos: 0,
            scope,
        };
        let root = p.expr().map_err(err)?;
        if p.pos != tokens.len() {
            return Err(err(format!("unexpected {}", tokens[p.pos])));
        }
        let uses_omega = uses_uniform(&root);
        Ok(Self {
            source: source.to_string(),
            root,
            uses_omega,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Whether the expression mentions any of `u1 … u4`.
    pub fn uses_omega(&self) -> bool {
        self.uses_omega
    }

    pub fn eval(&self, env: &Env<'_>) -> f64 {
        eval(&self.root, env)
    }

    /// Value when the expression has no variables, else `None`.
    pub fn constant(&self) -> Option<f64> {
        fn is_const(n: &Node) -> bool {
            match n {
                Node::Num(_) => true,
                Node::Var(_) => false,
                Node::Neg(a) => is_const(a),
                Node::Bin(_, a, b) => is_const(a) && is_const(b),
                Node::Call(_, args) => args.iter().all(is_const),
            }
        }
        is_const(&self.root).then(|| self.eval(&Env::new(None)))
    }
}

fn uses_uniform(n: &Node) -> bool {
    match n {
        Node::Var(Var::U(_)) => true,
        Node::Num(_) | Node::Var(_) => false,
        Node::Neg(a) => uses_uniform(a),
        Node::Bin(_, a, b) => uses_uniform(a) || uses_uniform(b),
        Node::Call(_, args) => args.iter().any(uses_uniform),
    }
}

fn eval(n: &Node, env: &Env<'_>) -> f64 {
    match n {
        Node::Num(v) => *v,
        Node::Var(Var::T) => env.t,
        Node::Var(Var::S) => env.s,
        Node::Var(Var::X(i)) => env.x.get(*i).copied().unwrap_or(f64::NAN),
        Node::Var(Var::U(i)) => env.u[*i],
        Node::Neg(a) => -eval(a, env),
        Node::Bin(op, a, b) => {
            let (a, b) = (eval(a, env), eval(b, env));
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
            }
        }
        Node::Call(f, args) => {
            let a = eval(&args[0], env);
            match f {
                Func::Exp => a.exp(),
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Abs => a.abs(),
                Func::Min => a.min(eval(&args[1], env)),
                Func::Max => a.max(eval(&args[1], env)),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Num(v) => write!(f, "number {v}"),
            Token::Ident(s) => write!(f, "identifier {s:?}"),
            Token::Op(c) => write!(f, "{c:?}"),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<Token>, String> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v: f64 = text.parse().map_err(|_| format!("bad number {text:?}"))?;
            out.push(Token::Num(v));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/(),".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(format!("unexpected character {c:?}"));
        }
    }
    if out.is_empty() {
        return Err("empty expression".into());
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    scope: Scope,
}

impl Parser<'_> {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Token::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expect(&mut self, c: char) -> Result<(), String> {
        if self.peek_op() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(match self.tokens.get(self.pos) {
                Some(t) => format!("expected {c:?}, found {t}"),
                None => format!("expected {c:?} at end of input"),
            })
        }
    }

    fn expr(&mut self) -> Result<Node, String> {
        let mut lhs = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, String> {
        let mut lhs = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, String> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Node, String> {
        let tok = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| "unexpected end of input".to_string())?;
        self.pos += 1;
        match tok {
            Token::Num(v) => Ok(Node::Num(v)),
            Token::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Token::Op(c) => Err(format!("unexpected {c:?}")),
            Token::Ident(name) => {
                if let Some(f) = Func::parse(&name) {
                    self.expect('(')?;
                    let mut args = vec![self.expr()?];
                    while self.peek_op() == Some(',') {
                        self.pos += 1;
                        args.push(self.expr()?);
                    }
                    self.expect(')')?;
                    if args.len() != f.arity() {
                        return Err(format!(
                            "{name} takes {} argument(s), got {}",
                            f.arity(),
                            args.len()
                        ));
                    }
                    return Ok(Node::Call(f, args));
                }
                self.variable(&name).map(Node::Var)
            }
        }
    }

    fn variable(&self, name: &str) -> Result<Var, String> {
        let var = match name {
            "t" => Var::T,
            "s" => Var::S,
            "x" => Var::X(0),
            _ => {
                let index = |rest: &str| rest.parse::<usize>().ok().filter(|&i| i >= 1);
                match (name.split_at(1), name.len() > 1) {
                    (("x", rest), true) => {
                        Var::X(index(rest).ok_or_else(|| format!("unknown variable {name:?}"))? - 1)
                    }
                    (("u", rest), true) => {
                        let i = index(rest).filter(|&i| i <= N_UNIFORMS);
                        Var::U(
                            i.ok_or_else(|| {
                                format!("unknown variable {name:?}; uniforms are u1..u{N_UNIFORMS}")
                            })? - 1,
                        )
                    }
                    _ => return Err(format!("unknown name {name:?}")),
                }
            }
        };
        let allowed = match (self.scope, var) {
            (Scope::Operator { dim }, Var::X(i)) => {
                if name == "x" && dim != 1 {
                    return Err(format!(
                        "`x` is ambiguous in dimension {dim}; use x1..x{dim}"
                    ));
                }
                i < dim
            }
            (Scope::Operator { .. }, Var::U(_)) => true,
            (Scope::Kernel, Var::T | Var::S | Var::U(_)) => true,
            (Scope::FreeTerm, Var::T | Var::U(_)) => true,
            (Scope::Nonlinearity, Var::T) => true,
            (Scope::Nonlinearity, Var::X(0)) => name == "x",
            (Scope::Coefficient, Var::U(_)) => true,
            _ => false,
        };
        if allowed {
            Ok(var)
        } else {
            Err(format!(
                "variable {name:?} is not available here ({:?})",
                self.scope
            ))
        }
    }
}
