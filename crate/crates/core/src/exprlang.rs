//! A small arithmetic expression language for supplying data functions from
//! config files and the command line.
//!
//! ```text
//! expr    := term (("+"|"-") term)* ;
//! term    := factor (("*"|"/") factor)* ;
//! factor  := "-" factor | power ;
//! power   := atom ("^" factor)? ;
//! atom    := NUMBER | IDENT | IDENT "(" expr ("," expr)* ")" | "(" expr ")" ;
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-2^2` is
//! `-4` and `2^3^2` is `2^9`. Identifiers resolve to a declared variable, then
//! to the constants `pi` and `e`.

use std::collections::HashMap;
use std::f64::consts;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::error::{DomainError, Error, Result};
use crate::problem::ScalarFn;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at position {position}")]
pub struct ParseError {
    pub message: String,
    /// 0-based character offset into the source.
    pub position: usize,
}

impl ParseError {
    fn new(message: impl Into<String>, position: usize) -> Self {
        Self {
            message: message.into(),
            position,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Abs,
    Sign,
    Tanh,
    Min,
    Max,
    Pow,
    Bump,
}

impl Builtin {
    pub const ALL: [Builtin; 13] = [
        Builtin::Sin,
        Builtin::Cos,
        Builtin::Tan,
        Builtin::Exp,
        Builtin::Ln,
        Builtin::Sqrt,
        Builtin::Abs,
        Builtin::Sign,
        Builtin::Tanh,
        Builtin::Min,
        Builtin::Max,
        Builtin::Pow,
        Builtin::Bump,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Sin => "sin",
            Builtin::Cos => "cos",
            Builtin::Tan => "tan",
            Builtin::Exp => "exp",
            Builtin::Ln => "ln",
            Builtin::Sqrt => "sqrt",
            Builtin::Abs => "abs",
            Builtin::Sign => "sign",
            Builtin::Tanh => "tanh",
            Builtin::Min => "min",
            Builtin::Max => "max",
            Builtin::Pow => "pow",
            Builtin::Bump => "bump",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Builtin::Min | Builtin::Max | Builtin::Pow => 2,
            Builtin::Bump => 3,
            _ => 1,
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

/// Syntax tree node. Variables are indices into the declared variable list of
/// the owning [`Expr`].
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    Var(usize),
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Builtin, Vec<Node>),
}

/// A parsed expression together with the variable set it was parsed against.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    vars: Vec<String>,
    root: Node,
}

/// `exp(1 - 1/(1 - r^2))` for `|r| < 1` with `r = (x - c)/w`, else 0.
pub fn bump(x: f64, c: f64, w: f64) -> f64 {
    let r = (x - c) / w;
    if r.abs() < 1.0 {
        (1.0 - 1.0 / (1.0 - r * r)).exp()
    } else {
        0.0
    }
}

/// Parses `src` against the declared variable names.
pub fn parse(src: &str, vars: &[&str]) -> std::result::Result<Expr, ParseError> {
    let tokens = lex(src)?;
    let vars: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
    let mut parser = Parser {
        tokens,
        cursor: 0,
        vars: &vars,
    };
    let root = parser.expr()?;
    let tok = parser.peek();
    if tok.kind != Tok::Eof {
        return Err(ParseError::new(
            format!("unexpected {} after expression", tok.kind.describe()),
            tok.pos,
        ));
    }
    Ok(Expr { vars, root })
}

impl Expr {
    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Evaluates with values given positionally in declared-variable order.
    pub fn eval_positional(&self, values: &[f64]) -> std::result::Result<f64, DomainError> {
        if values.len() != self.vars.len() {
            return Err(DomainError::new(format!(
                "expected {} variable values, got {}",
                self.vars.len(),
                values.len()
            )));
        }
        eval_node(&self.root, values)
    }

    /// Evaluates with named bindings; every declared variable that occurs in
    /// the expression must be bound.
    pub fn eval(&self, bindings: &HashMap<&str, f64>) -> std::result::Result<f64, DomainError> {
        let used = self.used_vars();
        let mut values = vec![0.0; self.vars.len()];
        for (i, name) in self.vars.iter().enumerate() {
            match bindings.get(name.as_str()) {
                Some(&v) => values[i] = v,
                None if used.contains(&i) => {
                    return Err(DomainError::new(format!("unbound variable `{name}`")))
                }
                None => {}
            }
        }
        eval_node(&self.root, &values)
    }

    /// Indices of declared variables that actually occur in the tree.
    pub fn used_vars(&self) -> Vec<usize> {
        fn walk(n: &Node, out: &mut Vec<usize>) {
            match n {
                Node::Num(_) => {}
                Node::Var(i) => {
                    if !out.contains(i) {
                        out.push(*i)
                    }
                }
                Node::Neg(a) => walk(a, out),
                Node::Binary(_, a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Node::Call(_, args) => args.iter().for_each(|a| walk(a, out)),
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out.sort_unstable();
        out
    }

    /// Wraps the expression as a [`ScalarFn`] whose positional arguments are
    /// `var_order`. Variables of the expression must all appear in `var_order`;
    /// extra entries are ignored by the evaluation.
    pub fn to_scalarfn(&self, var_order: &[&str]) -> Result<ScalarFn> {
        if !(1..=3).contains(&var_order.len()) {
            return Err(Error::InvalidArgument(format!(
                "a function takes 1 to 3 variables, got {}",
                var_order.len()
            )));
        }
        if self.vars.len() > MAX_VARS {
            return Err(Error::InvalidArgument(format!(
                "at most {MAX_VARS} declared variables, got {}",
                self.vars.len()
            )));
        }
        let mut mapping = Vec::with_capacity(self.vars.len());
        for (i, name) in self.vars.iter().enumerate() {
            match var_order.iter().position(|v| v == name) {
                Some(p) => mapping.push(p),
                None if self.used_vars().contains(&i) => {
                    return Err(Error::InvalidArgument(format!(
                        "variable `{name}` is not among {var_order:?}"
                    )))
                }
                // unused declared variable, bound to anything
                None => mapping.push(0),
            }
        }
        let expr = Arc::new(self.clone());
        Ok(ScalarFn::new(var_order.len(), move |args| {
            let mut local = [0.0; MAX_VARS];
            for (slot, &p) in mapping.iter().enumerate() {
                local[slot] = args[p];
            }
            eval_node(&expr.root, &local[..mapping.len()])
        }))
    }
}

const MAX_VARS: usize = 8;

/// Parses and wraps in one go, declaring exactly the variables of `var_order`.
pub fn compile(src: &str, var_order: &[&str]) -> Result<ScalarFn> {
    parse(src, var_order)?.to_scalarfn(var_order)
}

fn eval_node(node: &Node, values: &[f64]) -> std::result::Result<f64, DomainError> {
    let v = match node {
        Node::Num(v) => *v,
        Node::Var(i) => values[*i],
        Node::Neg(a) => -eval_node(a, values)?,
        Node::Binary(op, a, b) => {
            let l = eval_node(a, values)?;
            let r = eval_node(b, values)?;
            match op {
                BinOp::Add => l + r,
                BinOp::Sub => l - r,
                BinOp::Mul => l * r,
                BinOp::Div => {
                    if r == 0.0 {
                        return Err(DomainError::new("division by zero"));
                    }
                    l / r
                }
                BinOp::Pow => power(l, r)?,
            }
        }
        Node::Call(b, args) => {
            let mut a = [0.0; 3];
            for (slot, arg) in a.iter_mut().zip(args) {
                *slot = eval_node(arg, values)?;
            }
            match b {
                Builtin::Sin => a[0].sin(),
                Builtin::Cos => a[0].cos(),
                Builtin::Tan => a[0].tan(),
                Builtin::Exp => a[0].exp(),
                Builtin::Ln => {
                    if a[0] <= 0.0 {
                        return Err(DomainError::new(format!("ln of non-positive {}", a[0])));
                    }
                    a[0].ln()
                }
                Builtin::Sqrt => {
                    if a[0] < 0.0 {
                        return Err(DomainError::new(format!("sqrt of negative {}", a[0])));
                    }
                    a[0].sqrt()
                }
                Builtin::Abs => a[0].abs(),
                Builtin::Sign => {
                    if a[0] > 0.0 {
                        1.0
                    } else if a[0] < 0.0 {
                        -1.0
                    } else {
                        0.0
                    }
                }
                Builtin::Tanh => a[0].tanh(),
                Builtin::Min => a[0].min(a[1]),
                Builtin::Max => a[0].max(a[1]),
                Builtin::Pow => power(a[0], a[1])?,
                Builtin::Bump => {
                    if !(a[2] > 0.0) {
                        return Err(DomainError::new(format!(
                            "bump width must be positive, got {}",
                            a[2]
                        )));
                    }
                    bump(a[0], a[1], a[2])
                }
            }
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(DomainError::new(format!(
            "non-finite intermediate value {v}"
        )))
    }
}

fn power(base: f64, exp: f64) -> std::result::Result<f64, DomainError> {
    if base == 0.0 && exp < 0.0 {
        return Err(DomainError::new(format!("0^{exp}")));
    }
    if base < 0.0 && exp.fract() != 0.0 {
        return Err(DomainError::new(format!(
            "negative base {base} with non-integer exponent {exp}"
        )));
    }
    Ok(base.powf(exp))
}

// ---------------------------------------------------------------------------
// printing

impl fmt::Display for Expr {
    /// Fully parenthesised form; re-parsing it gives back the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(&self.root, &self.vars, f)
    }
}

fn write_node(node: &Node, vars: &[String], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match node {
        Node::Num(v) => write!(f, "{v:?}"),
        Node::Var(i) => f.write_str(&vars[*i]),
        Node::Neg(a) => {
            f.write_str("-")?;
            write_node(a, vars, f)
        }
        Node::Binary(op, a, b) => {
            f.write_str("(")?;
            // a negated base would otherwise re-parse as -(base^exp)
            let wrap = *op == BinOp::Pow && matches!(**a, Node::Neg(_));
            if wrap {
                f.write_str("(")?;
            }
            write_node(a, vars, f)?;
            if wrap {
                f.write_str(")")?;
            }
            write!(f, " {} ", op.symbol())?;
            write_node(b, vars, f)?;
            f.write_str(")")
        }
        Node::Call(b, args) => {
            write!(f, "{}(", b.name())?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write_node(a, vars, f)?;
            }
            f.write_str(")")
        }
    }
}

// ---------------------------------------------------------------------------
// lexing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: Tok,
    pos: usize,
}

fn lex(src: &str) -> std::result::Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let kind = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            c if c.is_ascii_digit()
                || (c == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) =>
            {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i < chars.len() && chars[i] == '.' {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let v: f64 = text
                    .parse()
                    .map_err(|_| ParseError::new(format!("malformed number `{text}`"), start))?;
                if !v.is_finite() {
                    return Err(ParseError::new(
                        format!("number `{text}` is out of range"),
                        start,
                    ));
                }
                tokens.push(Token {
                    kind: Tok::Num(v),
                    pos: start,
                });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                tokens.push(Token {
                    kind: Tok::Ident(chars[start..i].iter().collect()),
                    pos: start,
                });
                continue;
            }
            other => {
                return Err(ParseError::new(
                    format!("unexpected character `{other}`"),
                    start,
                ))
            }
        };
        tokens.push(Token { kind, pos: start });
        i += 1;
    }
    tokens.push(Token {
        kind: Tok::Eof,
        pos: chars.len(),
    });
    Ok(tokens)
}

// ---------------------------------------------------------------------------
// parsing

struct Parser<'a> {
    tokens: Vec<Token>,
    cursor: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.cursor]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.cursor].clone();
        if t.kind != Tok::Eof {
            self.cursor += 1;
        }
        t
    }

    fn expect(&mut self, kind: Tok) -> std::result::Result<(), ParseError> {
        let t = self.peek();
        if t.kind == kind {
            self.bump();
            Ok(())
        } else {
            Err(ParseError::new(
                format!("expected {}, found {}", kind.describe(), t.kind.describe()),
                t.pos,
            ))
        }
    }

    fn expr(&mut self) -> std::result::Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().kind {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> std::result::Result<Node, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek().kind {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> std::result::Result<Node, ParseError> {
        if self.peek().kind == Tok::Minus {
            self.bump();
            return Ok(Node::Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    fn power(&mut self) -> std::result::Result<Node, ParseError> {
        let base = self.atom()?;
        if self.peek().kind == Tok::Caret {
            self.bump();
            let exp = self.factor()?;
            return Ok(Node::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> std::result::Result<Node, ParseError> {
        let tok = self.bump();
        match tok.kind {
            Tok::Num(v) => Ok(Node::Num(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if self.peek().kind == Tok::LParen {
                    return self.call(name, tok.pos);
                }
                if let Some(i) = self.vars.iter().position(|v| *v == name) {
                    return Ok(Node::Var(i));
                }
                match name.as_str() {
                    "pi" => Ok(Node::Num(consts::PI)),
                    "e" => Ok(Node::Num(consts::E)),
                    _ => Err(ParseError::new(
                        format!("unknown variable `{name}`"),
                        tok.pos,
                    )),
                }
            }
            other => Err(ParseError::new(
                format!("expected an expression, found {}", other.describe()),
                tok.pos,
            )),
        }
    }

    fn call(&mut self, name: String, pos: usize) -> std::result::Result<Node, ParseError> {
        let builtin = Builtin::from_name(&name)
            .ok_or_else(|| ParseError::new(format!("unknown function `{name}`"), pos))?;
        self.expect(Tok::LParen)?;
        let mut args = vec![self.expr()?];
        while self.peek().kind == Tok::Comma {
            self.bump();
            args.push(self.expr()?);
        }
        self.expect(Tok::RParen)?;
        if args.len() != builtin.arity() {
            return Err(ParseError::new(
                format!(
                    "`{name}` takes {} argument(s), got {}",
                    builtin.arity(),
                    args.len()
                ),
                pos,
            ));
        }
        Ok(Node::Call(builtin, args))
    }
}
