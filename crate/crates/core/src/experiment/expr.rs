//! Bias-size rules: a small arithmetic language over `n`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)* | unary atom      (implicit product: 2n)
//! unary  := '-' unary | atom
//! atom   := number | 'n' | func '(' expr ')' | '(' expr ')'
//! func   := floor | ceil | sqrt
//! ```
//!
//! `−` and `·` are accepted for `-` and `*`. A rule must evaluate to an
//! integer for every `n` it is used with.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("cannot parse `{text}` at offset {at}: {reason}")]
    Syntax { text: String, at: usize, reason: String },
    #[error("`{rule}` at n = {n} gives {value}, not an integer")]
    NotInteger { rule: String, n: usize, value: f64 },
    #[error("`{rule}` at n = {n} is undefined")]
    Undefined { rule: String, n: usize },
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(f64),
    N,
    Neg(Box<Node>),
    Bin(char, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Func {
    Floor,
    Ceil,
    Sqrt,
}

/// A parsed rule; serializes as its source text.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct SizeRule {
    text: String,
    root: Node,
}

impl SizeRule {
    pub fn constant(value: usize) -> SizeRule {
        SizeRule {
            text: value.to_string(),
            root: Node::Num(value as f64),
        }
    }

    pub fn eval(&self, n: usize) -> Result<usize, ExprError> {
        let value = eval(&self.root, n as f64);
        if !value.is_finite() {
            return Err(ExprError::Undefined {
                rule: self.text.clone(),
                n,
            });
        }
        let rounded = value.round();
        if (value - rounded).abs() > 1e-9 || rounded < 0.0 {
            return Err(ExprError::NotInteger {
                rule: self.text.clone(),
                n,
                value,
            });
        }
        Ok(rounded as usize)
    }
}

fn eval(node: &Node, n: f64) -> f64 {
    match node {
        Node::Num(x) => *x,
        Node::N => n,
        Node::Neg(a) => -eval(a, n),
        Node::Bin(op, a, b) => {
            let (a, b) = (eval(a, n), eval(b, n));
            match op {
                '+' => a + b,
                '-' => a - b,
                '*' => a * b,
                _ => a / b,
            }
        }
        // nudge before rounding so sqrt(16) stays 4 under float error
        Node::Call(Func::Floor, a) => (eval(a, n) + 1e-9).floor(),
        Node::Call(Func::Ceil, a) => (eval(a, n) - 1e-9).ceil(),
        Node::Call(Func::Sqrt, a) => eval(a, n).sqrt(),
    }
}

impl fmt::Display for SizeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl From<SizeRule> for String {
    fn from(rule: SizeRule) -> String {
        rule.text
    }
}

impl TryFrom<String> for SizeRule {
    type Error = ExprError;

    fn try_from(text: String) -> Result<SizeRule, ExprError> {
        text.parse()
    }
}

impl FromStr for SizeRule {
    type Err = ExprError;

    fn from_str(text: &str) -> Result<SizeRule, ExprError> {
        let chars: Vec<char> = text
            .chars()
            .map(|c| match c {
                '−' => '-',
                '·' => '*',
                c => c,
            })
            .collect();
        let mut p = Parser { chars, pos: 0, text };
        let root = p.expr()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(SizeRule {
            text: text.trim().to_string(),
            root,
        })
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    text: &'a str,
}

impl Parser<'_> {
    fn error(&self, reason: &str) -> ExprError {
        ExprError::Syntax {
            text: self.text.to_string(),
            at: self.pos,
            reason: reason.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Node, ExprError> {
        let mut left = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            left = Node::Bin(op, Box::new(left), Box::new(self.term()?));
        }
        Ok(left)
    }

    fn term(&mut self) -> Result<Node, ExprError> {
        let mut left = self.unary()?;
        loop {
            match self.peek() {
                Some(op @ ('*' | '/')) => {
                    self.pos += 1;
                    left = Node::Bin(op, Box::new(left), Box::new(self.unary()?));
                }
                Some(c) if c.is_ascii_alphanumeric() || c == '(' => {
                    left = Node::Bin('*', Box::new(left), Box::new(self.atom()?));
                }
                _ => return Ok(left),
            }
        }
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Node, ExprError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let start = self.pos;
                while self
                    .chars
                    .get(self.pos)
                    .is_some_and(|c| c.is_ascii_digit() || *c == '.')
                {
                    self.pos += 1;
                }
                let lit: String = self.chars[start..self.pos].iter().collect();
                lit.parse().map(Node::Num).map_err(|_| self.error("bad number"))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_alphabetic()) {
                    self.pos += 1;
                }
                let word: String = self.chars[start..self.pos].iter().collect();
                let func = match word.as_str() {
                    "n" => return Ok(Node::N),
                    "floor" => Func::Floor,
                    "ceil" => Func::Ceil,
                    "sqrt" => Func::Sqrt,
                    _ => {
                        self.pos = start;
                        return Err(self.error(&format!("unknown name `{word}`")));
                    }
                };
                if self.peek() != Some('(') {
                    return Err(self.error("expected `(` after function name"));
                }
                self.pos += 1;
                let arg = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(Node::Call(func, Box::new(arg)))
            }
            _ => Err(self.error("expected a number, `n`, a function or `(`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(rule: &str, n: usize) -> usize {
        rule.parse::<SizeRule>().unwrap().eval(n).unwrap()
    }

    #[test]
    fn clique_rule_with_implicit_product_and_unicode_minus() {
        assert_eq!(at("floor(sqrt(2n−4))", 10), 4);
        assert_eq!(at("floor(sqrt(2*n - 4))", 8), 3);
        assert_eq!(at("floor(sqrt(2n-4))", 10), 4);
    }

    #[test]
    fn exact_squares_survive_float_error() {
        // 2n - 4 = 16 at n = 10
        assert_eq!(at("floor(sqrt(2n-4))", 10), 4);
        assert_eq!(at("ceil(3n/7)", 14), 6);
        assert_eq!(at("ceil(3n/7)", 15), 7);
    }

    #[test]
    fn precedence_and_unary_minus() {
        assert_eq!(at("1 + 2 * 3", 0), 7);
        assert_eq!(at("(1 + 2) * 3", 0), 9);
        assert_eq!(at("n - -2", 3), 5);
        assert_eq!(at("n/2", 10), 5);
    }

    #[test]
    fn non_integers_and_bad_text_are_rejected() {
        let half: SizeRule = "n/2".parse().unwrap();
        assert!(matches!(half.eval(9), Err(ExprError::NotInteger { .. })));
        assert!(matches!("sqrt(n".parse::<SizeRule>(), Err(ExprError::Syntax { .. })));
        assert!(matches!("log(n)".parse::<SizeRule>(), Err(ExprError::Syntax { .. })));
        assert!(matches!("n +".parse::<SizeRule>(), Err(ExprError::Syntax { .. })));
        let undefined: SizeRule = "n/0".parse().unwrap();
        assert!(matches!(undefined.eval(4), Err(ExprError::Undefined { .. })));
    }

    #[test]
    fn serializes_as_source_text() {
        let rule: SizeRule = "floor(n/2)".parse().unwrap();
        assert_eq!(serde_json::to_string(&rule).unwrap(), "\"floor(n/2)\"");
        let back: SizeRule = serde_json::from_str("\"floor(n/2)\"").unwrap();
        assert_eq!(back, rule);
    }
}
