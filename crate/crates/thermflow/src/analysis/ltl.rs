//! Linear temporal logic over named scene predicates.
//!
//! Formulas are built from props — the named predicates a scene declares —
//! with `~` (not), `/\`, `\/`, `->`, the temporal operators `[]` (always),
//! `<>` (eventually), binary `U` (until), and the constants `True` and
//! `False`. Binding from tightest to loosest: unary operators, `U`
//! (right-associative), `/\`, `\/`, `->` (right-associative).
//!
//! A formula is decided on a finite path of sampled states whose final
//! state repeats forever (the run has gone quiescent or the time bound cut
//! it off), so on the last sample `[]φ`, `<>φ`, and `φ U ψ` all collapse to
//! their present-state readings.

use crate::model::SystemState;
use crate::scene::Predicate;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// A temporal formula over prop names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    Prop(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Always(Box<Formula>),
    Eventually(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
}

// Binary operators always print parenthesized, so the text parses back to
// a structurally equal formula.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("True"),
            Formula::False => f.write_str("False"),
            Formula::Prop(name) => f.write_str(name),
            Formula::Not(x) => write!(f, "~{x}"),
            Formula::And(a, b) => write!(f, "({a} /\\ {b})"),
            Formula::Or(a, b) => write!(f, "({a} \\/ {b})"),
            Formula::Implies(a, b) => write!(f, "({a} -> {b})"),
            Formula::Always(x) => write!(f, "[]{x}"),
            Formula::Eventually(x) => write!(f, "<>{x}"),
            Formula::Until(a, b) => write!(f, "({a} U {b})"),
        }
    }
}

/// Formula syntax/resolution error at a 1-based column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {col}: {message}")]
pub struct FormulaParseError {
    pub col: usize,
    pub message: String,
}

fn err<T>(col: usize, message: impl Into<String>) -> Result<T, FormulaParseError> {
    Err(FormulaParseError {
        col,
        message: message.into(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Always,
    Eventually,
    Not,
    And,
    Or,
    Implies,
    Until,
    LParen,
    RParen,
    True,
    False,
    Prop(String),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Always => f.write_str("[]"),
            Tok::Eventually => f.write_str("<>"),
            Tok::Not => f.write_str("~"),
            Tok::And => f.write_str("/\\"),
            Tok::Or => f.write_str("\\/"),
            Tok::Implies => f.write_str("->"),
            Tok::Until => f.write_str("U"),
            Tok::LParen => f.write_str("("),
            Tok::RParen => f.write_str(")"),
            Tok::True => f.write_str("True"),
            Tok::False => f.write_str("False"),
            Tok::Prop(name) => f.write_str(name),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, FormulaParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    let name_byte = |b: u8| b.is_ascii_alphanumeric() || b == b'_';
    while i < bytes.len() {
        let col = i + 1;
        let two = |c: u8| bytes.get(i + 1) == Some(&c);
        match bytes[i] {
            b' ' | b'\t' => i += 1,
            b'[' if two(b']') => {
                toks.push((Tok::Always, col));
                i += 2;
            }
            b'<' if two(b'>') => {
                toks.push((Tok::Eventually, col));
                i += 2;
            }
            b'/' if two(b'\\') => {
                toks.push((Tok::And, col));
                i += 2;
            }
            b'\\' if two(b'/') => {
                toks.push((Tok::Or, col));
                i += 2;
            }
            b'-' if two(b'>') => {
                toks.push((Tok::Implies, col));
                i += 2;
            }
            b'~' => {
                toks.push((Tok::Not, col));
                i += 1;
            }
            b'(' => {
                toks.push((Tok::LParen, col));
                i += 1;
            }
            b')' => {
                toks.push((Tok::RParen, col));
                i += 1;
            }
            b'A'..=b'Z' | b'a'..=b'z' | b'_' => {
                let start = i;
                i += 1;
                loop {
                    match bytes.get(i) {
                        Some(&c) if name_byte(c) => i += 1,
                        Some(b'-') if bytes.get(i + 1).is_some_and(|&c| name_byte(c)) => i += 2,
                        _ => break,
                    }
                }
                let word = &text[start..i];
                toks.push((
                    match word {
                        "U" => Tok::Until,
                        "True" => Tok::True,
                        "False" => Tok::False,
                        _ => Tok::Prop(word.to_owned()),
                    },
                    col,
                ));
            }
            _ => {
                return err(
                    col,
                    format!("unexpected character {:?}", text[i..].chars().next().unwrap()),
                )
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
    props: &'a BTreeMap<String, Predicate>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|&(_, c)| c)
            .unwrap_or(self.end_col)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    // -> is right-associative and binds loosest
    fn implies(&mut self) -> Result<Formula, FormulaParseError> {
        let lhs = self.or_chain()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implies()?;
            Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn or_chain(&mut self) -> Result<Formula, FormulaParseError> {
        let mut lhs = self.and_chain()?;
        while self.eat(&Tok::Or) {
            let rhs = self.and_chain()?;
            lhs = Formula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and_chain(&mut self) -> Result<Formula, FormulaParseError> {
        let mut lhs = self.until_chain()?;
        while self.eat(&Tok::And) {
            let rhs = self.until_chain()?;
            lhs = Formula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    // U is right-associative: a U b U c reads a U (b U c)
    fn until_chain(&mut self) -> Result<Formula, FormulaParseError> {
        let lhs = self.unary()?;
        if self.eat(&Tok::Until) {
            let rhs = self.until_chain()?;
            Ok(Formula::Until(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn unary(&mut self) -> Result<Formula, FormulaParseError> {
        if self.eat(&Tok::Always) {
            Ok(Formula::Always(Box::new(self.unary()?)))
        } else if self.eat(&Tok::Eventually) {
            Ok(Formula::Eventually(Box::new(self.unary()?)))
        } else if self.eat(&Tok::Not) {
            Ok(Formula::Not(Box::new(self.unary()?)))
        } else {
            self.atom()
        }
    }

    fn atom(&mut self) -> Result<Formula, FormulaParseError> {
        let col = self.col();
        match self.peek().cloned() {
            Some(Tok::True) => {
                self.pos += 1;
                Ok(Formula::True)
            }
            Some(Tok::False) => {
                self.pos += 1;
                Ok(Formula::False)
            }
            Some(Tok::Prop(name)) => {
                self.pos += 1;
                if self.props.contains_key(&name) {
                    Ok(Formula::Prop(name))
                } else if self.props.is_empty() {
                    err(col, format!("unknown prop `{name}` (the scene defines none)"))
                } else {
                    let known: Vec<&str> = self.props.keys().map(String::as_str).collect();
                    err(
                        col,
                        format!(
                            "unknown prop `{name}` (the scene defines: {})",
                            known.join(", ")
                        ),
                    )
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.implies()?;
                if self.eat(&Tok::RParen) {
                    Ok(inner)
                } else {
                    err(self.col(), "expected `)`")
                }
            }
            Some(other) => err(col, format!("expected a formula, found `{other}`")),
            None => err(col, "expected a formula"),
        }
    }
}

/// Parses a formula, checking every prop name against the scene's props.
pub fn parse_formula(
    text: &str,
    props: &BTreeMap<String, Predicate>,
) -> Result<Formula, FormulaParseError> {
    let toks = tokenize(text)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        end_col: text.chars().count() + 1,
        props,
    };
    let formula = parser.implies()?;
    if parser.pos != parser.toks.len() {
        return err(
            parser.col(),
            format!("unexpected `{}`", parser.toks[parser.pos].0),
        );
    }
    Ok(formula)
}

/// Truth value of `formula` at every position of the path whose final
/// state repeats forever. Computed backwards from the end, one pass per
/// subformula, so the cost is path length × formula size.
pub fn eval_on_path(
    formula: &Formula,
    samples: &[SystemState],
    props: &BTreeMap<String, Predicate>,
) -> Result<Vec<bool>, super::AnalysisError> {
    use super::AnalysisError;
    let n = samples.len();
    assert!(n > 0, "a path has at least its initial state");
    let zip = |a: Vec<bool>, b: Vec<bool>, f: fn(bool, bool) -> bool| -> Vec<bool> {
        a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
    };
    // On the self-looping final state a temporal operator sees only that
    // state, hence the base case v[n-1] = child[n-1] for all three.
    let backward = |child: Vec<bool>, f: fn(bool, bool) -> bool| -> Vec<bool> {
        let mut v = child;
        for i in (0..n - 1).rev() {
            v[i] = f(v[i], v[i + 1]);
        }
        v
    };
    Ok(match formula {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Prop(name) => {
            let pred = props
                .get(name)
                .ok_or_else(|| AnalysisError::UnboundProp(name.clone()))?;
            samples
                .iter()
                .map(|s| pred.eval(&s.config))
                .collect::<Result<_, _>>()?
        }
        Formula::Not(x) => eval_on_path(x, samples, props)?
            .into_iter()
            .map(|b| !b)
            .collect(),
        Formula::And(a, b) => zip(
            eval_on_path(a, samples, props)?,
            eval_on_path(b, samples, props)?,
            |x, y| x && y,
        ),
        Formula::Or(a, b) => zip(
            eval_on_path(a, samples, props)?,
            eval_on_path(b, samples, props)?,
            |x, y| x || y,
        ),
        Formula::Implies(a, b) => zip(
            eval_on_path(a, samples, props)?,
            eval_on_path(b, samples, props)?,
            |x, y| !x || y,
        ),
        Formula::Always(x) => backward(eval_on_path(x, samples, props)?, |here, later| {
            here && later
        }),
        Formula::Eventually(x) => backward(eval_on_path(x, samples, props)?, |here, later| {
            here || later
        }),
        Formula::Until(a, b) => {
            let va = eval_on_path(a, samples, props)?;
            let mut v = eval_on_path(b, samples, props)?;
            for i in (0..n - 1).rev() {
                v[i] = v[i] || (va[i] && v[i + 1]);
            }
            v
        }
    })
}
