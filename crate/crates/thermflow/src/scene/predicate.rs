//! State predicates: exact-rational comparisons over attribute references,
//! phase and thermostat-status tests, and boolean connectives.
//!
//! Concrete syntax, loosest to tightest binding: `or`, `and`, `not`,
//! comparisons (`= != < <= > >=`), then arithmetic (`+ -` over `* /` over
//! unary minus), with `abs(...)`, parentheses, rational literals (`7`,
//! `15/10`, `1.5`, all exact) and the attribute references `temp(id)`,
//! `qdot(id)`, `heatTrans(id)`. `phaseIs(id, phase)` and
//! `statusIs(id, on|off)` test discrete state; `true` and `false` are
//! literals. References are resolved against a configuration at parse time.

use crate::model::{Configuration, HeaterStatus, Object, ObjectId, Phase};
use crate::numeric::Rat;
use std::fmt;
use thiserror::Error;

/// Which numeric attribute a reference reads.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Attr {
    Temp,
    Qdot,
    HeatTrans,
}

impl Attr {
    pub fn name(self) -> &'static str {
        match self {
            Attr::Temp => "temp",
            Attr::Qdot => "qdot",
            Attr::HeatTrans => "heatTrans",
        }
    }
}

/// Exact-rational arithmetic over attribute references.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArithExpr {
    Lit(Rat),
    Attr { attr: Attr, id: ObjectId },
    Neg(Box<ArithExpr>),
    Abs(Box<ArithExpr>),
    Add(Box<ArithExpr>, Box<ArithExpr>),
    Sub(Box<ArithExpr>, Box<ArithExpr>),
    Mul(Box<ArithExpr>, Box<ArithExpr>),
    Div(Box<ArithExpr>, Box<ArithExpr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    fn holds(self, lhs: &Rat, rhs: &Rat) -> bool {
        match self {
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
        }
    }
}

/// A state predicate, evaluated exactly — no tolerances anywhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Predicate {
    Const(bool),
    Cmp {
        op: CmpOp,
        lhs: ArithExpr,
        rhs: ArithExpr,
    },
    PhaseIs {
        id: ObjectId,
        phase: Phase,
    },
    StatusIs {
        id: ObjectId,
        status: HeaterStatus,
    },
    Not(Box<Predicate>),
    And(Box<Predicate>, Box<Predicate>),
    Or(Box<Predicate>, Box<Predicate>),
}

/// Evaluation failure on a configuration that lacks what the predicate
/// references (possible only for hand-built predicates — parsing resolves
/// references up front) or divides by zero.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("division by zero while evaluating a predicate")]
    DivisionByZero,
    #[error("predicate references {attr}({id}), which this configuration lacks")]
    MissingAttribute { attr: &'static str, id: ObjectId },
}

impl ArithExpr {
    pub fn eval(&self, config: &Configuration) -> Result<Rat, EvalError> {
        match self {
            ArithExpr::Lit(x) => Ok(x.clone()),
            ArithExpr::Attr { attr, id } => read_attr(config, *attr, id),
            ArithExpr::Neg(x) => Ok(-x.eval(config)?),
            ArithExpr::Abs(x) => Ok(x.eval(config)?.abs()),
            ArithExpr::Add(a, b) => Ok(a.eval(config)? + b.eval(config)?),
            ArithExpr::Sub(a, b) => Ok(a.eval(config)? - b.eval(config)?),
            ArithExpr::Mul(a, b) => Ok(a.eval(config)? * b.eval(config)?),
            ArithExpr::Div(a, b) => a
                .eval(config)?
                .checked_div(&b.eval(config)?)
                .ok_or(EvalError::DivisionByZero),
        }
    }
}

pub(crate) fn read_attr(config: &Configuration, attr: Attr, id: &ObjectId) -> Result<Rat, EvalError> {
    let missing = || EvalError::MissingAttribute {
        attr: attr.name(),
        id: id.clone(),
    };
    match (attr, config.get(id)) {
        (Attr::Temp, Some(Object::Entity(e))) => Ok(e.temp.clone()),
        (Attr::HeatTrans, Some(Object::Entity(e))) => e.heat_trans().cloned().ok_or_else(missing),
        (Attr::Qdot, Some(Object::Interaction(i))) => Ok(i.qdot.clone()),
        (Attr::Qdot, Some(Object::Heater(h))) => Ok(h.qdot.clone()),
        _ => Err(missing()),
    }
}

impl Predicate {
    /// Decides the predicate on a configuration, exactly.
    pub fn eval(&self, config: &Configuration) -> Result<bool, EvalError> {
        match self {
            Predicate::Const(b) => Ok(*b),
            Predicate::Cmp { op, lhs, rhs } => {
                Ok(op.holds(&lhs.eval(config)?, &rhs.eval(config)?))
            }
            Predicate::PhaseIs { id, phase } => match config.get(id) {
                Some(Object::Entity(e)) if e.phase().is_some() => Ok(e.phase() == Some(*phase)),
                _ => Err(EvalError::MissingAttribute {
                    attr: "phaseIs",
                    id: id.clone(),
                }),
            },
            Predicate::StatusIs { id, status } => match config.get(id) {
                Some(Object::Heater(h)) if h.smart.is_some() => {
                    Ok(h.smart.as_ref().map(|s| s.status) == Some(*status))
                }
                _ => Err(EvalError::MissingAttribute {
                    attr: "statusIs",
                    id: id.clone(),
                }),
            },
            Predicate::Not(p) => Ok(!p.eval(config)?),
            Predicate::And(a, b) => Ok(a.eval(config)? && b.eval(config)?),
            Predicate::Or(a, b) => Ok(a.eval(config)? || b.eval(config)?),
        }
    }
}

// The printed form parses back to a structurally equal tree: binary
// operators are always parenthesized, literals print in lowest terms, and
// the parser folds unary minus into literals just as the printer does.
impl fmt::Display for ArithExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithExpr::Lit(x) => write!(f, "{x}"),
            ArithExpr::Attr { attr, id } => write!(f, "{}({id})", attr.name()),
            ArithExpr::Neg(x) => write!(f, "-{x}"),
            ArithExpr::Abs(x) => write!(f, "abs({x})"),
            ArithExpr::Add(a, b) => write!(f, "({a} + {b})"),
            ArithExpr::Sub(a, b) => write!(f, "({a} - {b})"),
            ArithExpr::Mul(a, b) => write!(f, "({a} * {b})"),
            ArithExpr::Div(a, b) => write!(f, "({a} / {b})"),
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Const(true) => f.write_str("true"),
            Predicate::Const(false) => f.write_str("false"),
            Predicate::Cmp { op, lhs, rhs } => write!(f, "{lhs} {} {rhs}", op.symbol()),
            Predicate::PhaseIs { id, phase } => write!(f, "phaseIs({id}, {phase})"),
            Predicate::StatusIs { id, status } => write!(f, "statusIs({id}, {status})"),
            // comparisons are the one form that doesn't bring its own
            // parentheses, so `not` must add them to survive a reparse
            Predicate::Not(p) => match p.as_ref() {
                Predicate::Cmp { .. } => write!(f, "not ({p})"),
                _ => write!(f, "not {p}"),
            },
            Predicate::And(a, b) => write!(f, "({a} and {b})"),
            Predicate::Or(a, b) => write!(f, "({a} or {b})"),
        }
    }
}

/// Predicate syntax/resolution error with a 1-based column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {col}: {message}")]
pub struct PredParseError {
    pub col: usize,
    pub message: String,
}

fn err<T>(col: usize, message: impl Into<String>) -> Result<T, PredParseError> {
    Err(PredParseError {
        col,
        message: message.into(),
    })
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(Rat),
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Cmp(CmpOp),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Number(x) => write!(f, "{x}"),
            Tok::LParen => f.write_str("("),
            Tok::RParen => f.write_str(")"),
            Tok::Comma => f.write_str(","),
            Tok::Plus => f.write_str("+"),
            Tok::Minus => f.write_str("-"),
            Tok::Star => f.write_str("*"),
            Tok::Slash => f.write_str("/"),
            Tok::Cmp(op) => f.write_str(op.symbol()),
        }
    }
}

/// Shared by the predicate parser and the scene parser's value positions:
/// splits `text` into tokens tagged with 1-based columns.
///
/// Identifiers take `[A-Za-z_]` then `[A-Za-z0-9_]`, absorbing `-` only
/// when a name character follows (so `temp-ok` is one name but `a - b`
/// subtracts). Number literals absorb `/q` or `.q` only when digits follow
/// immediately, so `363/875` and `1.5` are single exact literals.
fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, PredParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    let name_byte = |b: u8| b.is_ascii_alphanumeric() || b == b'_';
    while i < bytes.len() {
        let col = i + 1;
        let b = bytes[i];
        match b {
            b' ' | b'\t' => i += 1,
            b'(' => {
                toks.push((Tok::LParen, col));
                i += 1;
            }
            b')' => {
                toks.push((Tok::RParen, col));
                i += 1;
            }
            b',' => {
                toks.push((Tok::Comma, col));
                i += 1;
            }
            b'+' => {
                toks.push((Tok::Plus, col));
                i += 1;
            }
            b'-' => {
                toks.push((Tok::Minus, col));
                i += 1;
            }
            b'*' => {
                toks.push((Tok::Star, col));
                i += 1;
            }
            b'/' => {
                toks.push((Tok::Slash, col));
                i += 1;
            }
            b'=' => {
                toks.push((Tok::Cmp(CmpOp::Eq), col));
                i += 1;
            }
            b'!' if bytes.get(i + 1) == Some(&b'=') => {
                toks.push((Tok::Cmp(CmpOp::Ne), col));
                i += 2;
            }
            b'<' | b'>' => {
                let strict = if b == b'<' { CmpOp::Lt } else { CmpOp::Gt };
                let soft = if b == b'<' { CmpOp::Le } else { CmpOp::Ge };
                if bytes.get(i + 1) == Some(&b'=') {
                    toks.push((Tok::Cmp(soft), col));
                    i += 2;
                } else {
                    toks.push((Tok::Cmp(strict), col));
                    i += 1;
                }
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                for sep in *b"/." {
                    if bytes.get(i) == Some(&sep)
                        && bytes.get(i + 1).is_some_and(|c| c.is_ascii_digit())
                    {
                        i += 1;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                        break;
                    }
                }
                let lit = &text[start..i];
                match lit.parse::<Rat>() {
                    Ok(x) => toks.push((Tok::Number(x), col)),
                    Err(e) => return err(col, e.to_string()),
                }
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
                toks.push((Tok::Ident(text[start..i].to_owned()), col));
            }
            _ => return err(col, format!("unexpected character {:?}", text[i..].chars().next().unwrap())),
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
    config: &'a Configuration,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|&(_, c)| c)
            .unwrap_or(self.end_col)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), PredParseError> {
        if self.peek() == Some(want) {
            self.pos += 1;
            Ok(())
        } else {
            err(self.col(), format!("expected {what}"))
        }
    }

    fn pred(&mut self) -> Result<Predicate, PredParseError> {
        let mut lhs = self.and_chain()?;
        while self.peek() == Some(&Tok::Ident("or".into())) {
            self.pos += 1;
            let rhs = self.and_chain()?;
            lhs = Predicate::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and_chain(&mut self) -> Result<Predicate, PredParseError> {
        let mut lhs = self.not_chain()?;
        while self.peek() == Some(&Tok::Ident("and".into())) {
            self.pos += 1;
            let rhs = self.not_chain()?;
            lhs = Predicate::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn not_chain(&mut self) -> Result<Predicate, PredParseError> {
        if self.peek() == Some(&Tok::Ident("not".into())) {
            self.pos += 1;
            Ok(Predicate::Not(Box::new(self.not_chain()?)))
        } else {
            self.atom()
        }
    }

    fn atom(&mut self) -> Result<Predicate, PredParseError> {
        match self.peek() {
            Some(Tok::Ident(name)) => match name.as_str() {
                "true" => {
                    self.pos += 1;
                    return Ok(Predicate::Const(true));
                }
                "false" => {
                    self.pos += 1;
                    return Ok(Predicate::Const(false));
                }
                "phaseIs" => return self.phase_is(),
                "statusIs" => return self.status_is(),
                _ => {}
            },
            None => return err(self.col(), "expected a predicate"),
            _ => {}
        }
        // Either a comparison or a parenthesized predicate; tell them apart
        // by trying the comparison first and backtracking on failure.
        let save = self.pos;
        match self.comparison() {
            Ok(p) => Ok(p),
            Err(cmp_err) => {
                self.pos = save;
                if self.peek() == Some(&Tok::LParen) {
                    self.pos += 1;
                    let inner = self.pred()?;
                    self.expect(&Tok::RParen, "`)`")?;
                    Ok(inner)
                } else {
                    Err(cmp_err)
                }
            }
        }
    }

    fn comparison(&mut self) -> Result<Predicate, PredParseError> {
        let lhs = self.arith()?;
        let Some(Tok::Cmp(op)) = self.peek().cloned() else {
            return err(self.col(), "expected a comparison operator");
        };
        self.pos += 1;
        let rhs = self.arith()?;
        Ok(Predicate::Cmp { op, lhs, rhs })
    }

    fn phase_is(&mut self) -> Result<Predicate, PredParseError> {
        self.pos += 1; // phaseIs
        self.expect(&Tok::LParen, "`(`")?;
        let (id, id_col) = self.object_name()?;
        let entity = match self.config.get(&id) {
            Some(Object::Entity(e)) => e,
            _ => return err(id_col, format!("{id} is not an entity")),
        };
        if entity.phase().is_none() {
            return err(id_col, format!("{id} is not a water entity"));
        }
        self.expect(&Tok::Comma, "`,`")?;
        let col = self.col();
        let Some(Tok::Ident(word)) = self.bump() else {
            return err(col, "expected a phase name");
        };
        let Some(phase) = Phase::parse(&word) else {
            return err(col, format!("unknown phase {word:?}"));
        };
        self.expect(&Tok::RParen, "`)`")?;
        Ok(Predicate::PhaseIs { id, phase })
    }

    fn status_is(&mut self) -> Result<Predicate, PredParseError> {
        self.pos += 1; // statusIs
        self.expect(&Tok::LParen, "`(`")?;
        let (id, id_col) = self.object_name()?;
        match self.config.get(&id) {
            Some(Object::Heater(h)) if h.smart.is_some() => {}
            _ => return err(id_col, format!("{id} is not a thermostat-controlled heater")),
        }
        self.expect(&Tok::Comma, "`,`")?;
        let col = self.col();
        let Some(Tok::Ident(word)) = self.bump() else {
            return err(col, "expected `on` or `off`");
        };
        let Some(status) = HeaterStatus::parse(&word) else {
            return err(col, format!("expected `on` or `off`, found {word:?}"));
        };
        self.expect(&Tok::RParen, "`)`")?;
        Ok(Predicate::StatusIs { id, status })
    }

    fn object_name(&mut self) -> Result<(ObjectId, usize), PredParseError> {
        let col = self.col();
        match self.bump() {
            Some(Tok::Ident(name)) => Ok((ObjectId::from(name), col)),
            _ => err(col, "expected an object name"),
        }
    }

    fn arith(&mut self) -> Result<ArithExpr, PredParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => ArithExpr::Add as fn(_, _) -> _,
                Some(Tok::Minus) => ArithExpr::Sub,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = op(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<ArithExpr, PredParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => ArithExpr::Mul as fn(_, _) -> _,
                Some(Tok::Slash) => ArithExpr::Div,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = op(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<ArithExpr, PredParseError> {
        let col = self.col();
        match self.peek().cloned() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(match self.factor()? {
                    // fold so that `-5` is the literal −5, matching Display
                    ArithExpr::Lit(x) => ArithExpr::Lit(-x),
                    other => ArithExpr::Neg(Box::new(other)),
                })
            }
            Some(Tok::Number(x)) => {
                self.pos += 1;
                Ok(ArithExpr::Lit(x))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.arith()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "abs" => {
                    self.pos += 1;
                    self.expect(&Tok::LParen, "`(`")?;
                    let inner = self.arith()?;
                    self.expect(&Tok::RParen, "`)`")?;
                    Ok(ArithExpr::Abs(Box::new(inner)))
                }
                "temp" | "qdot" | "heatTrans" => {
                    let attr = match name.as_str() {
                        "temp" => Attr::Temp,
                        "qdot" => Attr::Qdot,
                        _ => Attr::HeatTrans,
                    };
                    self.pos += 1;
                    self.expect(&Tok::LParen, "`(`")?;
                    let (id, id_col) = self.object_name()?;
                    self.expect(&Tok::RParen, "`)`")?;
                    self.check_attr(attr, &id, id_col)?;
                    Ok(ArithExpr::Attr { attr, id })
                }
                _ => err(col, format!("unknown name {name:?} in an expression")),
            },
            _ => err(col, "expected an expression"),
        }
    }

    fn check_attr(&self, attr: Attr, id: &ObjectId, col: usize) -> Result<(), PredParseError> {
        let ok = match (attr, self.config.get(id)) {
            (Attr::Temp, Some(Object::Entity(_))) => true,
            (Attr::HeatTrans, Some(Object::Entity(e))) => e.heat_trans().is_some(),
            (Attr::Qdot, Some(Object::Interaction(_)) | Some(Object::Heater(_))) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            err(
                col,
                match self.config.get(id) {
                    None => format!("{id} does not exist"),
                    Some(_) => format!("{}({id}) is not a readable attribute here", attr.name()),
                },
            )
        }
    }
}

/// Parses a predicate, resolving every reference against `config`.
pub fn parse_predicate(text: &str, config: &Configuration) -> Result<Predicate, PredParseError> {
    let toks = tokenize(text)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        end_col: text.chars().count() + 1,
        config,
    };
    let pred = parser.pred()?;
    if parser.pos != parser.toks.len() {
        return err(parser.col(), format!("unexpected {}", parser.toks[parser.pos].0));
    }
    Ok(pred)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene;

    fn cs(name: &str) -> Configuration {
        scene::builtin(name).unwrap().objects
    }

    fn parse(text: &str, config: &Configuration) -> Predicate {
        parse_predicate(text, config).unwrap()
    }

    #[test]
    fn temperature_window_evaluates_exactly() {
        let config = cs("cs3");
        let p = parse("temp(coffee) >= 139/2 and temp(coffee) <= 161/2", &config);
        assert_eq!(p.eval(&config), Ok(false)); // coffee starts at −20
        let mut warm = config.clone();
        warm.entity_mut(&"coffee".into()).unwrap().temp = Rat::new(139, 2);
        assert_eq!(p.eval(&warm), Ok(true));
        warm.entity_mut(&"coffee".into()).unwrap().temp = Rat::new(139, 2) - Rat::new(1, 1_000_000);
        assert_eq!(p.eval(&warm), Ok(false)); // exact, not approximate
    }

    #[test]
    fn discrete_state_tests() {
        let config = cs("cs3");
        assert_eq!(parse("statusIs(coffeeHeater, off)", &config).eval(&config), Ok(true));
        assert_eq!(parse("statusIs(coffeeHeater, on)", &config).eval(&config), Ok(false));
        assert_eq!(parse("phaseIs(coffee, liquid)", &config).eval(&config), Ok(true));
        let cs2 = cs("cs2");
        assert_eq!(parse("phaseIs(coffee, solid)", &cs2).eval(&cs2), Ok(true));
    }

    #[test]
    fn arithmetic_and_abs() {
        let config = cs("cs1");
        let p = parse("abs(temp(coffee) - temp(room)) <= 1/1000", &config);
        assert_eq!(p.eval(&config), Ok(false)); // 50 apart initially
        let q = parse("temp(coffee) - temp(room) = 50", &config);
        assert_eq!(q.eval(&config), Ok(true));
        let r = parse("(temp(coffee) + temp(room)) / 2 = 45", &config);
        assert_eq!(r.eval(&config), Ok(true));
        let s = parse("-temp(coffee) < 0 and 2 * temp(room) = 40", &config);
        assert_eq!(s.eval(&config), Ok(true));
    }

    #[test]
    fn boolean_precedence_not_over_and_over_or() {
        let config = cs("cs1");
        // parses as (not false and false) or true = true
        let p = parse("not false and false or true", &config);
        assert_eq!(p.eval(&config), Ok(true));
        assert_eq!(
            p.to_string(),
            "((not false and false) or true)"
        );
        // parentheses override
        let q = parse("not (false and false) or true", &config);
        assert_eq!(q.to_string(), "(not (false and false) or true)");
    }

    #[test]
    fn division_by_zero_is_reported_not_panicked() {
        let config = cs("cs1");
        let p = parse("1 / (temp(coffee) - 70) = 1", &config);
        assert_eq!(p.eval(&config), Err(EvalError::DivisionByZero));
    }

    #[test]
    fn rational_literals_inside_predicates_are_exact() {
        let config = cs("cs1");
        for text in ["temp(room) = 20", "temp(room) = 40/2", "temp(room) = 20.0"] {
            assert_eq!(parse(text, &config).eval(&config), Ok(true), "{text}");
        }
    }

    #[test]
    fn resolution_errors_carry_columns() {
        let config = cs("cs1");
        let e = parse_predicate("temp(nosuch) = 0", &config).unwrap_err();
        assert_eq!(e.col, 6);
        assert!(e.message.contains("does not exist"));
        let e = parse_predicate("temp(crConduct) = 0", &config).unwrap_err();
        assert!(e.message.contains("not a readable attribute"));
        let e = parse_predicate("heatTrans(coffee) = 0", &config).unwrap_err();
        assert!(e.message.contains("not a readable attribute")); // cs1 coffee is basic
        let e = parse_predicate("phaseIs(coffee, solid)", &config).unwrap_err();
        assert!(e.message.contains("not a water entity"));
        let e = parse_predicate("statusIs(crConduct, on)", &config).unwrap_err();
        assert!(e.message.contains("thermostat"));
        let e = parse_predicate("temp(coffee) >", &config).unwrap_err();
        assert_eq!(e.col, 15);
    }

    #[test]
    fn display_round_trips() {
        let config = cs("cs3");
        for text in [
            "temp(coffee) >= 139/2 and temp(coffee) <= 161/2",
            "abs(temp(coffee) - temp(room)) <= 1/1000",
            "not phaseIs(coffee, gas) or statusIs(coffeeHeater, on)",
            "true and not false",
            "qdot(crConduct) != 0",
            "heatTrans(coffee) >= -5",
            "-(temp(coffee) * 3) + 1/2 < 4 - -2",
            "qdot(coffeeHeater) = 15/10",
        ] {
            let parsed = parse(text, &config);
            let reparsed = parse(&parsed.to_string(), &config);
            assert_eq!(parsed, reparsed, "{text} vs {parsed}");
        }
    }
}
