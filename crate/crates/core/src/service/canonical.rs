//! Canonical SQL text for exact-match scoring, and gold-query categories.
//!
//! Only the flat `SELECT … FROM … WHERE p AND p …` shape the translator emits
//! is canonicalized. Anything else is reported as non-canonicalizable and
//! callers fall back to whitespace-normalized string comparison.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::translate::quote_literal;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanonError {
    #[error("unterminated string literal")]
    UnterminatedString,
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("outside the supported SQL subset: {0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Str(String),
    Num(String),
    Sym(&'static str),
}

fn lex(sql: &str) -> Result<Vec<Tok>, CanonError> {
    let chars: Vec<char> = sql.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '"' || c == '\'' {
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err(CanonError::UnterminatedString),
                    Some('\\') if c == '"' => {
                        let next = chars.get(i + 1).ok_or(CanonError::UnterminatedString)?;
                        s.push(*next);
                        i += 2;
                    }
                    Some(&q) if q == c => {
                        if c == '\'' && chars.get(i + 1) == Some(&'\'') {
                            s.push('\'');
                            i += 2;
                        } else {
                            i += 1;
                            break;
                        }
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            out.push(Tok::Str(s));
        } else if c.is_ascii_digit()
            || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()))
        {
            let start = i;
            i += 1;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            out.push(Tok::Num(chars[start..i].iter().collect()));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || matches!(chars[i], '_' | '.')) {
                i += 1;
            }
            out.push(Tok::Word(chars[start..i].iter().collect()));
        } else {
            let two: String = chars[i..chars.len().min(i + 2)].iter().collect();
            let sym = match two.as_str() {
                ">=" => Some(">="),
                "<=" => Some("<="),
                "<>" | "!=" => Some("<>"),
                _ => None,
            };
            if let Some(s) = sym {
                out.push(Tok::Sym(s));
                i += 2;
                continue;
            }
            let s = match c {
                '(' => "(",
                ')' => ")",
                ',' => ",",
                '*' => "*",
                '=' => "=",
                '<' => "<",
                '>' => ">",
                ';' => ";",
                other => return Err(CanonError::UnexpectedChar(other)),
            };
            out.push(Tok::Sym(s));
            i += 1;
        }
    }
    if out.last() == Some(&Tok::Sym(";")) {
        out.pop();
    }
    Ok(out)
}

fn is_kw(t: Option<&Tok>, kw: &str) -> bool {
    matches!(t, Some(Tok::Word(w)) if w.eq_ignore_ascii_case(kw))
}

const RESERVED: &[&str] = &[
    "select", "from", "where", "and", "or", "not", "in", "group", "order", "by", "having",
    "join", "on", "as", "like", "exists", "limit", "union", "distinct",
];

const AGGREGATES: &[&str] = &["SUM", "COUNT", "AVG", "MIN", "MAX"];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Operand {
    Column(String),
    Literal(String),
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Column(c) => f.write_str(c),
            Operand::Literal(l) => f.write_str(&quote_literal(l)),
        }
    }
}

fn flip(op: &str) -> &'static str {
    match op {
        "<" => ">",
        ">" => "<",
        "<=" => ">=",
        ">=" => "<=",
        "=" => "=",
        _ => "<>",
    }
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn unsupported<T>(&self, what: &str) -> Result<T, CanonError> {
        Err(CanonError::Unsupported(format!("{what} at token {}", self.pos)))
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), CanonError> {
        if is_kw(self.peek(), kw) {
            self.pos += 1;
            Ok(())
        } else {
            self.unsupported(&format!("expected {kw}"))
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), CanonError> {
        if matches!(self.peek(), Some(Tok::Sym(x)) if *x == s) {
            self.pos += 1;
            Ok(())
        } else {
            self.unsupported(&format!("expected `{s}`"))
        }
    }

    fn ident(&mut self) -> Result<String, CanonError> {
        match self.next() {
            Some(Tok::Word(w)) if !RESERVED.contains(&w.to_lowercase().as_str()) => {
                Ok(w.to_lowercase())
            }
            _ => {
                self.pos -= 1;
                self.unsupported("expected identifier")
            }
        }
    }

    fn select(&mut self) -> Result<String, CanonError> {
        if self.peek() == Some(&Tok::Sym("*")) {
            self.pos += 1;
            return Ok("*".into());
        }
        let func = match self.next() {
            Some(Tok::Word(w)) if AGGREGATES.contains(&w.to_uppercase().as_str()) => w.to_uppercase(),
            _ => return self.unsupported("select list"),
        };
        self.expect_sym("(")?;
        let arg = if self.peek() == Some(&Tok::Sym("*")) {
            self.pos += 1;
            "*".to_string()
        } else {
            self.ident()?
        };
        self.expect_sym(")")?;
        Ok(format!("{func}({arg})"))
    }

    fn operand(&mut self) -> Result<Operand, CanonError> {
        match self.peek().cloned() {
            Some(Tok::Str(s)) => {
                self.pos += 1;
                Ok(Operand::Literal(s))
            }
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Operand::Literal(n))
            }
            _ => self.ident().map(Operand::Column),
        }
    }

    fn predicate(&mut self) -> Result<(Operand, &'static str, Operand), CanonError> {
        if self.peek() == Some(&Tok::Sym("(")) {
            self.pos += 1;
            if is_kw(self.peek(), "select") {
                return self.unsupported("nested SELECT");
            }
            let p = self.predicate()?;
            self.expect_sym(")")?;
            return Ok(p);
        }
        let left = self.operand()?;
        let op = match self.next() {
            Some(Tok::Sym(s)) if matches!(s, "=" | "<" | ">" | "<=" | ">=" | "<>") => s,
            _ => {
                self.pos -= 1;
                return self.unsupported("expected comparison operator");
            }
        };
        let right = self.operand()?;
        Ok(match (&left, &right) {
            (Operand::Literal(_), Operand::Column(_)) => (right, flip(op), left),
            (Operand::Column(a), Operand::Column(b)) if b < a => (right, flip(op), left),
            _ => (left, op, right),
        })
    }
}

/// Rewrites column-to-column equalities as, per equivalence class, one
/// equality from the smallest member to each other member. Conjunctions with
/// the same classes are logically equivalent, so this never merges queries
/// that differ in meaning.
fn close_equalities(preds: Vec<(Operand, &'static str, Operand)>) -> Vec<String> {
    let mut classes: Vec<BTreeSet<String>> = Vec::new();
    let mut out = Vec::new();
    for (l, op, r) in preds {
        match (&l, op, &r) {
            (Operand::Column(a), "=", Operand::Column(b)) => {
                let hits: Vec<usize> = (0..classes.len())
                    .filter(|&i| classes[i].contains(a) || classes[i].contains(b))
                    .collect();
                let mut merged: BTreeSet<String> = [a.clone(), b.clone()].into();
                for &i in hits.iter().rev() {
                    merged.extend(classes.remove(i));
                }
                classes.push(merged);
            }
            _ => out.push(format!("{l} {op} {r}")),
        }
    }
    for class in classes {
        let mut it = class.into_iter();
        let root = it.next().expect("classes hold two or more columns");
        out.extend(it.map(|m| format!("{root} = {m}")));
    }
    out
}

/// Canonical text: uppercase keywords, lowercase identifiers, sorted FROM
/// tables, column equalities closed into classes, literals double-quoted and
/// conjuncts sorted and parenthesized.
pub fn canonicalize_sql(sql: &str) -> Result<String, CanonError> {
    let mut p = Parser {
        toks: lex(sql)?,
        pos: 0,
    };
    p.expect_kw("select")?;
    let select = p.select()?;
    p.expect_kw("from")?;
    let mut from = vec![p.ident()?];
    while p.peek() == Some(&Tok::Sym(",")) {
        p.pos += 1;
        from.push(p.ident()?);
    }
    let mut conj = Vec::new();
    if is_kw(p.peek(), "where") {
        p.pos += 1;
        conj.push(p.predicate()?);
        while is_kw(p.peek(), "and") {
            p.pos += 1;
            conj.push(p.predicate()?);
        }
    }
    if p.peek().is_some() {
        return p.unsupported("trailing input");
    }
    from.sort();
    from.dedup();
    let mut conj = close_equalities(conj);
    conj.sort();
    conj.dedup();
    let mut out = format!("SELECT {select} FROM {}", from.join(", "));
    if !conj.is_empty() {
        let parts: Vec<String> = conj.iter().map(|c| format!("({c})")).collect();
        out.push_str(" WHERE ");
        out.push_str(&parts.join(" AND "));
    }
    Ok(out)
}

/// Canonical forms when both sides canonicalize, whitespace-collapsed raw
/// text otherwise.
pub fn sql_matches(predicted: &str, gold: &str) -> bool {
    match (canonicalize_sql(predicted), canonicalize_sql(gold)) {
        (Ok(a), Ok(b)) => a == b,
        _ => collapse_ws(predicted) == collapse_ws(gold),
    }
}

fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Category {
    SingleTable,
    MultiTable,
    Aggregate,
    Nested,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::SingleTable,
        Category::MultiTable,
        Category::Aggregate,
        Category::Nested,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::SingleTable => "SINGLE_TABLE",
            Category::MultiTable => "MULTI_TABLE",
            Category::Aggregate => "AGGREGATE",
            Category::Nested => "NESTED",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classifies gold SQL by the first rule that applies: a parenthesized
/// sub-SELECT, an aggregate in the select list, a single FROM table.
pub fn categorize_gold_sql(sql: &str) -> Result<Category, CanonError> {
    let toks = lex(sql)?;
    let sel = toks
        .iter()
        .position(|t| is_kw(Some(t), "select"))
        .ok_or_else(|| CanonError::Unsupported("no SELECT".into()))?;
    let nested = toks[sel + 1..]
        .windows(2)
        .any(|w| w[0] == Tok::Sym("(") && is_kw(Some(&w[1]), "select"));
    if nested {
        return Ok(Category::Nested);
    }
    let from = toks
        .iter()
        .position(|t| is_kw(Some(t), "from"))
        .filter(|&f| f > sel)
        .ok_or_else(|| CanonError::Unsupported("no FROM after SELECT".into()))?;
    let aggregate = toks[sel + 1..from].iter().any(|t| match t {
        Tok::Word(w) => AGGREGATES.contains(&w.to_uppercase().as_str()),
        _ => false,
    });
    if aggregate {
        return Ok(Category::Aggregate);
    }
    let end = toks[from + 1..]
        .iter()
        .position(|t| matches!(t, Tok::Word(w) if RESERVED.contains(&w.to_lowercase().as_str())))
        .map_or(toks.len(), |p| from + 1 + p);
    let tables = toks[from + 1..end].iter().filter(|t| matches!(t, Tok::Word(_))).count();
    match tables {
        0 => Err(CanonError::Unsupported("empty FROM".into())),
        1 => Ok(Category::SingleTable),
        _ => Ok(Category::MultiTable),
    }
}
