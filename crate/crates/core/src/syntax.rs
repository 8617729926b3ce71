// SPDX-License-Identifier: Apache-2.0

//! Formulas, sequents and the text DSL.
//!
//! The DSL uses ASCII spellings: `&` meet, `|` join, `.` product, `\` and `/`
//! residuals, postfix `*` star, the constants `0` and `1`, and `|-` as the
//! turnstile. Star binds tightest, then product (left associative), then
//! meet/join (left associative, mixed chains allowed), and finally the
//! residuals, which do not associate: `a \ b \ c` is rejected.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// A term over `{&, |, ., \, /, *, 0, 1}` with propositional variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Var(String),
    Zero,
    One,
    Meet(Box<Formula>, Box<Formula>),
    Join(Box<Formula>, Box<Formula>),
    Prod(Box<Formula>, Box<Formula>),
    /// `l \ r`
    LRes(Box<Formula>, Box<Formula>),
    /// `l / r`
    RRes(Box<Formula>, Box<Formula>),
    Star(Box<Formula>),
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Formula {
        Formula::Var(name.into())
    }

    pub fn meet(l: Formula, r: Formula) -> Formula {
        Formula::Meet(Box::new(l), Box::new(r))
    }

    pub fn join(l: Formula, r: Formula) -> Formula {
        Formula::Join(Box::new(l), Box::new(r))
    }

    pub fn prod(l: Formula, r: Formula) -> Formula {
        Formula::Prod(Box::new(l), Box::new(r))
    }

    pub fn lres(l: Formula, r: Formula) -> Formula {
        Formula::LRes(Box::new(l), Box::new(r))
    }

    pub fn rres(l: Formula, r: Formula) -> Formula {
        Formula::RRes(Box::new(l), Box::new(r))
    }

    pub fn star(body: Formula) -> Formula {
        Formula::Star(Box::new(body))
    }

    /// Node count.
    pub fn size(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Zero | Formula::One => 1,
            Formula::Star(b) => 1 + b.size(),
            Formula::Meet(l, r)
            | Formula::Join(l, r)
            | Formula::Prod(l, r)
            | Formula::LRes(l, r)
            | Formula::RRes(l, r) => 1 + l.size() + r.size(),
        }
    }

    /// Maximal nesting of `*`.
    pub fn star_depth(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Zero | Formula::One => 0,
            Formula::Star(b) => 1 + b.star_depth(),
            Formula::Meet(l, r)
            | Formula::Join(l, r)
            | Formula::Prod(l, r)
            | Formula::LRes(l, r)
            | Formula::RRes(l, r) => l.star_depth().max(r.star_depth()),
        }
    }

    /// The body `α` if this formula is `α*`.
    pub fn star_body(&self) -> Option<&Formula> {
        match self {
            Formula::Star(b) => Some(b),
            _ => None,
        }
    }

    pub fn is_star(&self) -> bool {
        matches!(self, Formula::Star(_))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Formula::Var(_))
    }

    /// Variables in order of first occurrence (left to right).
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Formula::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Formula::Zero | Formula::One => {}
            Formula::Star(b) => b.collect_vars(out),
            Formula::Meet(l, r)
            | Formula::Join(l, r)
            | Formula::Prod(l, r)
            | Formula::LRes(l, r)
            | Formula::RRes(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    /// All subformulas, including `self`, without duplicates.
    pub fn subformulas(&self) -> Vec<Formula> {
        let mut out = Vec::new();
        self.collect_subformulas(&mut out);
        out
    }

    fn collect_subformulas(&self, out: &mut Vec<Formula>) {
        if !out.contains(self) {
            out.push(self.clone());
        }
        match self {
            Formula::Var(_) | Formula::Zero | Formula::One => {}
            Formula::Star(b) => b.collect_subformulas(out),
            Formula::Meet(l, r)
            | Formula::Join(l, r)
            | Formula::Prod(l, r)
            | Formula::LRes(l, r)
            | Formula::RRes(l, r) => {
                l.collect_subformulas(out);
                r.collect_subformulas(out);
            }
        }
    }

    /// Rename variables through `map`; unmapped variables are kept.
    pub fn rename(&self, map: &dyn Fn(&str) -> Option<String>) -> Formula {
        match self {
            Formula::Var(v) => Formula::Var(map(v).unwrap_or_else(|| v.clone())),
            Formula::Zero => Formula::Zero,
            Formula::One => Formula::One,
            Formula::Star(b) => Formula::star(b.rename(map)),
            Formula::Meet(l, r) => Formula::meet(l.rename(map), r.rename(map)),
            Formula::Join(l, r) => Formula::join(l.rename(map), r.rename(map)),
            Formula::Prod(l, r) => Formula::prod(l.rename(map), r.rename(map)),
            Formula::LRes(l, r) => Formula::lres(l.rename(map), r.rename(map)),
            Formula::RRes(l, r) => Formula::rres(l.rename(map), r.rename(map)),
        }
    }
}

/// `α^(n)`: the sequence of `n` copies of `α`.
pub fn power_seq(alpha: &Formula, n: usize) -> Vec<Formula> {
    vec![alpha.clone(); n]
}

/// `α^n` as a single formula: `α^0 = 1` and `α^n = α . α^(n-1)`.
pub fn power_formula(alpha: &Formula, n: usize) -> Formula {
    let mut acc = Formula::One;
    for _ in 0..n {
        acc = Formula::prod(alpha.clone(), acc);
    }
    acc
}

/// Left-nested product of a nonempty list; `1` for the empty list.
pub fn product_of(items: &[Formula]) -> Formula {
    let mut it = items.iter();
    match it.next() {
        None => Formula::One,
        Some(first) => it.fold(first.clone(), |acc, f| Formula::prod(acc, f.clone())),
    }
}

/// Left-nested join of a nonempty list.
pub fn join_of(items: &[Formula]) -> Option<Formula> {
    let mut it = items.iter();
    let first = it.next()?.clone();
    Some(it.fold(first, |acc, f| Formula::join(acc, f.clone())))
}

/// A formula occurrence of a sequent: an antecedent index or the succedent
/// (index `-1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OccurrencePos {
    Succ,
    Ante(usize),
}

impl OccurrencePos {
    pub fn index(self) -> i64 {
        match self {
            OccurrencePos::Succ => -1,
            OccurrencePos::Ante(i) => i as i64,
        }
    }

    pub fn from_index(i: i64) -> Option<OccurrencePos> {
        match i {
            -1 => Some(OccurrencePos::Succ),
            i if i >= 0 => Some(OccurrencePos::Ante(i as usize)),
            _ => None,
        }
    }

    pub fn ante(self) -> Option<usize> {
        match self {
            OccurrencePos::Ante(i) => Some(i),
            OccurrencePos::Succ => None,
        }
    }
}

impl fmt::Display for OccurrencePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// `Γ ⇒ β`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequent {
    pub antecedent: Vec<Formula>,
    pub succedent: Formula,
}

impl Sequent {
    pub fn new(antecedent: Vec<Formula>, succedent: Formula) -> Sequent {
        Sequent {
            antecedent,
            succedent,
        }
    }

    /// `|S|`, the antecedent length.
    pub fn len(&self) -> usize {
        self.antecedent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.antecedent.is_empty()
    }

    pub fn get(&self, pos: OccurrencePos) -> Option<&Formula> {
        match pos {
            OccurrencePos::Succ => Some(&self.succedent),
            OccurrencePos::Ante(i) => self.antecedent.get(i),
        }
    }

    /// All occurrences: the succedent first, then the antecedent in order.
    pub fn positions(&self) -> impl Iterator<Item = OccurrencePos> {
        std::iter::once(OccurrencePos::Succ).chain((0..self.len()).map(OccurrencePos::Ante))
    }

    pub fn vars(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for f in self.antecedent.iter().chain(std::iter::once(&self.succedent)) {
            for v in f.vars() {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Res,
    Sum,
    Prod,
    Star,
    Atom,
}

fn level(f: &Formula) -> Level {
    match f {
        Formula::Var(_) | Formula::Zero | Formula::One => Level::Atom,
        Formula::Star(_) => Level::Star,
        Formula::Prod(..) => Level::Prod,
        Formula::Meet(..) | Formula::Join(..) => Level::Sum,
        Formula::LRes(..) | Formula::RRes(..) => Level::Res,
    }
}

fn write_formula(out: &mut String, f: &Formula, min: Level, compact: bool) {
    if level(f) < min {
        out.push('(');
        write_formula(out, f, Level::Res, compact);
        out.push(')');
        return;
    }
    let op = |out: &mut String, s: &str| {
        if compact {
            out.push_str(s);
        } else {
            out.push(' ');
            out.push_str(s);
            out.push(' ');
        }
    };
    match f {
        Formula::Var(v) => out.push_str(v),
        Formula::Zero => out.push('0'),
        Formula::One => out.push('1'),
        Formula::Star(b) => {
            write_formula(out, b, Level::Star, compact);
            out.push('*');
        }
        Formula::Prod(l, r) => {
            write_formula(out, l, Level::Prod, compact);
            op(out, ".");
            write_formula(out, r, Level::Star, compact);
        }
        Formula::Meet(l, r) | Formula::Join(l, r) => {
            write_formula(out, l, Level::Sum, compact);
            op(out, if matches!(f, Formula::Meet(..)) { "&" } else { "|" });
            write_formula(out, r, Level::Prod, compact);
        }
        Formula::LRes(l, r) | Formula::RRes(l, r) => {
            write_formula(out, l, Level::Sum, compact);
            op(out, if matches!(f, Formula::LRes(..)) { "\\" } else { "/" });
            write_formula(out, r, Level::Sum, compact);
        }
    }
}

/// Minimal-parenthesis rendering with spaces around binary operators.
pub fn print_formula(f: &Formula) -> String {
    let mut s = String::new();
    write_formula(&mut s, f, Level::Res, false);
    s
}

/// Same as [`print_formula`] without spaces, e.g. `z.x.w`.
pub fn print_formula_compact(f: &Formula) -> String {
    let mut s = String::new();
    write_formula(&mut s, f, Level::Res, true);
    s
}

pub fn print_sequent(s: &Sequent) -> String {
    let lhs: Vec<String> = s.antecedent.iter().map(print_formula).collect();
    if lhs.is_empty() {
        format!("|- {}", print_formula(&s.succedent))
    } else {
        format!("{} |- {}", lhs.join(", "), print_formula(&s.succedent))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_sequent(self))
    }
}

// ---------------------------------------------------------------------------
// Lexing and parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: unexpected {found}, expected one of: {}", expected.join(", "))]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub found: String,
    pub expected: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Zero,
    One,
    LParen,
    RParen,
    Amp,
    Bar,
    Dot,
    Backslash,
    Slash,
    Star,
    Comma,
    Turnstile,
    Le,
    Implies,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Zero => "`0`".into(),
            Tok::One => "`1`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Backslash => "`\\`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Star => "`*`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Turnstile => "`|-`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Implies => "`=>`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub(crate) fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let mut push = |tok: Tok, width: usize, i: &mut usize, col: &mut usize| {
            out.push(Token {
                tok,
                line: tl,
                col: tc,
            });
            *i += width;
            *col += width;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            '&' => push(Tok::Amp, 1, &mut i, &mut col),
            '|' if chars.get(i + 1) == Some(&'-') => push(Tok::Turnstile, 2, &mut i, &mut col),
            '|' => push(Tok::Bar, 1, &mut i, &mut col),
            '.' => push(Tok::Dot, 1, &mut i, &mut col),
            '\\' => push(Tok::Backslash, 1, &mut i, &mut col),
            '/' => push(Tok::Slash, 1, &mut i, &mut col),
            '*' => push(Tok::Star, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            '<' if chars.get(i + 1) == Some(&'=') => push(Tok::Le, 2, &mut i, &mut col),
            '=' if chars.get(i + 1) == Some(&'>') => push(Tok::Implies, 2, &mut i, &mut col),
            '0' | '1' if !chars.get(i + 1).is_some_and(|d| d.is_ascii_alphanumeric()) => {
                push(if c == '0' { Tok::Zero } else { Tok::One }, 1, &mut i, &mut col)
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                col += i - start;
                out.push(Token {
                    tok: Tok::Ident(name),
                    line: tl,
                    col: tc,
                });
            }
            other => {
                return Err(ParseError {
                    line,
                    col,
                    found: format!("character `{other}`"),
                    expected: vec!["formula".into()],
                })
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub(crate) fn new(text: &str) -> Result<Parser, ParseError> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
        })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub(crate) fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn error(&self, expected: &[&str]) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError {
            line: t.line,
            col: t.col,
            found: t.tok.describe(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub(crate) fn expect(&mut self, tok: Tok, name: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[name]))
        }
    }

    pub(crate) fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub(crate) fn formula(&mut self) -> Result<Formula, ParseError> {
        self.residual(true)
    }

    /// A formula with no top-level `&`: the right side of an inequation in a
    /// conjunction of inequations. Meets may still appear in parentheses.
    pub(crate) fn bound(&mut self) -> Result<Formula, ParseError> {
        self.residual(false)
    }

    fn residual(&mut self, meets: bool) -> Result<Formula, ParseError> {
        let lhs = self.sum(meets)?;
        match self.peek() {
            Tok::Backslash => {
                self.bump();
                let rhs = self.sum(meets)?;
                self.no_chained_residual()?;
                Ok(Formula::lres(lhs, rhs))
            }
            Tok::Slash => {
                self.bump();
                let rhs = self.sum(meets)?;
                self.no_chained_residual()?;
                Ok(Formula::rres(lhs, rhs))
            }
            _ => Ok(lhs),
        }
    }

    fn no_chained_residual(&self) -> Result<(), ParseError> {
        if matches!(self.peek(), Tok::Backslash | Tok::Slash) {
            Err(self.error(&["`)`", "`,`", "`|-`", "end of input"]))
        } else {
            Ok(())
        }
    }

    fn sum(&mut self, meets: bool) -> Result<Formula, ParseError> {
        let mut acc = self.prod()?;
        loop {
            match self.peek() {
                Tok::Amp if meets => {
                    self.bump();
                    acc = Formula::meet(acc, self.prod()?);
                }
                Tok::Bar => {
                    self.bump();
                    acc = Formula::join(acc, self.prod()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn prod(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.star()?;
        while *self.peek() == Tok::Dot {
            self.bump();
            acc = Formula::prod(acc, self.star()?);
        }
        Ok(acc)
    }

    fn star(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.atom()?;
        while *self.peek() == Tok::Star {
            self.bump();
            acc = Formula::star(acc);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(Formula::Var(name))
            }
            Tok::Zero => {
                self.bump();
                Ok(Formula::Zero)
            }
            Tok::One => {
                self.bump();
                Ok(Formula::One)
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            _ => Err(self.error(&["identifier", "`0`", "`1`", "`(`"])),
        }
    }

    pub(crate) fn sequent(&mut self) -> Result<Sequent, ParseError> {
        let mut ante = Vec::new();
        if *self.peek() != Tok::Turnstile {
            ante.push(self.formula()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                ante.push(self.formula()?);
            }
        }
        if *self.peek() != Tok::Turnstile {
            return Err(self.error(&["`,`", "`|-`"]));
        }
        self.bump();
        let succ = self.formula()?;
        Ok(Sequent::new(ante, succ))
    }

    pub(crate) fn finish(&self) -> Result<(), ParseError> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_sequent(text: &str) -> Result<Sequent, ParseError> {
    let mut p = Parser::new(text)?;
    let s = p.sequent()?;
    p.finish()?;
    Ok(s)
}

/// Parse a corpus file: one sequent per line, `#` comments, blank lines
/// ignored. Line numbers in errors refer to the file.
pub fn parse_sequent_list(text: &str) -> Result<Vec<Sequent>, ParseError> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let s = parse_sequent(body).map_err(|mut e| {
            e.line = lineno + 1;
            e
        })?;
        out.push(s);
    }
    Ok(out)
}

impl FromStr for Formula {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

impl FromStr for Sequent {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_sequent(s)
    }
}

/// Shorthand used throughout the tests and the corpus: panics on bad input.
pub fn f(text: &str) -> Formula {
    parse_formula(text).unwrap_or_else(|e| panic!("bad formula {text:?}: {e}"))
}

/// Shorthand for sequents; panics on bad input.
pub fn seq(text: &str) -> Sequent {
    parse_sequent(text).unwrap_or_else(|e| panic!("bad sequent {text:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Formula {
        Formula::var(s)
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_formula("a").unwrap(), v("a"));
        assert_eq!(
            parse_formula("a . a*").unwrap(),
            Formula::prod(v("a"), Formula::star(v("a")))
        );
        assert_eq!(
            parse_formula("a \\ b . c*").unwrap(),
            Formula::lres(v("a"), Formula::prod(v("b"), Formula::star(v("c"))))
        );
        assert_eq!(parse_formula("a**").unwrap(), Formula::star(Formula::star(v("a"))));
    }

    #[test]
    fn mixed_lattice_chain_associates_left() {
        assert_eq!(
            parse_formula("a & b | c").unwrap(),
            Formula::join(Formula::meet(v("a"), v("b")), v("c"))
        );
    }

    #[test]
    fn chained_residuals_rejected() {
        let err = parse_formula("a \\ b \\ c").unwrap_err();
        assert_eq!((err.line, err.col), (1, 7));
        assert!(parse_formula("(a \\ b) \\ c").is_ok());
    }

    #[test]
    fn error_positions() {
        let err = parse_formula("a .\n  (b |").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.expected.iter().any(|e| e == "identifier"));
        assert!(parse_formula("a $").is_err());
        assert!(parse_formula("").is_err());
        assert!(parse_formula("a)").is_err());
    }

    #[test]
    fn print_examples() {
        assert_eq!(print_formula(&v("a")), "a");
        assert_eq!(
            print_formula(&Formula::star(Formula::prod(v("a"), v("b")))),
            "(a . b)*"
        );
        assert_eq!(
            print_formula(&Formula::lres(v("a"), Formula::join(v("b"), v("c")))),
            "a \\ b | c"
        );
        assert_eq!(
            print_formula(&Formula::prod(v("a"), Formula::prod(v("b"), v("c")))),
            "a . (b . c)"
        );
        assert_eq!(
            print_formula_compact(&Formula::prod(Formula::prod(v("z"), v("x")), v("w"))),
            "z.x.w"
        );
    }

    #[test]
    fn sequent_examples() {
        assert_eq!(
            parse_sequent("a, b |- a . b").unwrap(),
            Sequent::new(vec![v("a"), v("b")], Formula::prod(v("a"), v("b")))
        );
        assert_eq!(parse_sequent("|- 1").unwrap(), Sequent::new(vec![], Formula::One));
        assert_eq!(print_sequent(&parse_sequent("a*, b |- c").unwrap()), "a*, b |- c");
        assert_eq!(print_sequent(&parse_sequent("|-1").unwrap()), "|- 1");
        assert!(parse_sequent("a, |- b").is_err());
        assert!(parse_sequent("a b").is_err());
    }

    #[test]
    fn corpus_lines() {
        let text = "# header\na |- a\n\n  a*, a* |- a*  # two stars\n";
        let list = parse_sequent_list(text).unwrap();
        assert_eq!(list.len(), 2);
        let err = parse_sequent_list("a |- a\nb |-\n").unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn powers() {
        assert!(power_seq(&v("a"), 0).is_empty());
        assert_eq!(power_seq(&v("a"), 2), vec![v("a"), v("a")]);
        assert_eq!(power_seq(&f("a*"), 1), vec![f("a*")]);
        assert_eq!(power_formula(&v("a"), 0), Formula::One);
        assert_eq!(power_formula(&v("a"), 1), Formula::prod(v("a"), Formula::One));
        assert_eq!(
            power_formula(&v("a"), 2),
            Formula::prod(v("a"), Formula::prod(v("a"), Formula::One))
        );
    }

    #[test]
    fn occurrences() {
        let s = seq("a, b* |- c");
        assert_eq!(s.get(OccurrencePos::Succ), Some(&v("c")));
        assert_eq!(s.get(OccurrencePos::Ante(1)), Some(&f("b*")));
        assert_eq!(s.get(OccurrencePos::Ante(2)), None);
        assert_eq!(s.positions().count(), 3);
        assert_eq!(OccurrencePos::from_index(-1), Some(OccurrencePos::Succ));
        assert_eq!(OccurrencePos::from_index(-2), None);
        assert_eq!(OccurrencePos::Ante(3).index(), 3);
    }

    #[test]
    fn measures() {
        let x = f("(a . b*)* & c");
        assert_eq!(x.size(), 7);
        assert_eq!(x.star_depth(), 2);
        assert_eq!(x.vars(), vec!["a", "b", "c"]);
    }
}
