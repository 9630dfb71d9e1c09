//! Deterministic parser and printer for the ontology, query, and
//! interpretation formats.
//!
//! Both formats are line-oriented with `%` comments. Parsing resolves names
//! against declarations seen earlier in the document; printing is canonical
//! (single spaces, declarations before axioms, axioms in input order), so
//! `parse ∘ print` is the identity on ASTs and `print ∘ parse` is the
//! identity on canonical documents.

use std::fmt;

use num_rational::Rational64;
use thiserror::Error;

use crate::chain::{Chain, Degree, Family};
use crate::model::{
    Axiom, ClassicalOntology, Cmp, ConceptAssertion, ConceptExpr, FuzzyOntology, Gci, IndId, Ria,
    RoleAssertion, RoleExpr, Signature,
};
use crate::oracle::Interp;
use crate::queries::{
    AtomKind, ClassicalCq, FuzzyCq, Query, QueryVars, ScoreExpr, ScoringQuery, Term, ThresholdAtom,
    ThresholdCq, Ucq,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

fn err<T>(line: usize, col: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        col,
        msg: msg.into(),
    })
}

const RESERVED: &[&str] = &[
    "top",
    "bot",
    "not",
    "and",
    "or",
    "some",
    "all",
    "nominal",
    "atleast",
    "atmost",
    "atleastq",
    "atmostq",
    "self",
    "inv",
    "U",
    "chain",
    "concept",
    "role",
    "individual",
    "assert",
    "eq",
    "neq",
    "gci",
    "ria",
    "trans",
    "dis",
    "ref",
    "irr",
    "sym",
    "asy",
    "rdisj",
    "table",
    "union",
    "score",
    "threshold",
    "fuzzy",
    "scoring",
    "ucq",
    "elem",
    "ind",
    "crisp",
    "min",
    "max",
    "goedel",
    "lukasiewicz",
    "zadeh",
    "custom",
];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Var(String),
    AtRef(u32),
    Num(String),
    LParen,
    RParen,
    Comma,
    Slash,
    Arrow,
    Geq,
    Leq,
    Gt,
    Lt,
    EqEq,
    Assign,
    Colon,
    Plus,
    Star,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Var(s) => write!(f, "'?{s}'"),
            Tok::AtRef(i) => write!(f, "'@{i}'"),
            Tok::Num(s) => write!(f, "'{s}'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::Comma => write!(f, "','"),
            Tok::Slash => write!(f, "'/'"),
            Tok::Arrow => write!(f, "'->'"),
            Tok::Geq => write!(f, "'>='"),
            Tok::Leq => write!(f, "'<='"),
            Tok::Gt => write!(f, "'>'"),
            Tok::Lt => write!(f, "'<'"),
            Tok::EqEq => write!(f, "'=='"),
            Tok::Assign => write!(f, "'='"),
            Tok::Colon => write!(f, "':'"),
            Tok::Plus => write!(f, "'+'"),
            Tok::Star => write!(f, "'*'"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    col: usize,
}

struct Line {
    no: usize,
    toks: Vec<Spanned>,
}

fn lex(text: &str) -> Result<Vec<Line>, ParseError> {
    let mut lines = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let no = li + 1;
        let content = match raw.find('%') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let bytes = content.as_bytes();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            let col = i + 1;
            match c {
                ' ' | '\t' | '\r' => {
                    i += 1;
                }
                '(' => {
                    toks.push(Spanned {
                        tok: Tok::LParen,
                        col,
                    });
                    i += 1;
                }
                ')' => {
                    toks.push(Spanned {
                        tok: Tok::RParen,
                        col,
                    });
                    i += 1;
                }
                ',' => {
                    toks.push(Spanned { tok: Tok::Comma, col });
                    i += 1;
                }
                '/' => {
                    toks.push(Spanned { tok: Tok::Slash, col });
                    i += 1;
                }
                '+' => {
                    toks.push(Spanned { tok: Tok::Plus, col });
                    i += 1;
                }
                '*' => {
                    toks.push(Spanned { tok: Tok::Star, col });
                    i += 1;
                }
                ':' => {
                    toks.push(Spanned { tok: Tok::Colon, col });
                    i += 1;
                }
                '-' => {
                    if bytes.get(i + 1) == Some(&b'>') {
                        toks.push(Spanned { tok: Tok::Arrow, col });
                        i += 2;
                    } else {
                        return err(no, col, "unexpected '-'");
                    }
                }
                '>' => {
                    if bytes.get(i + 1) == Some(&b'=') {
                        toks.push(Spanned { tok: Tok::Geq, col });
                        i += 2;
                    } else {
                        toks.push(Spanned { tok: Tok::Gt, col });
                        i += 1;
                    }
                }
                '<' => {
                    if bytes.get(i + 1) == Some(&b'=') {
                        toks.push(Spanned { tok: Tok::Leq, col });
                        i += 2;
                    } else {
                        toks.push(Spanned { tok: Tok::Lt, col });
                        i += 1;
                    }
                }
                '=' => {
                    if bytes.get(i + 1) == Some(&b'=') {
                        toks.push(Spanned { tok: Tok::EqEq, col });
                        i += 2;
                    } else {
                        toks.push(Spanned {
                            tok: Tok::Assign,
                            col,
                        });
                        i += 1;
                    }
                }
                '?' => {
                    let start = i + 1;
                    let mut j = start;
                    while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                        j += 1;
                    }
                    if j == start {
                        return err(no, col, "expected variable name after '?'");
                    }
                    toks.push(Spanned {
                        tok: Tok::Var(content[start..j].to_string()),
                        col,
                    });
                    i = j;
                }
                '@' => {
                    let start = i + 1;
                    let mut j = start;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    if j == start {
                        return err(no, col, "expected atom index after '@'");
                    }
                    let idx: u32 = content[start..j].parse().map_err(|_| ParseError {
                        line: no,
                        col,
                        msg: "bad atom index".into(),
                    })?;
                    toks.push(Spanned {
                        tok: Tok::AtRef(idx),
                        col,
                    });
                    i = j;
                }
                '0'..='9' => {
                    let start = i;
                    let mut j = i;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j] == b'.' {
                        j += 1;
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                    }
                    toks.push(Spanned {
                        tok: Tok::Num(content[start..j].to_string()),
                        col,
                    });
                    i = j;
                }
                _ if c.is_ascii_alphabetic() || c == '_' || c == '#' => {
                    let start = i;
                    let mut j = i + 1;
                    while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                        j += 1;
                    }
                    toks.push(Spanned {
                        tok: Tok::Ident(content[start..j].to_string()),
                        col,
                    });
                    i = j;
                }
                _ => return err(no, col, format!("unexpected character '{c}'")),
            }
        }
        if !toks.is_empty() {
            lines.push(Line { no, toks });
        }
    }
    Ok(lines)
}

struct Cur<'a> {
    toks: &'a [Spanned],
    pos: usize,
    line: usize,
}

impl<'a> Cur<'a> {
    fn new(line: &'a Line) -> Cur<'a> {
        Cur {
            toks: &line.toks,
            pos: 0,
            line: line.no,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek_at(&self, off: usize) -> Option<&Tok> {
        self.toks.get(self.pos + off).map(|s| &s.tok)
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|s| s.col)
            .unwrap_or(1)
    }

    fn next(&mut self) -> Result<&'a Spanned, ParseError> {
        match self.toks.get(self.pos) {
            Some(s) => {
                self.pos += 1;
                Ok(s)
            }
            None => err(self.line, self.col(), "unexpected end of line"),
        }
    }

    fn expect(&mut self, want: &Tok) -> Result<(), ParseError> {
        let (line, col) = (self.line, self.col());
        match self.toks.get(self.pos) {
            Some(s) if &s.tok == want => {
                self.pos += 1;
                Ok(())
            }
            Some(s) => err(line, col, format!("expected {want}, found {}", s.tok)),
            None => err(line, col, format!("expected {want} at end of line")),
        }
    }

    fn ident(&mut self) -> Result<(String, usize), ParseError> {
        let (line, col) = (self.line, self.col());
        match self.next()? {
            Spanned {
                tok: Tok::Ident(s),
                col,
                ..
            } => Ok((s.clone(), *col)),
            s => err(line, col, format!("expected a name, found {}", s.tok)),
        }
    }

    fn integer(&mut self) -> Result<u32, ParseError> {
        let (line, col) = (self.line, self.col());
        match self.next()? {
            Spanned { tok: Tok::Num(s), .. } if !s.contains('.') => s.parse().map_err(|_| ParseError {
                line,
                col,
                msg: "integer out of range".into(),
            }),
            s => err(line, col, format!("expected an integer, found {}", s.tok)),
        }
    }

    fn finished(&self) -> Result<(), ParseError> {
        match self.toks.get(self.pos) {
            None => Ok(()),
            Some(s) => err(self.line, s.col, format!("unexpected trailing {}", s.tok)),
        }
    }

    fn rational(&mut self) -> Result<(i64, i64), ParseError> {
        let (line, col) = (self.line, self.col());
        let first = match self.next()? {
            Spanned { tok: Tok::Num(s), .. } => s.clone(),
            s => return err(line, col, format!("expected a number, found {}", s.tok)),
        };
        let (mut num, mut den) = decimal_to_rational(&first).ok_or_else(|| ParseError {
            line,
            col,
            msg: format!("bad number '{first}'"),
        })?;
        // Only a following integer makes the slash part of the literal; in
        // nominal entries it separates the degree from the individual.
        let fraction = self.peek() == Some(&Tok::Slash)
            && matches!(self.peek_at(1), Some(Tok::Num(s)) if !s.contains('.'));
        if fraction {
            self.next()?;
            let (l2, c2) = (self.line, self.col());
            let second = match self.next()? {
                Spanned { tok: Tok::Num(s), .. } if !s.contains('.') => s.clone(),
                s => {
                    return err(
                        l2,
                        c2,
                        format!("expected an integer denominator, found {}", s.tok),
                    )
                }
            };
            let d: i64 = second.parse().map_err(|_| ParseError {
                line: l2,
                col: c2,
                msg: "denominator out of range".into(),
            })?;
            if d == 0 {
                return err(l2, c2, "denominator must be nonzero");
            }
            if den != 1 {
                return err(l2, c2, "mixed decimal and fraction notation");
            }
            den = d;
        }
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1) as i64;
        num /= g;
        den /= g;
        Ok((num, den))
    }

    fn degree(&mut self, chain: &Chain) -> Result<Degree, ParseError> {
        let (line, col) = (self.line, self.col());
        let (num, den) = self.rational()?;
        let scaled = num * i64::from(chain.size() - 1);
        if num < 0 || scaled % den != 0 {
            return err(
                line,
                col,
                format!("degree {num}/{den} not on chain of {}", chain.size()),
            );
        }
        let idx = scaled / den;
        if idx < 0 || idx >= i64::from(chain.size()) {
            return err(
                line,
                col,
                format!("degree {num}/{den} not on chain of {}", chain.size()),
            );
        }
        Ok(Degree(idx as u32))
    }

    fn cmp(&mut self) -> Result<Cmp, ParseError> {
        let (line, col) = (self.line, self.col());
        match self.next()?.tok {
            Tok::Geq => Ok(Cmp::Geq),
            Tok::Gt => Ok(Cmp::Gt),
            Tok::Leq => Ok(Cmp::Leq),
            Tok::Lt => Ok(Cmp::Lt),
            ref t => err(line, col, format!("expected a comparison, found {t}")),
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn decimal_to_rational(s: &str) -> Option<(i64, i64)> {
    match s.split_once('.') {
        None => s.parse().ok().map(|n: i64| (n, 1)),
        Some((int, frac)) => {
            if frac.is_empty() || frac.len() > 12 {
                return None;
            }
            let scale = 10i64.checked_pow(frac.len() as u32)?;
            let i: i64 = if int.is_empty() { 0 } else { int.parse().ok()? };
            let f: i64 = frac.parse().ok()?;
            Some((i.checked_mul(scale)?.checked_add(f)?, scale))
        }
    }
}

// ---------------------------------------------------------------------------
// Ontology parsing

struct OntoParser {
    onto: FuzzyOntology,
}

impl OntoParser {
    fn lookup_concept(&self, name: &str, line: usize, col: usize) -> Result<ConceptExpr, ParseError> {
        match self.onto.sig.concepts.lookup(name) {
            Some(id) => Ok(ConceptExpr::Name(crate::model::ConceptId(id))),
            None => err(line, col, format!("unknown concept name '{name}'")),
        }
    }

    fn lookup_role(
        &self,
        name: &str,
        line: usize,
        col: usize,
    ) -> Result<crate::model::RoleId, ParseError> {
        match self.onto.sig.roles.lookup(name) {
            Some(id) => Ok(crate::model::RoleId(id)),
            None => err(line, col, format!("unknown role name '{name}'")),
        }
    }

    fn lookup_ind(&self, name: &str, line: usize, col: usize) -> Result<IndId, ParseError> {
        match self.onto.sig.inds.lookup(name) {
            Some(id) => Ok(IndId(id)),
            None => err(line, col, format!("unknown individual name '{name}'")),
        }
    }

    fn parse_role(&self, cur: &mut Cur) -> Result<RoleExpr, ParseError> {
        let (name, col) = cur.ident()?;
        match name.as_str() {
            "inv" => {
                cur.expect(&Tok::LParen)?;
                let (inner, icol) = cur.ident()?;
                let id = self.lookup_role(&inner, cur.line, icol)?;
                cur.expect(&Tok::RParen)?;
                Ok(RoleExpr::Inverse(id))
            }
            "U" => Ok(RoleExpr::Universal),
            _ => Ok(RoleExpr::Name(self.lookup_role(&name, cur.line, col)?)),
        }
    }

    fn parse_concept(&self, cur: &mut Cur) -> Result<ConceptExpr, ParseError> {
        let (name, col) = cur.ident()?;
        let kw = name.as_str();
        match kw {
            "top" => Ok(ConceptExpr::Top),
            "bot" => Ok(ConceptExpr::Bot),
            "not" => {
                cur.expect(&Tok::LParen)?;
                let c = self.parse_concept(cur)?;
                cur.expect(&Tok::RParen)?;
                Ok(ConceptExpr::not(c))
            }
            "and" | "or" => {
                cur.expect(&Tok::LParen)?;
                let a = self.parse_concept(cur)?;
                cur.expect(&Tok::Comma)?;
                let b = self.parse_concept(cur)?;
                cur.expect(&Tok::RParen)?;
                Ok(if kw == "and" {
                    ConceptExpr::and(a, b)
                } else {
                    ConceptExpr::or(a, b)
                })
            }
            "some" | "all" => {
                cur.expect(&Tok::LParen)?;
                let r = self.parse_role(cur)?;
                cur.expect(&Tok::Comma)?;
                let c = self.parse_concept(cur)?;
                cur.expect(&Tok::RParen)?;
                Ok(if kw == "some" {
                    ConceptExpr::exists(r, c)
                } else {
                    ConceptExpr::forall(r, c)
                })
            }
            "nominal" => {
                cur.expect(&Tok::LParen)?;
                let mut entries = Vec::new();
                loop {
                    let d = cur.degree(&self.onto.chain)?;
                    cur.expect(&Tok::Slash)?;
                    let (ind, icol) = cur.ident()?;
                    entries.push((d, self.lookup_ind(&ind, cur.line, icol)?));
                    match cur.next()?.tok {
                        Tok::Comma => continue,
                        Tok::RParen => break,
                        ref t => {
                            return err(cur.line, cur.col(), format!("expected ',' or ')', found {t}"))
                        }
                    }
                }
                Ok(ConceptExpr::Nominal(entries))
            }
            "atleast" | "atmost" => {
                cur.expect(&Tok::LParen)?;
                let m = cur.integer()?;
                cur.expect(&Tok::Comma)?;
                let r = self.parse_role(cur)?;
                cur.expect(&Tok::RParen)?;
                Ok(if kw == "atleast" {
                    ConceptExpr::AtLeast(m, r)
                } else {
                    ConceptExpr::AtMost(m, r)
                })
            }
            "atleastq" | "atmostq" => {
                cur.expect(&Tok::LParen)?;
                let m = cur.integer()?;
                cur.expect(&Tok::Comma)?;
                let r = self.parse_role(cur)?;
                cur.expect(&Tok::Comma)?;
                let c = self.parse_concept(cur)?;
                cur.expect(&Tok::RParen)?;
                Ok(if kw == "atleastq" {
                    ConceptExpr::AtLeastQ(m, r, Box::new(c))
                } else {
                    ConceptExpr::AtMostQ(m, r, Box::new(c))
                })
            }
            "self" => {
                cur.expect(&Tok::LParen)?;
                let r = self.parse_role(cur)?;
                cur.expect(&Tok::RParen)?;
                Ok(ConceptExpr::SelfLoop(r))
            }
            _ => self.lookup_concept(&name, cur.line, col),
        }
    }

    /// A term at this position denotes a role expression (so a two-argument
    /// assertion) rather than a concept.
    fn starts_role(&self, cur: &Cur, off: usize) -> bool {
        match cur.peek_at(off) {
            Some(Tok::Ident(s)) => match s.as_str() {
                "inv" | "U" => true,
                "not" => self.starts_role(cur, off + 2),
                name => self.onto.sig.roles.lookup(name).is_some(),
            },
            _ => false,
        }
    }

    fn parse_assert(&mut self, cur: &mut Cur) -> Result<(), ParseError> {
        if self.starts_role(cur, 0) {
            let mut negated = false;
            if cur.peek() == Some(&Tok::Ident("not".to_string())) {
                negated = true;
                cur.next()?;
                cur.expect(&Tok::LParen)?;
            }
            let role = self.parse_role(cur)?;
            if negated {
                cur.expect(&Tok::RParen)?;
            }
            cur.expect(&Tok::LParen)?;
            let (a, acol) = cur.ident()?;
            let from = self.lookup_ind(&a, cur.line, acol)?;
            cur.expect(&Tok::Comma)?;
            let (b, bcol) = cur.ident()?;
            let to = self.lookup_ind(&b, cur.line, bcol)?;
            cur.expect(&Tok::RParen)?;
            let cmp = cur.cmp()?;
            let degree = cur.degree(&self.onto.chain)?;
            self.onto.abox.push(Axiom::Role(RoleAssertion {
                role,
                negated,
                from,
                to,
                cmp,
                degree,
            }));
        } else {
            let concept = self.parse_concept(cur)?;
            cur.expect(&Tok::LParen)?;
            let (a, acol) = cur.ident()?;
            let ind = self.lookup_ind(&a, cur.line, acol)?;
            cur.expect(&Tok::RParen)?;
            let cmp = cur.cmp()?;
            let degree = cur.degree(&self.onto.chain)?;
            self.onto.abox.push(Axiom::Concept(ConceptAssertion {
                concept,
                ind,
                cmp,
                degree,
            }));
        }
        cur.finished()
    }

    fn declare(&mut self, cur: &mut Cur, kind: &str) -> Result<(), ParseError> {
        let (name, col) = cur.ident()?;
        if RESERVED.contains(&name.as_str()) {
            return err(cur.line, col, format!("'{name}' is a reserved word"));
        }
        let other = match kind {
            "concept" => {
                self.onto.sig.roles.lookup(&name).is_some() || self.onto.sig.inds.lookup(&name).is_some()
            }
            "role" => {
                self.onto.sig.concepts.lookup(&name).is_some()
                    || self.onto.sig.inds.lookup(&name).is_some()
            }
            _ => {
                self.onto.sig.concepts.lookup(&name).is_some()
                    || self.onto.sig.roles.lookup(&name).is_some()
            }
        };
        if other {
            return err(
                cur.line,
                col,
                format!("'{name}' already declared in another namespace"),
            );
        }
        let crisp = match cur.peek() {
            Some(Tok::Ident(s)) if s == "crisp" => {
                cur.next()?;
                true
            }
            _ => false,
        };
        match kind {
            "concept" => {
                self.onto.declare_concept(&name, crisp);
            }
            "role" => {
                self.onto.declare_role(&name, crisp);
            }
            _ => {
                if crisp {
                    return err(cur.line, col, "individuals cannot be crisp");
                }
                self.onto.declare_ind(&name);
            }
        }
        cur.finished()
    }
}

/// Parses an ontology document. The returned AST may still contain strict
/// bounds and negated role assertions; run
/// [`crate::model::rewrite_strict`] before validation.
pub fn parse_ontology(text: &str) -> Result<FuzzyOntology, ParseError> {
    let lines = lex(text)?;
    if lines.is_empty() {
        return err(1, 1, "empty document: expected 'chain <n> <family>' header");
    }
    let mut it = lines.iter();
    let header = it.next().unwrap();
    let mut cur = Cur::new(header);
    let (kw, col) = cur.ident()?;
    if kw != "chain" {
        return err(header.no, col, "expected 'chain <n> <family>' header");
    }
    let n = cur.integer()?;
    let (fam, fcol) = cur.ident()?;
    let family = match fam.as_str() {
        "goedel" => Family::Goedel,
        "lukasiewicz" => Family::Lukasiewicz,
        "zadeh" => Family::Zadeh,
        "custom" => Family::Custom,
        other => return err(header.no, fcol, format!("unknown family '{other}'")),
    };
    cur.finished()?;
    if n < 2 {
        return err(header.no, col, "chain must have at least 2 degrees");
    }

    let table = if family == Family::Custom {
        // Degree literals in table rows refer to the chain being defined.
        let proto = Chain::new(n, Family::Goedel, None).expect("n >= 2");
        let mut rows = Vec::new();
        for _ in 0..n {
            let line = match it.next() {
                Some(l) => l,
                None => return err(header.no, 1, format!("custom chain needs {n} 'table:' rows")),
            };
            let mut cur = Cur::new(line);
            let (kw, kcol) = cur.ident()?;
            if kw != "table" {
                return err(line.no, kcol, "expected 'table:' row");
            }
            cur.expect(&Tok::Colon)?;
            let mut row = Vec::new();
            for _ in 0..n {
                row.push(cur.degree(&proto)?);
            }
            cur.finished()?;
            rows.push(row);
        }
        Some(rows)
    } else {
        None
    };
    let chain = Chain::new(n, family, table).map_err(|e| ParseError {
        line: header.no,
        col: 1,
        msg: e.to_string(),
    })?;

    let mut p = OntoParser {
        onto: FuzzyOntology::new(chain),
    };
    for line in it {
        let mut cur = Cur::new(line);
        let (kw, col) = cur.ident()?;
        match kw.as_str() {
            "concept" | "role" | "individual" => p.declare(&mut cur, &kw)?,
            "assert" => p.parse_assert(&mut cur)?,
            "eq" | "neq" => {
                let (a, acol) = cur.ident()?;
                let ia = p.lookup_ind(&a, cur.line, acol)?;
                let (b, bcol) = cur.ident()?;
                let ib = p.lookup_ind(&b, cur.line, bcol)?;
                cur.finished()?;
                p.onto.abox.push(if kw == "eq" {
                    Axiom::Eq(ia, ib)
                } else {
                    Axiom::Neq(ia, ib)
                });
            }
            "gci" => {
                let lhs = p.parse_concept(&mut cur)?;
                let rhs = p.parse_concept(&mut cur)?;
                let cmp = cur.cmp()?;
                let degree = cur.degree(&p.onto.chain)?;
                cur.finished()?;
                p.onto.tbox.push(Axiom::Gci(Gci {
                    lhs,
                    rhs,
                    cmp,
                    degree,
                }));
            }
            "ria" => {
                let mut lhs = vec![p.parse_role(&mut cur)?];
                while cur.peek() != Some(&Tok::Arrow) {
                    lhs.push(p.parse_role(&mut cur)?);
                }
                cur.expect(&Tok::Arrow)?;
                let rhs = p.parse_role(&mut cur)?;
                let cmp = cur.cmp()?;
                let degree = cur.degree(&p.onto.chain)?;
                cur.finished()?;
                p.onto.rbox.push(Axiom::Ria(Ria {
                    lhs,
                    rhs,
                    cmp,
                    degree,
                }));
            }
            "rdisj" => {
                let sub = p.parse_role(&mut cur)?;
                cur.expect(&Tok::Arrow)?;
                let mut disjuncts = vec![p.parse_role(&mut cur)?];
                while cur.peek().is_some() {
                    disjuncts.push(p.parse_role(&mut cur)?);
                }
                p.onto.rbox.push(Axiom::RoleDisj { sub, disjuncts });
            }
            "trans" | "ref" | "irr" | "sym" | "asy" => {
                let r = p.parse_role(&mut cur)?;
                cur.finished()?;
                p.onto.rbox.push(match kw.as_str() {
                    "trans" => Axiom::Trans(r),
                    "ref" => Axiom::Ref(r),
                    "irr" => Axiom::Irr(r),
                    "sym" => Axiom::Sym(r),
                    _ => Axiom::Asy(r),
                });
            }
            "dis" => {
                let r1 = p.parse_role(&mut cur)?;
                let r2 = p.parse_role(&mut cur)?;
                cur.finished()?;
                p.onto.rbox.push(Axiom::Dis(r1, r2));
            }
            other => return err(line.no, col, format!("unknown directive '{other}'")),
        }
    }
    Ok(p.onto)
}

// ---------------------------------------------------------------------------
// Query parsing

fn parse_term(cur: &mut Cur, vars: &mut QueryVars, sig: &Signature) -> Result<Term, ParseError> {
    let (line, col) = (cur.line, cur.col());
    match &cur.next()?.tok {
        Tok::Var(v) => Ok(Term::Var(vars.intern(v))),
        Tok::Ident(name) => match sig.inds.lookup(name) {
            Some(id) => Ok(Term::Ind(IndId(id))),
            None => err(line, col, format!("unknown individual name '{name}'")),
        },
        t => err(line, col, format!("expected a variable or individual, found {t}")),
    }
}

enum ParsedAtom {
    Plain(AtomKind),
    Bounded(AtomKind, Degree),
}

fn parse_atom_line(
    line: &Line,
    vars: &mut QueryVars,
    onto: &FuzzyOntology,
) -> Result<ParsedAtom, ParseError> {
    let mut cur = Cur::new(line);
    // Equality atoms start with a term, predicate atoms with a name.
    let is_eq = matches!(cur.peek(), Some(Tok::Var(_)))
        || (matches!(cur.peek(), Some(Tok::Ident(_))) && cur.peek_at(1) == Some(&Tok::EqEq));
    if is_eq {
        let s = parse_term(&mut cur, vars, &onto.sig)?;
        cur.expect(&Tok::EqEq)?;
        let t = parse_term(&mut cur, vars, &onto.sig)?;
        cur.finished()?;
        return Ok(ParsedAtom::Plain(AtomKind::Eq(s, t)));
    }
    let (name, col) = cur.ident()?;
    cur.expect(&Tok::LParen)?;
    let first = parse_term(&mut cur, vars, &onto.sig)?;
    let atom = if cur.peek() == Some(&Tok::Comma) {
        cur.next()?;
        let second = parse_term(&mut cur, vars, &onto.sig)?;
        cur.expect(&Tok::RParen)?;
        match onto.sig.roles.lookup(&name) {
            Some(id) => AtomKind::Role(crate::model::RoleId(id), first, second),
            None => return err(line.no, col, format!("unknown role name '{name}'")),
        }
    } else {
        cur.expect(&Tok::RParen)?;
        match onto.sig.concepts.lookup(&name) {
            Some(id) => AtomKind::Concept(crate::model::ConceptId(id), first),
            None => return err(line.no, col, format!("unknown concept name '{name}'")),
        }
    };
    if cur.peek().is_some() {
        cur.expect(&Tok::Geq)?;
        let d = cur.degree(&onto.chain)?;
        cur.finished()?;
        if d.is_zero() {
            return err(line.no, col, "degree atoms require a positive bound");
        }
        Ok(ParsedAtom::Bounded(atom, d))
    } else {
        Ok(ParsedAtom::Plain(atom))
    }
}

fn parse_score_expr(cur: &mut Cur, n_atoms: usize) -> Result<ScoreExpr, ParseError> {
    let mut lhs = parse_score_mul(cur, n_atoms)?;
    while cur.peek() == Some(&Tok::Plus) {
        cur.next()?;
        let rhs = parse_score_mul(cur, n_atoms)?;
        lhs = ScoreExpr::Add(Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn parse_score_mul(cur: &mut Cur, n_atoms: usize) -> Result<ScoreExpr, ParseError> {
    let mut lhs = parse_score_atom(cur, n_atoms)?;
    while cur.peek() == Some(&Tok::Star) {
        cur.next()?;
        let rhs = parse_score_atom(cur, n_atoms)?;
        lhs = ScoreExpr::Mul(Box::new(lhs), Box::new(rhs));
    }
    Ok(lhs)
}

fn parse_score_atom(cur: &mut Cur, n_atoms: usize) -> Result<ScoreExpr, ParseError> {
    let (line, col) = (cur.line, cur.col());
    match cur.peek() {
        Some(Tok::AtRef(i)) => {
            let i = *i;
            cur.next()?;
            if i == 0 || i as usize > n_atoms {
                return err(
                    line,
                    col,
                    format!("atom reference @{i} out of range 1..{n_atoms}"),
                );
            }
            Ok(ScoreExpr::Atom(i as usize - 1))
        }
        Some(Tok::Num(_)) => {
            let (num, den) = cur.rational()?;
            Ok(ScoreExpr::Const(Rational64::new(num, den)))
        }
        Some(Tok::Ident(s)) if s == "min" || s == "max" => {
            let is_min = s == "min";
            cur.next()?;
            cur.expect(&Tok::LParen)?;
            let a = parse_score_expr(cur, n_atoms)?;
            cur.expect(&Tok::Comma)?;
            let b = parse_score_expr(cur, n_atoms)?;
            cur.expect(&Tok::RParen)?;
            Ok(if is_min {
                ScoreExpr::Min(Box::new(a), Box::new(b))
            } else {
                ScoreExpr::Max(Box::new(a), Box::new(b))
            })
        }
        Some(Tok::LParen) => {
            cur.next()?;
            let e = parse_score_expr(cur, n_atoms)?;
            cur.expect(&Tok::RParen)?;
            Ok(e)
        }
        _ => err(line, col, "expected '@i', a constant, 'min', 'max', or '('"),
    }
}

fn distinguish(vars: &mut QueryVars, k: usize, line: usize) -> Result<Vec<u32>, ParseError> {
    let mut dist = Vec::with_capacity(k);
    for i in 1..=k {
        let name = format!("x{i}");
        match vars.names.iter().position(|n| n == &name) {
            Some(idx) => dist.push(idx as u32),
            None => return err(line, 1, format!("distinguished variable ?{name} not in atoms")),
        }
    }
    Ok(dist)
}

/// Parses a query document against an ontology's signature and chain. The
/// header keyword picks the query kind; distinguished variables are
/// `?x1..?xk`.
pub fn parse_query(text: &str, onto: &FuzzyOntology) -> Result<Query, ParseError> {
    let lines = lex(text)?;
    if lines.is_empty() {
        return err(1, 1, "empty document: expected a query header");
    }
    let header = &lines[0];
    let mut cur = Cur::new(header);
    let (kind, _col) = cur.ident()?;
    let k = cur.integer()? as usize;
    cur.finished()?;

    let mut vars = QueryVars::default();
    match kind.as_str() {
        "threshold" => {
            let mut atoms = Vec::new();
            for line in &lines[1..] {
                match parse_atom_line(line, &mut vars, onto)? {
                    ParsedAtom::Bounded(atom, bound) => atoms.push(ThresholdAtom { atom, bound }),
                    ParsedAtom::Plain(atom @ AtomKind::Eq(..)) => atoms.push(ThresholdAtom {
                        atom,
                        bound: onto.chain.top(),
                    }),
                    ParsedAtom::Plain(_) => {
                        return err(line.no, 1, "threshold atoms require '>= d'");
                    }
                }
            }
            let dist = distinguish(&mut vars, k, header.no)?;
            Ok(Query::Threshold(ThresholdCq { vars, dist, atoms }))
        }
        "fuzzy" => {
            let mut atoms = Vec::new();
            for line in &lines[1..] {
                match parse_atom_line(line, &mut vars, onto)? {
                    ParsedAtom::Plain(atom) => atoms.push(atom),
                    ParsedAtom::Bounded(..) => {
                        return err(line.no, 1, "fuzzy query atoms omit degree bounds");
                    }
                }
            }
            let dist = distinguish(&mut vars, k, header.no)?;
            Ok(Query::Fuzzy(FuzzyCq { vars, dist, atoms }))
        }
        "scoring" => {
            let mut atoms = Vec::new();
            let mut score = None;
            for line in &lines[1..] {
                let is_score = matches!(&line.toks[0].tok, Tok::Ident(s) if s == "score");
                if is_score {
                    let mut cur = Cur::new(line);
                    cur.next()?;
                    cur.expect(&Tok::Colon)?;
                    let e = parse_score_expr(&mut cur, atoms.len())?;
                    cur.finished()?;
                    score = Some(e);
                    continue;
                }
                if score.is_some() {
                    return err(line.no, 1, "atoms must precede the score line");
                }
                match parse_atom_line(line, &mut vars, onto)? {
                    ParsedAtom::Plain(atom) => atoms.push(atom),
                    ParsedAtom::Bounded(..) => {
                        return err(line.no, 1, "scoring query atoms omit degree bounds");
                    }
                }
            }
            let Some(score) = score else {
                return err(header.no, 1, "scoring query needs a 'score:' line");
            };
            let dist = distinguish(&mut vars, k, header.no)?;
            Ok(Query::Scoring(ScoringQuery {
                vars,
                dist,
                atoms,
                score,
            }))
        }
        "ucq" => {
            let mut members = Vec::new();
            let mut atoms: Vec<AtomKind> = Vec::new();
            let mut any = false;
            for line in &lines[1..] {
                match &line.toks[0].tok {
                    Tok::Ident(s) if s == "union" => {
                        members.push(ClassicalCq {
                            atoms: std::mem::take(&mut atoms),
                        });
                    }
                    Tok::Ident(s) if s == "top" && line.toks.len() == 1 => {
                        any = true;
                    }
                    _ => match parse_atom_line(line, &mut vars, onto)? {
                        ParsedAtom::Plain(atom) => {
                            atoms.push(atom);
                            any = true;
                        }
                        ParsedAtom::Bounded(..) => {
                            return err(line.no, 1, "classical atoms carry no degree bounds");
                        }
                    },
                }
            }
            if any || !atoms.is_empty() || !members.is_empty() {
                members.push(ClassicalCq { atoms });
            }
            let dist = distinguish(&mut vars, k, header.no)?;
            Ok(Query::Ucq(Ucq { vars, dist, members }))
        }
        other => err(header.no, 1, format!("unknown query kind '{other}'")),
    }
}

// ---------------------------------------------------------------------------
// Interpretation fixtures

/// Parses an interpretation fixture (`elem`, `ind`, `concept`, `role` lines;
/// unlisted cells default to degree 0) against an ontology's signature.
pub fn parse_interp(text: &str, onto: &FuzzyOntology) -> Result<Interp, ParseError> {
    let lines = lex(text)?;
    if lines.is_empty() {
        return err(1, 1, "empty fixture: expected an 'elem' line");
    }
    let mut cur = Cur::new(&lines[0]);
    let (kw, col) = cur.ident()?;
    if kw != "elem" {
        return err(lines[0].no, col, "expected 'elem <names...>' first");
    }
    let mut elems: Vec<String> = Vec::new();
    while cur.peek().is_some() {
        let (name, ecol) = cur.ident()?;
        if elems.contains(&name) {
            return err(lines[0].no, ecol, format!("duplicate element '{name}'"));
        }
        elems.push(name);
    }
    if elems.is_empty() {
        return err(lines[0].no, col, "domain must be non-empty");
    }
    let size = elems.len();
    let elem_of = |name: &str, line: usize, col: usize| -> Result<usize, ParseError> {
        elems.iter().position(|e| e == name).ok_or_else(|| ParseError {
            line,
            col,
            msg: format!("unknown element '{name}'"),
        })
    };

    let mut interp = Interp::zeroed(onto, size);
    let mut assigned = vec![false; onto.sig.inds.len()];
    for line in &lines[1..] {
        let mut cur = Cur::new(line);
        let (kw, col) = cur.ident()?;
        match kw.as_str() {
            "ind" => {
                let (a, acol) = cur.ident()?;
                let id = onto.sig.inds.lookup(&a).ok_or_else(|| ParseError {
                    line: line.no,
                    col: acol,
                    msg: format!("unknown individual '{a}'"),
                })?;
                cur.expect(&Tok::Assign)?;
                let (e, ecol) = cur.ident()?;
                interp.ind_map[id as usize] = elem_of(&e, line.no, ecol)?;
                assigned[id as usize] = true;
                cur.finished()?;
            }
            "concept" => {
                let (a, acol) = cur.ident()?;
                let id = onto.sig.concepts.lookup(&a).ok_or_else(|| ParseError {
                    line: line.no,
                    col: acol,
                    msg: format!("unknown concept '{a}'"),
                })?;
                cur.expect(&Tok::Colon)?;
                while cur.peek().is_some() {
                    let (e, ecol) = cur.ident()?;
                    let x = elem_of(&e, line.no, ecol)?;
                    cur.expect(&Tok::Assign)?;
                    let d = cur.degree(&onto.chain)?;
                    if onto.is_crisp_concept(crate::model::ConceptId(id))
                        && !d.is_zero()
                        && d != onto.chain.top()
                    {
                        return err(line.no, ecol, format!("crisp concept '{a}' only takes 0 or 1"));
                    }
                    interp.concepts[id as usize][x] = d.0;
                }
            }
            "role" => {
                let (r, rcol) = cur.ident()?;
                let id = onto.sig.roles.lookup(&r).ok_or_else(|| ParseError {
                    line: line.no,
                    col: rcol,
                    msg: format!("unknown role '{r}'"),
                })?;
                cur.expect(&Tok::Colon)?;
                while cur.peek().is_some() {
                    cur.expect(&Tok::LParen)?;
                    let (e1, c1) = cur.ident()?;
                    let x = elem_of(&e1, line.no, c1)?;
                    cur.expect(&Tok::Comma)?;
                    let (e2, c2) = cur.ident()?;
                    let y = elem_of(&e2, line.no, c2)?;
                    cur.expect(&Tok::RParen)?;
                    cur.expect(&Tok::Assign)?;
                    let d = cur.degree(&onto.chain)?;
                    if onto.is_crisp_role(crate::model::RoleId(id))
                        && !d.is_zero()
                        && d != onto.chain.top()
                    {
                        return err(line.no, rcol, format!("crisp role '{r}' only takes 0 or 1"));
                    }
                    interp.roles[id as usize][x * size + y] = d.0;
                }
            }
            other => return err(line.no, col, format!("unknown fixture directive '{other}'")),
        }
    }
    if let Some(id) = assigned.iter().position(|&a| !a) {
        return err(
            1,
            1,
            format!(
                "individual '{}' not mapped to an element",
                onto.sig.inds.name(id as u32)
            ),
        );
    }
    Ok(interp)
}

// ---------------------------------------------------------------------------
// Printers

/// Canonical degree literal: a decimal when the reduced denominator divides a
/// power of ten, else a reduced fraction.
pub fn fmt_degree(chain: &Chain, d: Degree) -> String {
    let (num, den) = chain.value(d);
    let g = gcd(u64::from(num), u64::from(den)).max(1) as u32;
    let (num, den) = (num / g, den / g);
    if den == 1 {
        return num.to_string();
    }
    let mut rest = den;
    let mut twos = 0u32;
    let mut fives = 0u32;
    while rest % 2 == 0 {
        rest /= 2;
        twos += 1;
    }
    while rest % 5 == 0 {
        rest /= 5;
        fives += 1;
    }
    if rest != 1 {
        return format!("{num}/{den}");
    }
    let k = twos.max(fives);
    let scaled = u64::from(num) * 10u64.pow(k) / u64::from(den);
    let digits = format!("{scaled:0width$}", width = k as usize + 1);
    let (int, frac) = digits.split_at(digits.len() - k as usize);
    format!("{int}.{frac}")
}

fn fmt_role(sig: &Signature, r: &RoleExpr) -> String {
    match r {
        RoleExpr::Name(id) => sig.role_name(*id).to_string(),
        RoleExpr::Inverse(id) => format!("inv({})", sig.role_name(*id)),
        RoleExpr::Universal => "U".to_string(),
    }
}

fn fmt_concept(sig: &Signature, chain: &Chain, c: &ConceptExpr) -> String {
    match c {
        ConceptExpr::Top => "top".to_string(),
        ConceptExpr::Bot => "bot".to_string(),
        ConceptExpr::Name(id) => sig.concept_name(*id).to_string(),
        ConceptExpr::Not(x) => format!("not({})", fmt_concept(sig, chain, x)),
        ConceptExpr::And(a, b) => format!(
            "and({},{})",
            fmt_concept(sig, chain, a),
            fmt_concept(sig, chain, b)
        ),
        ConceptExpr::Or(a, b) => format!(
            "or({},{})",
            fmt_concept(sig, chain, a),
            fmt_concept(sig, chain, b)
        ),
        ConceptExpr::Exists(r, x) => {
            format!("some({},{})", fmt_role(sig, r), fmt_concept(sig, chain, x))
        }
        ConceptExpr::Forall(r, x) => format!("all({},{})", fmt_role(sig, r), fmt_concept(sig, chain, x)),
        ConceptExpr::Nominal(entries) => {
            let inner: Vec<String> = entries
                .iter()
                .map(|(d, o)| format!("{}/{}", fmt_degree(chain, *d), sig.ind_name(*o)))
                .collect();
            format!("nominal({})", inner.join(","))
        }
        ConceptExpr::AtLeast(m, r) => format!("atleast({m},{})", fmt_role(sig, r)),
        ConceptExpr::AtMost(m, r) => format!("atmost({m},{})", fmt_role(sig, r)),
        ConceptExpr::AtLeastQ(m, r, x) => {
            format!(
                "atleastq({m},{},{})",
                fmt_role(sig, r),
                fmt_concept(sig, chain, x)
            )
        }
        ConceptExpr::AtMostQ(m, r, x) => {
            format!("atmostq({m},{},{})", fmt_role(sig, r), fmt_concept(sig, chain, x))
        }
        ConceptExpr::SelfLoop(r) => format!("self({})", fmt_role(sig, r)),
    }
}

fn fmt_axiom(sig: &Signature, chain: &Chain, ax: &Axiom) -> String {
    match ax {
        Axiom::Concept(a) => format!(
            "assert {}({}) {} {}",
            fmt_concept(sig, chain, &a.concept),
            sig.ind_name(a.ind),
            a.cmp,
            fmt_degree(chain, a.degree)
        ),
        Axiom::Role(a) => {
            let role = fmt_role(sig, &a.role);
            let role = if a.negated { format!("not({role})") } else { role };
            format!(
                "assert {role}({},{}) {} {}",
                sig.ind_name(a.from),
                sig.ind_name(a.to),
                a.cmp,
                fmt_degree(chain, a.degree)
            )
        }
        Axiom::Eq(a, b) => format!("eq {} {}", sig.ind_name(*a), sig.ind_name(*b)),
        Axiom::Neq(a, b) => format!("neq {} {}", sig.ind_name(*a), sig.ind_name(*b)),
        Axiom::Gci(g) => format!(
            "gci {} {} {} {}",
            fmt_concept(sig, chain, &g.lhs),
            fmt_concept(sig, chain, &g.rhs),
            g.cmp,
            fmt_degree(chain, g.degree)
        ),
        Axiom::Ria(r) => {
            let lhs: Vec<String> = r.lhs.iter().map(|x| fmt_role(sig, x)).collect();
            format!(
                "ria {} -> {} {} {}",
                lhs.join(" "),
                fmt_role(sig, &r.rhs),
                r.cmp,
                fmt_degree(chain, r.degree)
            )
        }
        Axiom::Trans(r) => format!("trans {}", fmt_role(sig, r)),
        Axiom::Dis(r1, r2) => format!("dis {} {}", fmt_role(sig, r1), fmt_role(sig, r2)),
        Axiom::Ref(r) => format!("ref {}", fmt_role(sig, r)),
        Axiom::Irr(r) => format!("irr {}", fmt_role(sig, r)),
        Axiom::Sym(r) => format!("sym {}", fmt_role(sig, r)),
        Axiom::Asy(r) => format!("asy {}", fmt_role(sig, r)),
        Axiom::RoleDisj { sub, disjuncts } => {
            let ds: Vec<String> = disjuncts.iter().map(|x| fmt_role(sig, x)).collect();
            format!("rdisj {} -> {}", fmt_role(sig, sub), ds.join(" "))
        }
    }
}

pub fn print_ontology(o: &FuzzyOntology) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "chain {} {}\n",
        o.chain.size(),
        o.chain.family().keyword()
    ));
    if let Some(table) = o.chain.custom_table() {
        let n = o.chain.size() as usize;
        for row in 0..n {
            let cells: Vec<String> = (0..n)
                .map(|col| fmt_degree(&o.chain, Degree(table[row * n + col])))
                .collect();
            out.push_str(&format!("table: {}\n", cells.join(" ")));
        }
    }
    for (id, name) in o.sig.concepts.iter() {
        if o.is_crisp_concept(crate::model::ConceptId(id)) {
            out.push_str(&format!("concept {name} crisp\n"));
        } else {
            out.push_str(&format!("concept {name}\n"));
        }
    }
    for (id, name) in o.sig.roles.iter() {
        if o.is_crisp_role(crate::model::RoleId(id)) {
            out.push_str(&format!("role {name} crisp\n"));
        } else {
            out.push_str(&format!("role {name}\n"));
        }
    }
    for (_, name) in o.sig.inds.iter() {
        out.push_str(&format!("individual {name}\n"));
    }
    for (_, axioms) in o.sections() {
        for ax in axioms {
            out.push_str(&fmt_axiom(&o.sig, &o.chain, ax));
            out.push('\n');
        }
    }
    out
}

pub fn print_classical(c: &ClassicalOntology) -> String {
    print_ontology(&c.onto)
}

fn fmt_term(vars: &QueryVars, sig: &Signature, t: Term) -> String {
    match t {
        Term::Var(v) => format!("?{}", vars.name(v)),
        Term::Ind(id) => sig.ind_name(id).to_string(),
    }
}

fn fmt_atom(vars: &QueryVars, sig: &Signature, atom: &AtomKind) -> String {
    match atom {
        AtomKind::Concept(c, t) => format!("{}({})", sig.concept_name(*c), fmt_term(vars, sig, *t)),
        AtomKind::Role(r, s, t) => format!(
            "{}({},{})",
            sig.role_name(*r),
            fmt_term(vars, sig, *s),
            fmt_term(vars, sig, *t)
        ),
        AtomKind::Eq(s, t) => format!("{} == {}", fmt_term(vars, sig, *s), fmt_term(vars, sig, *t)),
    }
}

fn fmt_score(e: &ScoreExpr) -> String {
    match e {
        ScoreExpr::Atom(i) => format!("@{}", i + 1),
        ScoreExpr::Const(c) => {
            if *c.denom() == 1 {
                c.numer().to_string()
            } else {
                format!("{}/{}", c.numer(), c.denom())
            }
        }
        ScoreExpr::Add(a, b) => format!("({}+{})", fmt_score(a), fmt_score(b)),
        ScoreExpr::Mul(a, b) => format!("({}*{})", fmt_score(a), fmt_score(b)),
        ScoreExpr::Min(a, b) => format!("min({},{})", fmt_score(a), fmt_score(b)),
        ScoreExpr::Max(a, b) => format!("max({},{})", fmt_score(a), fmt_score(b)),
    }
}

pub fn print_query(q: &Query, onto: &FuzzyOntology) -> String {
    let sig = &onto.sig;
    match q {
        Query::Threshold(t) => {
            let mut out = format!("threshold {}\n", t.dist.len());
            for a in &t.atoms {
                if a.atom.is_eq() {
                    out.push_str(&format!("{}\n", fmt_atom(&t.vars, sig, &a.atom)));
                } else {
                    out.push_str(&format!(
                        "{} >= {}\n",
                        fmt_atom(&t.vars, sig, &a.atom),
                        fmt_degree(&onto.chain, a.bound)
                    ));
                }
            }
            out
        }
        Query::Fuzzy(f) => {
            let mut out = format!("fuzzy {}\n", f.dist.len());
            for a in &f.atoms {
                out.push_str(&format!("{}\n", fmt_atom(&f.vars, sig, a)));
            }
            out
        }
        Query::Scoring(s) => {
            let mut out = format!("scoring {}\n", s.dist.len());
            for a in &s.atoms {
                out.push_str(&format!("{}\n", fmt_atom(&s.vars, sig, a)));
            }
            out.push_str(&format!("score: {}\n", fmt_score(&s.score)));
            out
        }
        Query::Ucq(u) => print_ucq(u, sig),
    }
}

/// Prints a UCQ in the query grammar with `union` separators; an atomless
/// member prints as `top`.
pub fn print_ucq(u: &Ucq, sig: &Signature) -> String {
    let mut out = format!("ucq {}\n", u.dist.len());
    for (i, member) in u.members.iter().enumerate() {
        if i > 0 {
            out.push_str("union\n");
        }
        if member.atoms.is_empty() {
            out.push_str("top\n");
        }
        for atom in &member.atoms {
            out.push_str(&format!("{}\n", fmt_atom(&u.vars, sig, atom)));
        }
    }
    out
}

/// Prints an interpretation in the fixture format, listing only nonzero
/// cells; elements are named `e0..`.
pub fn print_interp(i: &Interp, onto: &FuzzyOntology) -> String {
    let size = i.domain_size;
    let elems: Vec<String> = (0..size).map(|x| format!("e{x}")).collect();
    let mut out = format!("elem {}\n", elems.join(" "));
    for (id, name) in onto.sig.inds.iter() {
        out.push_str(&format!("ind {name} = {}\n", elems[i.ind_map[id as usize]]));
    }
    for (id, name) in onto.sig.concepts.iter() {
        let table = &i.concepts[id as usize];
        let cells: Vec<String> = (0..size)
            .filter(|&x| table[x] != 0)
            .map(|x| format!("{}={}", elems[x], fmt_degree(&onto.chain, Degree(table[x]))))
            .collect();
        if !cells.is_empty() {
            out.push_str(&format!("concept {name}: {}\n", cells.join(" ")));
        }
    }
    for (id, name) in onto.sig.roles.iter() {
        let table = &i.roles[id as usize];
        let mut cells = Vec::new();
        for x in 0..size {
            for y in 0..size {
                let d = table[x * size + y];
                if d != 0 {
                    cells.push(format!(
                        "({},{})={}",
                        elems[x],
                        elems[y],
                        fmt_degree(&onto.chain, Degree(d))
                    ));
                }
            }
        }
        if !cells.is_empty() {
            out.push_str(&format!("role {name}: {}\n", cells.join(" ")));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::validate;

    #[test]
    fn example1_roundtrip_is_byte_identical() {
        let o = parse_ontology(fixtures::EXAMPLE1).unwrap();
        assert_eq!(print_ontology(&o), fixtures::EXAMPLE1);
    }

    #[test]
    fn parse_then_print_then_parse_is_identity() {
        for text in [fixtures::EXAMPLE1, fixtures::EXAMPLE3, fixtures::SCORING_ONTOLOGY] {
            let once = parse_ontology(text).unwrap();
            let twice = parse_ontology(&print_ontology(&once)).unwrap();
            assert_eq!(once, twice);
        }
    }

    #[test]
    fn empty_sections_are_valid() {
        let o = parse_ontology("chain 3 goedel\n").unwrap();
        assert!(validate(&o).is_empty());
        assert!(o.abox.is_empty() && o.tbox.is_empty() && o.rbox.is_empty());
    }

    #[test]
    fn off_chain_degree_is_a_parse_error() {
        let text = "chain 6 lukasiewicz\nconcept A\nindividual a\nassert A(a) >= 0.3\n";
        let e = parse_ontology(text).unwrap_err();
        assert_eq!(e.line, 4);
        assert!(e.msg.contains("not on chain of 6"), "{e}");
    }

    #[test]
    fn unknown_name_is_a_parse_error() {
        let text = "chain 6 lukasiewicz\nindividual a\nassert A(a) >= 1\n";
        let e = parse_ontology(text).unwrap_err();
        assert!(e.msg.contains("unknown concept name 'A'"), "{e}");
    }

    #[test]
    fn custom_table_parses_and_roundtrips() {
        let text = "\
chain 3 custom
table: 0 0 0
table: 0 0 0.5
table: 0 0.5 1
concept A
";
        let o = parse_ontology(text).unwrap();
        assert_eq!(o.chain.family(), Family::Custom);
        assert_eq!(print_ontology(&o), text);
    }

    #[test]
    fn invalid_custom_table_reports_witness() {
        let text = "\
chain 3 custom
table: 0 0 0
table: 0 1 0.5
table: 0 0.5 1
";
        let e = parse_ontology(text).unwrap_err();
        assert!(e.msg.contains("not a t-norm"), "{e}");
    }

    #[test]
    fn negated_role_assertion_parses() {
        let text =
            "chain 6 lukasiewicz\nrole r\nindividual a\nindividual b\nassert not(r)(a,b) <= 0.4\n";
        let o = parse_ontology(text).unwrap();
        match &o.abox[0] {
            Axiom::Role(ra) => assert!(ra.negated),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(print_ontology(&o), text);
    }

    #[test]
    fn threshold_query_parses() {
        let o = parse_ontology(fixtures::EXAMPLE1).unwrap();
        let q = parse_query(fixtures::QUERY_THRESHOLD, &o).unwrap();
        match &q {
            Query::Threshold(t) => {
                assert_eq!(t.atoms.len(), 3);
                assert_eq!(t.dist.len(), 2);
                assert_eq!(t.atoms[0].bound, Degree(4));
            }
            other => panic!("unexpected {other:?}"),
        }
        let printed = print_query(&q, &o);
        assert_eq!(parse_query(&printed, &o).unwrap(), q);
    }

    #[test]
    fn scoring_query_parses_with_weights() {
        let o = parse_ontology(fixtures::SCORING_ONTOLOGY).unwrap();
        let q = parse_query(fixtures::QUERY_SCORING, &o).unwrap();
        match &q {
            Query::Scoring(s) => {
                assert_eq!(s.atoms.len(), 7);
                assert_eq!(s.dist.len(), 1);
            }
            other => panic!("unexpected {other:?}"),
        }
        let printed = print_query(&q, &o);
        assert_eq!(parse_query(&printed, &o).unwrap(), q);
    }

    #[test]
    fn boolean_query_is_valid() {
        let o = parse_ontology(fixtures::EXAMPLE1).unwrap();
        let q = parse_query("threshold 0\nOverused(cpuA) >= 0.8\n", &o).unwrap();
        match q {
            Query::Threshold(t) => assert!(t.dist.is_empty()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_distinguished_variable_rejected() {
        let o = parse_ontology(fixtures::EXAMPLE1).unwrap();
        let e = parse_query("threshold 2\nOverused(?x1) >= 0.8\n", &o).unwrap_err();
        assert!(e.msg.contains("?x2"), "{e}");
    }

    #[test]
    fn mixing_bounds_into_fuzzy_query_rejected() {
        let o = parse_ontology(fixtures::EXAMPLE1).unwrap();
        let e = parse_query("fuzzy 1\nOverused(?x1) >= 0.8\n", &o).unwrap_err();
        assert!(e.msg.contains("omit degree bounds"), "{e}");
    }

    #[test]
    fn interp_fixture_roundtrips() {
        let o = parse_ontology(fixtures::EXAMPLE1).unwrap();
        let i = parse_interp(fixtures::EXAMPLE1_INTERP, &o).unwrap();
        let printed = print_interp(&i, &o);
        let again = parse_interp(&printed, &o).unwrap();
        assert_eq!(i, again);
    }

    #[test]
    fn degree_formatting_is_canonical() {
        let c6 = Chain::new(6, Family::Lukasiewicz, None).unwrap();
        assert_eq!(fmt_degree(&c6, Degree(0)), "0");
        assert_eq!(fmt_degree(&c6, Degree(4)), "0.8");
        assert_eq!(fmt_degree(&c6, Degree(5)), "1");
        let c7 = Chain::new(7, Family::Lukasiewicz, None).unwrap();
        assert_eq!(fmt_degree(&c7, Degree(1)), "1/6");
        assert_eq!(fmt_degree(&c7, Degree(3)), "0.5");
        let c11 = Chain::new(11, Family::Lukasiewicz, None).unwrap();
        assert_eq!(fmt_degree(&c11, Degree(1)), "0.1");
    }
}
