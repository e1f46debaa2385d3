//! Text formats: queries, structures, polynomials, valuations, rationals.
//!
//! Query grammar (whitespace-insensitive, `#` starts a line comment):
//!
//! ```text
//! file  := [ "sig" rel/arity,... ";" [ "const" name,... ";" ] ] ucq
//! ucq   := cq ( "|" cq )*
//! cq    := "true" | atom ( "&" atom )*
//! atom  := NAME "(" term ("," term)* ")" | term "!=" term
//! term  := variable | "@" constant | "`" vertex | "_"
//! ```
//!
//! Structure format: a `sig` header (with `const name=vertex,...` for the
//! interpretation), then one fact `NAME(v1,..,vk)` per line and `vertex v`
//! lines for isolated vertices.
//!
//! Polynomials are `x1*x1*x2 + x4 + 1`; valuations are `x1=2, x2=0`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use bagcq_core::eval::Rational;
use bagcq_core::poly::{Monomial, PolyError, Polynomial, Valuation};
use bagcq_core::query::{Atom, Cq, QueryError, Term, Ucq};
use bagcq_core::sig::{SigError, Signature};
use bagcq_core::structure::{Fact, Structure, StructureError};
use bagcq_core::transform::is_alien_name;
use bagcq_core::Count;
use num_bigint::BigInt;
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TextError {
    #[error("syntax error at line {line}, col {col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("variable `{0}` lies in the reserved alien namespace x1, x2, ...")]
    ReservedVariable(String),
    #[error("relation `{rel}` used with arities {a} and {b}")]
    InconsistentArity { rel: String, a: usize, b: usize },
    #[error("signature supplied both as argument and as header")]
    SignatureTwice,
    #[error("valuation must assign exactly x1..xn, missing x{0}")]
    ValuationGap(u32),
    #[error("duplicate valuation entry for x{0}")]
    ValuationDuplicate(u32),
    #[error("duplicate interpretation for constant `{0}`")]
    DuplicateConstant(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Sig(#[from] SigError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Options for [`parse_query`]. By default the alien namespace is reserved
/// so parsed queries are valid transformation inputs; evaluation-side
/// callers opt in to reading back CQ-ized output.
#[derive(Debug, Clone, Copy, Default)]
pub struct QueryOptions {
    pub allow_aliens: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    At,
    Backquote,
    Wildcard,
    LParen,
    RParen,
    Comma,
    Amp,
    Pipe,
    Semi,
    Slash,
    Eq,
    Neq,
    Plus,
    Star,
    Minus,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn err_at(line: usize, col: usize, message: impl Into<String>) -> TextError {
    TextError::Syntax { line, col, message: message.into() }
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, TextError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&ch) = chars.peek() {
        let (tline, tcol) = (line, col);
        let bump = |c: char, line: &mut usize, col: &mut usize| {
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        };
        match ch {
            ' ' | '\t' | '\r' | '\n' => {
                chars.next();
                bump(ch, &mut line, &mut col);
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    chars.next();
                    bump(c, &mut line, &mut col);
                    if c == '\n' {
                        break;
                    }
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut ident = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        ident.push(c);
                        chars.next();
                        bump(c, &mut line, &mut col);
                    } else {
                        break;
                    }
                }
                let tok = if ident == "_" { Tok::Wildcard } else { Tok::Ident(ident) };
                out.push(Spanned { tok, line: tline, col: tcol });
            }
            c if c.is_ascii_digit() => {
                let mut value = 0u64;
                while let Some(&c) = chars.peek() {
                    if let Some(d) = c.to_digit(10) {
                        value = value
                            .checked_mul(10)
                            .and_then(|v| v.checked_add(d as u64))
                            .ok_or_else(|| err_at(tline, tcol, "number too large"))?;
                        chars.next();
                        bump(c, &mut line, &mut col);
                    } else {
                        break;
                    }
                }
                out.push(Spanned { tok: Tok::Int(value), line: tline, col: tcol });
            }
            '!' => {
                chars.next();
                bump('!', &mut line, &mut col);
                match chars.peek() {
                    Some('=') => {
                        chars.next();
                        bump('=', &mut line, &mut col);
                        out.push(Spanned { tok: Tok::Neq, line: tline, col: tcol });
                    }
                    _ => return Err(err_at(tline, tcol, "expected `!=`")),
                }
            }
            _ => {
                let tok = match ch {
                    '@' => Tok::At,
                    '`' => Tok::Backquote,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    '&' => Tok::Amp,
                    '|' => Tok::Pipe,
                    ';' => Tok::Semi,
                    '/' => Tok::Slash,
                    '=' => Tok::Eq,
                    '+' => Tok::Plus,
                    '*' => Tok::Star,
                    '-' => Tok::Minus,
                    other => {
                        return Err(err_at(tline, tcol, format!("unexpected character `{other}`")))
                    }
                };
                chars.next();
                bump(ch, &mut line, &mut col);
                out.push(Spanned { tok, line: tline, col: tcol });
            }
        }
    }
    Ok(out)
}

struct Cursor {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Cursor {
    fn new(toks: Vec<Spanned>) -> Cursor {
        Cursor { toks, pos: 0 }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map_or((1, 1), |s| (s.line, s.col))
    }

    fn next(&mut self) -> Option<Spanned> {
        let s = self.toks.get(self.pos).cloned();
        if s.is_some() {
            self.pos += 1;
        }
        s
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), TextError> {
        let (line, col) = self.here();
        match self.next() {
            Some(s) if s.tok == tok => Ok(()),
            _ => Err(err_at(line, col, format!("expected {what}"))),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<String, TextError> {
        let (line, col) = self.here();
        match self.next() {
            Some(Spanned { tok: Tok::Ident(s), .. }) => Ok(s),
            _ => Err(err_at(line, col, format!("expected {what}"))),
        }
    }

    fn expect_int(&mut self, what: &str) -> Result<u64, TextError> {
        let (line, col) = self.here();
        match self.next() {
            Some(Spanned { tok: Tok::Int(v), .. }) => Ok(v),
            _ => Err(err_at(line, col, format!("expected {what}"))),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn expect_end(&self) -> Result<(), TextError> {
        if self.at_end() {
            Ok(())
        } else {
            let (line, col) = self.here();
            Err(err_at(line, col, "unexpected trailing input"))
        }
    }
}

/// `sig NAME/ARITY, ... ;` with an optional `const ...` clause; `decls`
/// distinguishes `const a, b ;` (query headers) from `const a=v, b=w`
/// (structure headers).
fn parse_sig_clause(cur: &mut Cursor) -> Result<Vec<(String, usize)>, TextError> {
    cur.expect(Tok::Ident("sig".into()), "`sig`")
        .expect("caller checked the keyword");
    let mut rels = Vec::new();
    loop {
        match cur.peek() {
            Some(Tok::Semi) => break,
            _ => {
                let name = cur.expect_ident("relation name")?;
                cur.expect(Tok::Slash, "`/` after relation name")?;
                let arity = cur.expect_int("arity")? as usize;
                rels.push((name, arity));
                if let Some(Tok::Comma) = cur.peek() {
                    cur.next();
                } else {
                    break;
                }
            }
        }
    }
    cur.expect(Tok::Semi, "`;` after sig clause")?;
    Ok(rels)
}

enum RawTerm {
    Var(String),
    Const(String),
    Vertex(String),
    Wildcard,
}

fn parse_term(cur: &mut Cursor) -> Result<RawTerm, TextError> {
    let (line, col) = cur.here();
    match cur.next() {
        Some(Spanned { tok: Tok::Wildcard, .. }) => Ok(RawTerm::Wildcard),
        Some(Spanned { tok: Tok::At, .. }) => Ok(RawTerm::Const(cur.expect_ident("constant name")?)),
        Some(Spanned { tok: Tok::Backquote, .. }) => {
            Ok(RawTerm::Vertex(cur.expect_ident("vertex name")?))
        }
        Some(Spanned { tok: Tok::Ident(name), .. }) => {
            let first = name.chars().next().expect("idents are nonempty");
            if first.is_ascii_lowercase() || first == '_' {
                Ok(RawTerm::Var(name))
            } else {
                Err(err_at(line, col, "variables must start with a lowercase letter"))
            }
        }
        _ => Err(err_at(line, col, "expected a term")),
    }
}

enum RawAtom {
    Rel { rel: String, args: Vec<RawTerm>, line: usize, col: usize },
    Neq(RawTerm, RawTerm),
}

fn parse_atom(cur: &mut Cursor) -> Result<RawAtom, TextError> {
    if let (Some(Tok::Ident(_)), Some(Tok::LParen)) = (cur.peek(), cur.peek2()) {
        let (line, col) = cur.here();
        let rel = cur.expect_ident("relation name")?;
        cur.expect(Tok::LParen, "`(`")?;
        let mut args = vec![parse_term(cur)?];
        while let Some(Tok::Comma) = cur.peek() {
            cur.next();
            args.push(parse_term(cur)?);
        }
        cur.expect(Tok::RParen, "`)`")?;
        return Ok(RawAtom::Rel { rel, args, line, col });
    }
    let a = parse_term(cur)?;
    cur.expect(Tok::Neq, "`!=`")?;
    let b = parse_term(cur)?;
    Ok(RawAtom::Neq(a, b))
}

/// Parses a UCQ. When `sig` is given the text must not carry a header and is
/// validated against it; otherwise a header is honored, or failing that the
/// signature is inferred from usage.
pub fn parse_query(
    text: &str,
    sig: Option<&Signature>,
    opts: QueryOptions,
) -> Result<Ucq, TextError> {
    let mut cur = Cursor::new(tokenize(text)?);

    // `sig E1/2, ... ;` opens a header; `sig(...)` is an ordinary atom
    let header = if matches!(cur.peek(), Some(Tok::Ident(k)) if k == "sig")
        && !matches!(cur.peek2(), Some(Tok::LParen))
    {
        let rels = parse_sig_clause(&mut cur)?;
        let mut consts = Vec::new();
        if matches!(cur.peek(), Some(Tok::Ident(k)) if k == "const") {
            cur.next();
            loop {
                consts.push(cur.expect_ident("constant name")?);
                if let Some(Tok::Comma) = cur.peek() {
                    cur.next();
                } else {
                    break;
                }
            }
            cur.expect(Tok::Semi, "`;` after const clause")?;
        }
        Some(Signature::new(rels, consts)?)
    } else {
        None
    };
    let explicit = match (sig, &header) {
        (Some(_), Some(_)) => return Err(TextError::SignatureTwice),
        (Some(s), None) => Some((*s).clone()),
        (None, Some(h)) => Some(h.clone()),
        (None, None) => None,
    };

    // raw disjuncts
    let mut raw_disjuncts: Vec<Vec<RawAtom>> = Vec::new();
    loop {
        let is_true = matches!(cur.peek(), Some(Tok::Ident(k)) if k == "true")
            && !matches!(cur.peek2(), Some(Tok::LParen));
        let atoms = if is_true {
            cur.next();
            Vec::new()
        } else {
            let mut atoms = vec![parse_atom(&mut cur)?];
            while let Some(Tok::Amp) = cur.peek() {
                cur.next();
                atoms.push(parse_atom(&mut cur)?);
            }
            atoms
        };
        raw_disjuncts.push(atoms);
        if let Some(Tok::Pipe) = cur.peek() {
            cur.next();
        } else {
            break;
        }
    }
    cur.expect_end()?;

    // infer the signature when none was given
    let sig = match explicit {
        Some(s) => s,
        None => {
            let mut rels: BTreeMap<String, usize> = BTreeMap::new();
            let mut consts: Vec<String> = Vec::new();
            for atoms in &raw_disjuncts {
                for atom in atoms {
                    if let RawAtom::Rel { rel, args, line, col } = atom {
                        match rels.get(rel) {
                            None => {
                                rels.insert(rel.clone(), args.len());
                            }
                            Some(&a) if a != args.len() => {
                                return Err(err_at(
                                    *line,
                                    *col,
                                    format!("relation `{rel}` used with arities {a} and {}", args.len()),
                                ))
                            }
                            _ => {}
                        }
                    }
                    let terms: Vec<&RawTerm> = match atom {
                        RawAtom::Rel { args, .. } => args.iter().collect(),
                        RawAtom::Neq(a, b) => vec![a, b],
                    };
                    for t in terms {
                        if let RawTerm::Const(c) = t {
                            consts.push(c.clone());
                        }
                    }
                }
            }
            Signature::new(rels, consts)?
        }
    };

    // wildcard expansion: `_w1`, `_w2`, ... skipping taken names
    let mut taken: std::collections::BTreeSet<String> = std::collections::BTreeSet::new();
    for atoms in &raw_disjuncts {
        for atom in atoms {
            let terms: Vec<&RawTerm> = match atom {
                RawAtom::Rel { args, .. } => args.iter().collect(),
                RawAtom::Neq(a, b) => vec![a, b],
            };
            for t in terms {
                if let RawTerm::Var(v) = t {
                    taken.insert(v.clone());
                }
            }
        }
    }
    let mut wildcard_counter = 0usize;
    let mut next_wildcard = move |taken: &std::collections::BTreeSet<String>| loop {
        wildcard_counter += 1;
        let name = format!("_w{wildcard_counter}");
        if !taken.contains(&name) {
            return name;
        }
    };

    let mut disjuncts = Vec::with_capacity(raw_disjuncts.len());
    for atoms in raw_disjuncts {
        let mut cooked = Vec::with_capacity(atoms.len());
        for atom in atoms {
            let mut cook = |t: RawTerm| -> Result<Term, TextError> {
                Ok(match t {
                    RawTerm::Var(v) => {
                        if !opts.allow_aliens && is_alien_name(&v) {
                            return Err(TextError::ReservedVariable(v));
                        }
                        Term::Var(v)
                    }
                    RawTerm::Const(c) => Term::Const(c),
                    RawTerm::Vertex(v) => Term::Vertex(v),
                    RawTerm::Wildcard => Term::Var(next_wildcard(&taken)),
                })
            };
            cooked.push(match atom {
                RawAtom::Rel { rel, args, .. } => Atom::Rel {
                    rel,
                    args: args.into_iter().map(&mut cook).collect::<Result<_, _>>()?,
                },
                RawAtom::Neq(a, b) => Atom::Neq(cook(a)?, cook(b)?),
            });
        }
        disjuncts.push(Cq::new(sig.clone(), cooked)?);
    }
    Ok(Ucq::new(disjuncts)?)
}

/// Parses the structure format (header, facts, `vertex` lines).
pub fn parse_structure(text: &str) -> Result<Structure, TextError> {
    let mut cur = Cursor::new(tokenize(text)?);
    if !matches!(cur.peek(), Some(Tok::Ident(k)) if k == "sig") {
        let (line, col) = cur.here();
        return Err(err_at(line, col, "structure must start with a `sig` clause"));
    }
    let rels = parse_sig_clause(&mut cur)?;
    let mut consts: BTreeMap<String, String> = BTreeMap::new();
    if matches!(cur.peek(), Some(Tok::Ident(k)) if k == "const") {
        cur.next();
        loop {
            let name = cur.expect_ident("constant name")?;
            cur.expect(Tok::Eq, "`=` in constant interpretation")?;
            let vertex = cur.expect_ident("vertex name")?;
            if consts.insert(name.clone(), vertex).is_some() {
                return Err(TextError::DuplicateConstant(name));
            }
            if let Some(Tok::Comma) = cur.peek() {
                cur.next();
            } else {
                break;
            }
        }
        cur.expect(Tok::Semi, "`;` after const clause")?;
    }
    let const_names: Vec<String> = consts.keys().cloned().collect();
    let sig = Signature::new(rels, const_names)?;

    let mut vertices: Vec<String> = Vec::new();
    let mut facts: Vec<Fact> = Vec::new();
    while !cur.at_end() {
        if matches!(cur.peek(), Some(Tok::Ident(k)) if k == "vertex")
            && !matches!(cur.peek2(), Some(Tok::LParen))
        {
            cur.next();
            vertices.push(cur.expect_ident("vertex name")?);
            continue;
        }
        let rel = cur.expect_ident("relation name")?;
        cur.expect(Tok::LParen, "`(`")?;
        let mut args = vec![cur.expect_ident("vertex name")?];
        while let Some(Tok::Comma) = cur.peek() {
            cur.next();
            args.push(cur.expect_ident("vertex name")?);
        }
        cur.expect(Tok::RParen, "`)`")?;
        facts.push(Fact {
            rel,
            args,
        });
    }
    Ok(Structure::new(sig, vertices, facts, consts)?)
}

/// Parses `x1*x1*x2 + x4 + 1`.
pub fn parse_polynomial(text: &str) -> Result<Polynomial, TextError> {
    let mut cur = Cursor::new(tokenize(text)?);
    let mut monomials = Vec::new();
    let mut nvars = 0u32;
    loop {
        let mut indices: Vec<u32> = Vec::new();
        let mut saw_one = false;
        loop {
            let (line, col) = cur.here();
            match cur.next() {
                Some(Spanned { tok: Tok::Int(1), .. }) => {
                    saw_one = true;
                }
                Some(Spanned { tok: Tok::Int(_), .. }) => {
                    return Err(err_at(
                        line,
                        col,
                        "coefficients other than 1 are expressed by repeating the monomial",
                    ))
                }
                Some(Spanned { tok: Tok::Ident(name), .. }) => {
                    let idx = variable_index(&name)
                        .ok_or_else(|| err_at(line, col, "expected a variable like `x3`"))?;
                    indices.push(idx);
                    nvars = nvars.max(idx);
                }
                _ => return Err(err_at(line, col, "expected a monomial factor")),
            }
            if let Some(Tok::Star) = cur.peek() {
                cur.next();
            } else {
                break;
            }
        }
        if saw_one && !indices.is_empty() {
            let (line, col) = cur.here();
            return Err(err_at(line, col, "`1` cannot be multiplied into a monomial"));
        }
        monomials.push(Monomial::new(indices)?);
        if let Some(Tok::Plus) = cur.peek() {
            cur.next();
        } else {
            break;
        }
    }
    cur.expect_end()?;
    Ok(Polynomial::new(nvars, monomials)?)
}

fn variable_index(name: &str) -> Option<u32> {
    let rest = name.strip_prefix('x')?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok().filter(|&v| v > 0)
}

/// Parses `x1=2, x2=0`; the indices must form `1..=n`.
pub fn parse_valuation(text: &str) -> Result<Valuation, TextError> {
    let mut cur = Cursor::new(tokenize(text)?);
    let mut entries: BTreeMap<u32, Count> = BTreeMap::new();
    loop {
        let (line, col) = cur.here();
        let name = cur.expect_ident("variable like `x3`")?;
        let idx = variable_index(&name)
            .ok_or_else(|| err_at(line, col, "expected a variable like `x3`"))?;
        cur.expect(Tok::Eq, "`=`")?;
        let value = cur.expect_int("natural number")?;
        if entries.insert(idx, Count::from(value)).is_some() {
            return Err(TextError::ValuationDuplicate(idx));
        }
        if let Some(Tok::Comma) = cur.peek() {
            cur.next();
        } else {
            break;
        }
    }
    cur.expect_end()?;
    let n = entries.keys().max().copied().unwrap_or(0);
    let mut values = Vec::with_capacity(n as usize);
    for i in 1..=n {
        match entries.remove(&i) {
            Some(v) => values.push(v),
            None => return Err(TextError::ValuationGap(i)),
        }
    }
    Ok(Valuation::new(values))
}

/// Parses `N`, `-N`, or `N/D`.
pub fn parse_rational(text: &str) -> Result<Rational, TextError> {
    let mut cur = Cursor::new(tokenize(text)?);
    let negative = if let Some(Tok::Minus) = cur.peek() {
        cur.next();
        true
    } else {
        false
    };
    let numer = cur.expect_int("numerator")?;
    let denom = if let Some(Tok::Slash) = cur.peek() {
        cur.next();
        cur.expect_int("denominator")?
    } else {
        1
    };
    cur.expect_end()?;
    if denom == 0 {
        return Err(TextError::ZeroDenominator);
    }
    let mut n = BigInt::from(numer);
    if negative {
        n = -n;
    }
    Ok(Rational::new(n, BigInt::from(denom)))
}

fn sig_header(sig: &Signature, interpretations: Option<&BTreeMap<String, String>>) -> String {
    let mut out = String::from("sig ");
    let rels: Vec<String> = sig.relations().map(|(n, a)| format!("{n}/{a}")).collect();
    out.push_str(&rels.join(", "));
    out.push_str(" ;");
    let consts: Vec<&str> = sig.constants().collect();
    if !consts.is_empty() {
        out.push_str(" const ");
        let rendered: Vec<String> = consts
            .iter()
            .map(|c| match interpretations.and_then(|m| m.get(*c)) {
                Some(v) => format!("{c}={v}"),
                None => (*c).to_string(),
            })
            .collect();
        out.push_str(&rendered.join(", "));
        out.push_str(" ;");
    }
    out
}

/// Renders a query; with `with_header` the output is self-contained (the
/// signature travels with the query).
pub fn query_to_text(q: &Ucq, with_header: bool) -> String {
    if with_header {
        format!("{}\n{}\n", sig_header(q.sig(), None), q)
    } else {
        format!("{q}\n")
    }
}

/// Renders the structure format; parsing it back yields an equal structure.
pub fn structure_to_text(d: &Structure) -> String {
    let mut out = sig_header(d.sig(), Some(d.consts()));
    out.push('\n');
    let mentioned: std::collections::BTreeSet<&String> =
        d.facts().iter().flat_map(|f| f.args.iter()).collect();
    for v in d.vertices() {
        if !mentioned.contains(v) {
            let _ = writeln!(out, "vertex {v}");
        }
    }
    for f in d.facts() {
        let _ = writeln!(out, "{f}");
    }
    out
}

pub fn polynomial_to_text(p: &Polynomial) -> String {
    format!("{p}\n")
}

pub fn valuation_to_text(v: &Valuation) -> String {
    format!("{v}\n")
}

pub fn rational_to_text(r: &Rational) -> String {
    if r.denom() == &BigInt::from(1) {
        format!("{}", r.numer())
    } else if r.numer().is_zero() {
        "0".to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
