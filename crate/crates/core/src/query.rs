//! Terms, atoms, conjunctive queries and unions of conjunctive queries.
//!
//! All queries are Boolean; every variable is implicitly existentially
//! quantified. Atoms of a CQ are an ordered sequence and duplicates are kept
//! (a repeated atom states the same constraint twice and does not change
//! homomorphism counts).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::sig::Signature;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("relation `{rel}` has arity {expected}, got {got} arguments")]
    ArityMismatch { rel: String, expected: usize, got: usize },
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("inequality variable `{0}` does not occur in any relational atom")]
    FloatingInequalityVariable(String),
    #[error("union of conjunctive queries needs at least one disjunct")]
    EmptyUnion,
    #[error("disjuncts are over different signatures")]
    MixedSignatures,
    #[error("substitution domain contains `{0}` which is not a variable of the query")]
    SubstitutionOutsideVars(String),
    #[error("cannot conjoin queries over different signatures")]
    ConjoinSignatureMismatch,
}

/// A term: a query variable, a signature constant, or a literal vertex of
/// some structure (the latter only arise by substituting a mapping into a
/// query, never from user input).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
    Vertex(String),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(name.to_string())
    }

    pub fn vertex(name: &str) -> Term {
        Term::Vertex(name.to_string())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "@{c}"),
            Term::Vertex(v) => write!(f, "`{v}"),
        }
    }
}

/// A relational atom `R(t1,..,tk)` or an inequality `t1 != t2`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Atom {
    Rel { rel: String, args: Vec<Term> },
    Neq(Term, Term),
}

impl Atom {
    pub fn rel(name: &str, args: Vec<Term>) -> Atom {
        Atom::Rel { rel: name.to_string(), args }
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        let terms: Vec<&Term> = match self {
            Atom::Rel { args, .. } => args.iter().collect(),
            Atom::Neq(a, b) => alloc::vec![a, b],
        };
        terms.into_iter()
    }

    /// An atom is pleasant when it contains at least one variable.
    pub fn has_variable(&self) -> bool {
        self.terms().any(Term::is_var)
    }

    pub fn is_inequality(&self) -> bool {
        matches!(self, Atom::Neq(_, _))
    }

    fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> Atom {
        match self {
            Atom::Rel { rel, args } => Atom::Rel {
                rel: rel.clone(),
                args: args.iter().map(&mut *f).collect(),
            },
            Atom::Neq(a, b) => Atom::Neq(f(a), f(b)),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Rel { rel, args } => {
                write!(f, "{rel}(")?;
                for (i, t) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ")")
            }
            Atom::Neq(a, b) => write!(f, "{a} != {b}"),
        }
    }
}

/// A Boolean conjunctive query over a fixed signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cq {
    sig: Signature,
    atoms: Vec<Atom>,
}

impl Cq {
    /// Validates arities, relation and constant names, and that every
    /// variable of an inequality atom also occurs in a relational atom.
    pub fn new(sig: Signature, atoms: Vec<Atom>) -> Result<Cq, QueryError> {
        let mut rel_vars: BTreeSet<&str> = BTreeSet::new();
        for atom in &atoms {
            if let Atom::Rel { rel, args } = atom {
                let arity = sig
                    .arity(rel)
                    .ok_or_else(|| QueryError::UnknownRelation(rel.clone()))?;
                if args.len() != arity {
                    return Err(QueryError::ArityMismatch {
                        rel: rel.clone(),
                        expected: arity,
                        got: args.len(),
                    });
                }
                for t in args {
                    if let Some(v) = t.as_var() {
                        rel_vars.insert(v);
                    }
                }
            }
        }
        for atom in &atoms {
            for t in atom.terms() {
                if let Term::Const(c) = t {
                    if !sig.has_constant(c) {
                        return Err(QueryError::UnknownConstant(c.clone()));
                    }
                }
            }
            if let Atom::Neq(a, b) = atom {
                for t in [a, b] {
                    if let Some(v) = t.as_var() {
                        if !rel_vars.contains(v) {
                            return Err(QueryError::FloatingInequalityVariable(v.to_string()));
                        }
                    }
                }
            }
        }
        Ok(Cq { sig, atoms })
    }

    /// The empty (always-true) CQ.
    pub fn empty(sig: Signature) -> Cq {
        Cq { sig, atoms: Vec::new() }
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn has_inequality(&self) -> bool {
        self.atoms.iter().any(Atom::is_inequality)
    }

    /// Variables in order of first occurrence.
    pub fn vars_in_order(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for atom in &self.atoms {
            for t in atom.terms() {
                if let Some(v) = t.as_var() {
                    if seen.insert(v.to_string()) {
                        out.push(v.to_string());
                    }
                }
            }
        }
        out
    }

    pub fn var_set(&self) -> BTreeSet<String> {
        self.vars_in_order().into_iter().collect()
    }

    /// Constant names occurring in atoms (not the whole signature).
    pub fn constants_used(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for atom in &self.atoms {
            for t in atom.terms() {
                if let Term::Const(c) = t {
                    out.insert(c.clone());
                }
            }
        }
        out
    }

    /// Every atom contains at least one variable (vacuously true when empty).
    pub fn is_pleasant(&self) -> bool {
        self.atoms.iter().all(Atom::has_variable)
    }

    /// Replaces each mapped variable by a literal vertex (`Φ[h]`).
    /// The domain of `h` must be a subset of the query's variables.
    pub fn substitute(&self, h: &BTreeMap<String, String>) -> Result<Cq, QueryError> {
        let vars = self.var_set();
        for v in h.keys() {
            if !vars.contains(v) {
                return Err(QueryError::SubstitutionOutsideVars(v.clone()));
            }
        }
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                a.map_terms(&mut |t| match t {
                    Term::Var(v) => match h.get(v) {
                        Some(vertex) => Term::Vertex(vertex.clone()),
                        None => t.clone(),
                    },
                    other => other.clone(),
                })
            })
            .collect();
        // Substitution cannot invalidate a well-formed query.
        Ok(Cq { sig: self.sig.clone(), atoms })
    }

    /// Injectively renames variables. Names not in the map stay put.
    pub(crate) fn rename_vars(&self, map: &BTreeMap<String, String>) -> Cq {
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                a.map_terms(&mut |t| match t {
                    Term::Var(v) => match map.get(v) {
                        Some(n) => Term::Var(n.clone()),
                        None => t.clone(),
                    },
                    other => other.clone(),
                })
            })
            .collect();
        Cq { sig: self.sig.clone(), atoms }
    }

    /// Removes exact duplicates among the relational atoms (a repeated atom
    /// states the same constraint twice, so homomorphism counts are
    /// unchanged). Never applied implicitly; transformations keep the atom
    /// sequences they produce.
    pub fn deduplicated(&self) -> Cq {
        let mut seen = BTreeSet::new();
        let atoms = self
            .atoms
            .iter()
            .filter(|atom| match atom {
                Atom::Rel { .. } => seen.insert((*atom).clone()),
                Atom::Neq(_, _) => true,
            })
            .cloned()
            .collect();
        Cq { sig: self.sig.clone(), atoms }
    }

    /// Variable-disjoint conjunction: variables of `other` colliding with
    /// ours are renamed first, so counts multiply for connected components.
    pub fn conjoin(&self, other: &Cq) -> Result<Cq, QueryError> {
        if self.sig != other.sig {
            return Err(QueryError::ConjoinSignatureMismatch);
        }
        let mut taken: BTreeSet<String> = self.var_set();
        let renamed = disjoint_copy(other, &mut taken);
        let mut atoms = self.atoms.clone();
        atoms.extend(renamed.atoms);
        Ok(Cq { sig: self.sig.clone(), atoms })
    }
}

impl fmt::Display for Cq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "true");
        }
        for (i, atom) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, " & ")?;
            }
            write!(f, "{atom}")?;
        }
        Ok(())
    }
}

/// A union of conjunctive queries over a common signature.
///
/// The variable sets of distinct disjuncts are pairwise disjoint; the
/// constructor renames to enforce this.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ucq {
    disjuncts: Vec<Cq>,
}

impl Ucq {
    pub fn new(disjuncts: Vec<Cq>) -> Result<Ucq, QueryError> {
        let Some(first) = disjuncts.first() else {
            return Err(QueryError::EmptyUnion);
        };
        let sig = first.sig.clone();
        if disjuncts.iter().any(|d| d.sig != sig) {
            return Err(QueryError::MixedSignatures);
        }
        let mut taken: BTreeSet<String> = BTreeSet::new();
        let disjuncts = disjuncts
            .iter()
            .map(|d| disjoint_copy(d, &mut taken))
            .collect();
        Ok(Ucq { disjuncts })
    }

    pub fn from_cq(cq: Cq) -> Ucq {
        Ucq { disjuncts: alloc::vec![cq] }
    }

    pub fn sig(&self) -> &Signature {
        self.disjuncts[0].sig()
    }

    pub fn disjuncts(&self) -> &[Cq] {
        &self.disjuncts
    }

    pub fn is_pleasant(&self) -> bool {
        self.disjuncts.iter().all(Cq::is_pleasant)
    }

    pub fn has_inequality(&self) -> bool {
        self.disjuncts.iter().any(Cq::has_inequality)
    }
}

impl fmt::Display for Ucq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.disjuncts.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Returns a copy of `cq` whose variables avoid `taken`, adding the copy's
/// variables to `taken`.
fn disjoint_copy(cq: &Cq, taken: &mut BTreeSet<String>) -> Cq {
    let mut map = BTreeMap::new();
    for v in cq.vars_in_order() {
        if taken.contains(&v) {
            let fresh = fresh_name(&v, |n| taken.contains(n) || cq.var_set().contains(n));
            taken.insert(fresh.clone());
            map.insert(v, fresh);
        } else {
            taken.insert(v);
        }
    }
    if map.is_empty() {
        cq.clone()
    } else {
        cq.rename_vars(&map)
    }
}

/// Smallest decorated variant of `base` not rejected by `taken`.
pub(crate) fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> String {
    if !taken(base) {
        return base.to_string();
    }
    let mut k: u64 = 2;
    loop {
        let candidate = format!("{base}_{k}");
        if !taken(&candidate) {
            return candidate;
        }
        k += 1;
    }
}
