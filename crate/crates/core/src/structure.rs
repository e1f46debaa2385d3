//! Finite relational structures and their classification flags.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::query::{Atom, Cq, Term};
use crate::sig::{Signature, REL_R, REL_V, VENUS};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("fact for `{rel}` has {got} arguments, arity is {expected}")]
    ArityMismatch { rel: String, expected: usize, got: usize },
    #[error("constant `{0}` is not interpreted")]
    UninterpretedConstant(String),
    #[error("interpretation given for `{0}` which is not a signature constant")]
    UnknownConstant(String),
    #[error("constant `{constant}` is interpreted by `{vertex}` which is not a vertex")]
    ConstantVertexMissing { constant: String, vertex: String },
    #[error("restriction set contains `{0}` which is not a vertex")]
    RestrictOutsideVertices(String),
    #[error("restriction would drop constant `{constant}` (interpreted by `{vertex}`)")]
    RestrictDropsConstant { constant: String, vertex: String },
    #[error("structure signature is not an extension signature")]
    NotExtension,
    #[error("canonical structure of a query with inequality atoms is undefined")]
    InequalityAtom,
}

/// A single ground fact `R(v1,..,vk)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fact {
    pub rel: String,
    pub args: Vec<String>,
}

impl Fact {
    pub fn new(rel: &str, args: &[&str]) -> Fact {
        Fact {
            rel: rel.to_string(),
            args: args.iter().map(|a| a.to_string()).collect(),
        }
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.rel)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// Classification of a structure over an extension signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StructureFlags {
    /// Satisfies every Venus atom plus `V(venus,venus)` and `R(venus,venus)`.
    pub good: bool,
    /// Good, and Venus sees only itself through `V`.
    pub foggy: bool,
    /// Good, foggy, and Venus carries the only `R` self-loop.
    pub very_good: bool,
    /// Mars and Venus are interpreted by distinct vertices.
    pub non_trivial: bool,
}

/// A finite relational structure: vertices, facts (a set, as bag-set
/// semantics demands) and a total interpretation of the signature's
/// constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    sig: Signature,
    vertices: BTreeSet<String>,
    facts: BTreeSet<Fact>,
    consts: BTreeMap<String, String>,
}

impl Structure {
    /// Vertices mentioned in facts are added to the vertex set. Constant
    /// interpretations must land on vertices already present (facts or the
    /// explicit vertex list); they are never auto-added.
    pub fn new<V, F>(
        sig: Signature,
        vertices: V,
        facts: F,
        consts: BTreeMap<String, String>,
    ) -> Result<Structure, StructureError>
    where
        V: IntoIterator<Item = String>,
        F: IntoIterator<Item = Fact>,
    {
        let mut vertex_set: BTreeSet<String> = vertices.into_iter().collect();
        let facts: BTreeSet<Fact> = facts.into_iter().collect();
        for fact in &facts {
            let arity = sig
                .arity(&fact.rel)
                .ok_or_else(|| StructureError::UnknownRelation(fact.rel.clone()))?;
            if fact.args.len() != arity {
                return Err(StructureError::ArityMismatch {
                    rel: fact.rel.clone(),
                    expected: arity,
                    got: fact.args.len(),
                });
            }
            for a in &fact.args {
                vertex_set.insert(a.clone());
            }
        }
        for name in consts.keys() {
            if !sig.has_constant(name) {
                return Err(StructureError::UnknownConstant(name.clone()));
            }
        }
        for c in sig.constants() {
            match consts.get(c) {
                None => return Err(StructureError::UninterpretedConstant(c.to_string())),
                Some(v) if !vertex_set.contains(v) => {
                    return Err(StructureError::ConstantVertexMissing {
                        constant: c.to_string(),
                        vertex: v.clone(),
                    })
                }
                _ => {}
            }
        }
        Ok(Structure { sig, vertices: vertex_set, facts, consts })
    }

    pub fn sig(&self) -> &Signature {
        &self.sig
    }

    pub fn vertices(&self) -> &BTreeSet<String> {
        &self.vertices
    }

    pub fn facts(&self) -> &BTreeSet<Fact> {
        &self.facts
    }

    pub fn consts(&self) -> &BTreeMap<String, String> {
        &self.consts
    }

    pub fn interpretation(&self, constant: &str) -> Option<&str> {
        self.consts.get(constant).map(String::as_str)
    }

    pub fn has_fact(&self, rel: &str, args: &[String]) -> bool {
        self.facts
            .contains(&Fact { rel: rel.to_string(), args: args.to_vec() })
    }

    pub fn facts_of<'a>(&'a self, rel: &'a str) -> impl Iterator<Item = &'a Fact> {
        self.facts.iter().filter(move |f| f.rel == rel)
    }

    /// The substructure induced by `keep`: same signature, vertex set
    /// `keep`, and the facts mentioning only vertices of `keep`.
    pub fn restrict(&self, keep: &BTreeSet<String>) -> Result<Structure, StructureError> {
        for v in keep {
            if !self.vertices.contains(v) {
                return Err(StructureError::RestrictOutsideVertices(v.clone()));
            }
        }
        for (c, v) in &self.consts {
            if !keep.contains(v) {
                return Err(StructureError::RestrictDropsConstant {
                    constant: c.clone(),
                    vertex: v.clone(),
                });
            }
        }
        let facts = self
            .facts
            .iter()
            .filter(|f| f.args.iter().all(|a| keep.contains(a)))
            .cloned()
            .collect();
        Ok(Structure {
            sig: self.sig.clone(),
            vertices: keep.clone(),
            facts,
            consts: self.consts.clone(),
        })
    }

    /// Good / foggy / very-good / non-trivial flags. The signature must be
    /// an extension signature.
    pub fn classify(&self) -> Result<StructureFlags, StructureError> {
        if !self.sig.is_extension() {
            return Err(StructureError::NotExtension);
        }
        let venus = self.consts.get(VENUS).expect("constants are total").clone();
        let mars = self.consts.get(crate::sig::MARS).expect("constants are total");

        let good = self.satisfies_good(&venus);
        let foggy = good
            && self
                .facts_of(REL_V)
                .filter(|f| f.args[0] == venus)
                .all(|f| f.args[1] == venus);
        let very_good = good
            && foggy
            && self
                .facts
                .iter()
                .filter(|f| f.rel == REL_R && f.args[0] == f.args[1])
                .all(|f| f.args[0] == venus);
        let non_trivial = *mars != venus;
        Ok(StructureFlags { good, foggy, very_good, non_trivial })
    }

    /// `V(venus,venus)`, `R(venus,venus)`, and every ground Venus atom over
    /// the base part of the signature.
    fn satisfies_good(&self, venus: &str) -> bool {
        let vv = [venus.to_string(), venus.to_string()];
        if !self.has_fact(REL_V, &vv) || !self.has_fact(REL_R, &vv) {
            return false;
        }
        venus_facts(&self.sig, &self.consts, venus)
            .into_iter()
            .all(|f| self.facts.contains(&f))
    }
}

/// The ground facts demanded by goodness: the syntactic Venus atoms pushed
/// through the constant interpretation. (The explicit `V`/`R` self-loops are
/// not included.)
pub(crate) fn venus_facts(
    sig: &Signature,
    consts: &BTreeMap<String, String>,
    venus: &str,
) -> Vec<Fact> {
    let mut out: Vec<Fact> = crate::sig::venus_atom_tuples(sig)
        .into_iter()
        .map(|(rel, args)| Fact {
            rel,
            args: args
                .iter()
                .map(|name| {
                    if name == VENUS {
                        venus.to_string()
                    } else {
                        consts.get(name).cloned().unwrap_or_else(|| name.clone())
                    }
                })
                .collect(),
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// The canonical structure of a CQ: vertices are its variables and the
/// constants occurring in it, facts are its relational atoms. The result's
/// signature narrows the constants to the occurring ones (so the constant
/// interpretation stays total). Inequality atoms have no structure
/// counterpart and are rejected.
pub fn canonical_structure(cq: &Cq) -> Result<Structure, StructureError> {
    if cq.has_inequality() {
        return Err(StructureError::InequalityAtom);
    }
    let used: BTreeSet<String> = cq.constants_used();
    let narrowed = Signature::new(
        cq.sig().relations().map(|(n, a)| (n.to_string(), a)),
        used.iter().cloned(),
    )
    .expect("narrowing keeps arities");
    let mut vertices: BTreeSet<String> = cq.var_set();
    vertices.extend(used.iter().cloned());
    let mut consts = BTreeMap::new();
    for c in &used {
        consts.insert(c.clone(), c.clone());
    }
    let mut facts = BTreeSet::new();
    for atom in cq.atoms() {
        if let Atom::Rel { rel, args } = atom {
            let mut fact_args = Vec::with_capacity(args.len());
            for t in args {
                let name = match t {
                    Term::Var(v) => v.clone(),
                    Term::Const(c) => c.clone(),
                    Term::Vertex(v) => {
                        vertices.insert(v.clone());
                        v.clone()
                    }
                };
                fact_args.push(name);
            }
            facts.insert(Fact { rel: rel.clone(), args: fact_args });
        }
    }
    Structure::new(narrowed, vertices, facts, consts)
}
