//! Relational signatures, plain (`Σ`) or extended with the visibility and
//! reachability relations and the two distinguished constants (`Σ⁺`).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// Binary visibility relation of extended signatures.
pub const REL_V: &str = "V";
/// Binary reachability relation of extended signatures.
pub const REL_R: &str = "R";
/// The Venus constant of extended signatures.
pub const VENUS: &str = "venus";
/// The Mars constant of extended signatures.
pub const MARS: &str = "mars";

const SPECIAL_NAMES: [&str; 4] = [REL_V, REL_R, VENUS, MARS];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SigError {
    #[error("relation `{0}` must have arity >= 1")]
    ZeroArity(String),
    #[error("name `{0}` is used both as a relation and as a constant")]
    NameClash(String),
    #[error("signature is not a base signature (contains V, R, mars or venus)")]
    NotBase,
    #[error("signature is not an extension signature (missing V/2, R/2, mars or venus)")]
    NotExtension,
}

/// A relational signature: relation names with arities plus constant names.
///
/// A *base* signature contains none of `V`, `R`, `mars`, `venus`; its
/// *extension* adds exactly `V/2`, `R/2` and the constants `mars`, `venus`.
/// Signatures outside both classes can be constructed (e.g. `{P/1}` plus the
/// two constants) and evaluated against, but the Σ/Σ⁺-preconditioned
/// transformations reject them.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Signature {
    relations: BTreeMap<String, usize>,
    constants: BTreeSet<String>,
}

impl Signature {
    pub fn new<R, C>(relations: R, constants: C) -> Result<Self, SigError>
    where
        R: IntoIterator<Item = (String, usize)>,
        C: IntoIterator<Item = String>,
    {
        let relations: BTreeMap<String, usize> = relations.into_iter().collect();
        let constants: BTreeSet<String> = constants.into_iter().collect();
        for (name, arity) in &relations {
            if *arity == 0 {
                return Err(SigError::ZeroArity(name.clone()));
            }
            if constants.contains(name) {
                return Err(SigError::NameClash(name.clone()));
            }
        }
        Ok(Signature { relations, constants })
    }

    /// Convenience constructor from string literals.
    pub fn of(relations: &[(&str, usize)], constants: &[&str]) -> Result<Self, SigError> {
        Signature::new(
            relations.iter().map(|(n, a)| (n.to_string(), *a)),
            constants.iter().map(|c| c.to_string()),
        )
    }

    pub fn arity(&self, rel: &str) -> Option<usize> {
        self.relations.get(rel).copied()
    }

    pub fn has_relation(&self, rel: &str) -> bool {
        self.relations.contains_key(rel)
    }

    pub fn has_constant(&self, name: &str) -> bool {
        self.constants.contains(name)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, usize)> {
        self.relations.iter().map(|(n, a)| (n.as_str(), *a))
    }

    pub fn constants(&self) -> impl Iterator<Item = &str> {
        self.constants.iter().map(|c| c.as_str())
    }

    /// True when none of the four special names occur.
    pub fn is_base(&self) -> bool {
        SPECIAL_NAMES
            .iter()
            .all(|n| !self.relations.contains_key(*n) && !self.constants.contains(*n))
    }

    /// True when `V/2`, `R/2`, `mars` and `venus` are all present.
    pub fn is_extension(&self) -> bool {
        self.arity(REL_V) == Some(2)
            && self.arity(REL_R) == Some(2)
            && self.constants.contains(VENUS)
            && self.constants.contains(MARS)
    }

    /// Σ ↦ Σ⁺. Errors unless `self` is a base signature.
    pub fn extend(&self) -> Result<Signature, SigError> {
        if !self.is_base() {
            return Err(SigError::NotBase);
        }
        let mut relations = self.relations.clone();
        relations.insert(REL_V.to_string(), 2);
        relations.insert(REL_R.to_string(), 2);
        let mut constants = self.constants.clone();
        constants.insert(VENUS.to_string());
        constants.insert(MARS.to_string());
        Ok(Signature { relations, constants })
    }

    /// Σ⁺ ↦ Σ: strips the four special names. Identity on base signatures.
    pub fn base_part(&self) -> Signature {
        let relations = self
            .relations
            .iter()
            .filter(|(n, _)| n.as_str() != REL_V && n.as_str() != REL_R)
            .map(|(n, a)| (n.clone(), *a))
            .collect();
        let constants = self
            .constants
            .iter()
            .filter(|c| c.as_str() != VENUS && c.as_str() != MARS)
            .cloned()
            .collect();
        Signature { relations, constants }
    }

    /// Every relation of `self` present in `other` with the same arity and
    /// every constant of `self` present in `other`.
    pub fn is_subsignature_of(&self, other: &Signature) -> bool {
        self.relations
            .iter()
            .all(|(n, a)| other.arity(n) == Some(*a))
            && self.constants.iter().all(|c| other.has_constant(c))
    }

    /// Union with extra relations/constants; errors on arity conflicts.
    pub fn with_added(
        &self,
        relations: &[(&str, usize)],
        constants: &[&str],
    ) -> Result<Signature, SigError> {
        let mut rels: Vec<(String, usize)> =
            self.relations.iter().map(|(n, a)| (n.clone(), *a)).collect();
        for (n, a) in relations {
            rels.push((n.to_string(), *a));
        }
        let mut consts: Vec<String> = self.constants.iter().cloned().collect();
        consts.extend(constants.iter().map(|c| c.to_string()));
        Signature::new(rels, consts)
    }
}

/// The syntactic Venus atoms of a signature's base part: for every base
/// relation, every argument tuple over `venus` and the base constants that
/// mentions `venus` at least once. Returned as (relation, argument names)
/// where `venus` stands for the Venus constant itself.
pub fn venus_atom_tuples(sig: &Signature) -> Vec<(String, Vec<String>)> {
    let base = sig.base_part();
    let mut alphabet: Vec<String> = alloc::vec![VENUS.to_string()];
    alphabet.extend(base.constants().map(|c| c.to_string()));
    let mut out = Vec::new();
    for (rel, arity) in base.relations() {
        let mut idx = alloc::vec![0usize; arity];
        'tuples: loop {
            let args: Vec<String> = idx.iter().map(|&i| alphabet[i].clone()).collect();
            if args.iter().any(|a| a == VENUS) {
                out.push((rel.to_string(), args));
            }
            let mut pos = arity;
            loop {
                if pos == 0 {
                    break 'tuples;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < alphabet.len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }
    out.sort();
    out
}
