//! Exact bag-semantics evaluation: homomorphism counting.
//!
//! `count_homs` is the production engine (connected-component factorization
//! plus most-constrained-first backtracking); `count_homs_naive` enumerates
//! every assignment and shares no evaluation logic with it, serving as the
//! independent oracle. Counts are arbitrary-precision naturals and never
//! overflow; scaled comparisons go through exact rationals.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::query::{Atom, Cq, Term, Ucq};
use crate::sig::{MARS, REL_R, REL_V, VENUS};
use crate::structure::{Fact, Structure};

pub type Count = BigUint;
pub type Rational = num_rational::BigRational;
/// A total mapping from a query's variables to vertices.
pub type Assignment = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("query signature is not a subsignature of the structure's")]
    SignatureMismatch,
    #[error("query mentions vertex `{0}` which is not in the structure")]
    UnknownVertex(String),
    #[error("structure signature is not an extension signature")]
    NotExtension,
    #[error("`{0}` is not a planet of the structure")]
    NotAPlanet(String),
    #[error("base constant `{constant}` is not visible from `{planet}`")]
    BaseConstantInvisible { constant: String, planet: String },
    #[error("operation is undefined on queries with inequality atoms")]
    InequalityAtom,
}

/// A term with constants resolved to the vertices interpreting them.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Slot {
    Var(String),
    Vtx(String),
}

#[derive(Debug, Clone)]
enum RAtom {
    Rel { rel: String, slots: Vec<Slot> },
    Neq(Slot, Slot),
}

impl RAtom {
    fn vars(&self) -> impl Iterator<Item = &str> {
        let slots: Vec<&Slot> = match self {
            RAtom::Rel { slots, .. } => slots.iter().collect(),
            RAtom::Neq(a, b) => alloc::vec![a, b],
        };
        slots.into_iter().filter_map(|s| match s {
            Slot::Var(v) => Some(v.as_str()),
            Slot::Vtx(_) => None,
        })
    }
}

fn resolve_term(t: &Term, d: &Structure) -> Result<Slot, EvalError> {
    match t {
        Term::Var(v) => Ok(Slot::Var(v.clone())),
        Term::Const(c) => {
            let v = d
                .interpretation(c)
                .ok_or(EvalError::SignatureMismatch)?;
            Ok(Slot::Vtx(v.to_string()))
        }
        Term::Vertex(v) => {
            if d.vertices().contains(v) {
                Ok(Slot::Vtx(v.clone()))
            } else {
                Err(EvalError::UnknownVertex(v.clone()))
            }
        }
    }
}

/// `φ ⟶ D`: the number of homomorphisms from the query's canonical
/// structure into `d` (assignments of all variables to vertices making every
/// relational atom a fact and every inequality's sides distinct). The empty
/// CQ counts exactly the empty assignment, i.e. 1.
pub fn count_homs(cq: &Cq, d: &Structure) -> Result<Count, EvalError> {
    if !cq.sig().is_subsignature_of(d.sig()) {
        return Err(EvalError::SignatureMismatch);
    }
    let mut ratoms = Vec::new();
    for atom in cq.atoms() {
        let ratom = match atom {
            Atom::Rel { rel, args } => RAtom::Rel {
                rel: rel.clone(),
                slots: args
                    .iter()
                    .map(|t| resolve_term(t, d))
                    .collect::<Result<_, _>>()?,
            },
            Atom::Neq(a, b) => RAtom::Neq(resolve_term(a, d)?, resolve_term(b, d)?),
        };
        ratoms.push(ratom);
    }

    // An inequality of a variable with itself is unsatisfiable and is the
    // one shape the per-variable candidate filter cannot see (the other
    // side is never resolved before the variable itself is assigned).
    for ratom in &ratoms {
        if let RAtom::Neq(Slot::Var(a), Slot::Var(b)) = ratom {
            if a == b {
                return Ok(Count::zero());
            }
        }
    }

    // Ground atoms either fail the whole count or contribute a factor of 1.
    let mut open = Vec::new();
    for ratom in ratoms {
        let is_ground = ratom.vars().next().is_none();
        if is_ground {
            match &ratom {
                RAtom::Rel { rel, slots } => {
                    let args: Vec<String> = slots
                        .iter()
                        .map(|s| match s {
                            Slot::Vtx(v) => v.clone(),
                            Slot::Var(_) => unreachable!(),
                        })
                        .collect();
                    if !d.has_fact(rel, &args) {
                        return Ok(Count::zero());
                    }
                }
                RAtom::Neq(Slot::Vtx(a), Slot::Vtx(b)) => {
                    if a == b {
                        return Ok(Count::zero());
                    }
                }
                RAtom::Neq(_, _) => unreachable!(),
            }
        } else {
            open.push(ratom);
        }
    }

    let mut total = Count::one();
    for component in split_ratoms(&open) {
        total *= count_component(&component, d);
        if total.is_zero() {
            return Ok(total);
        }
    }
    Ok(total)
}

/// Partitions atoms into connected components of the variable-sharing graph
/// (inequality atoms share variables too). Every atom here has >= 1 variable.
fn split_ratoms(atoms: &[RAtom]) -> Vec<Vec<RAtom>> {
    let vars: Vec<String> = {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for a in atoms {
            for v in a.vars() {
                if seen.insert(v.to_string()) {
                    out.push(v.to_string());
                }
            }
        }
        out
    };
    let index: BTreeMap<&str, usize> =
        vars.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let mut parent: Vec<usize> = (0..vars.len()).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut c = i;
        while parent[c] != c {
            let next = parent[c];
            parent[c] = r;
            c = next;
        }
        r
    }
    for a in atoms {
        let mut it = a.vars();
        if let Some(first) = it.next() {
            let fi = find(&mut parent, index[first]);
            for v in it {
                let vi = find(&mut parent, index[v]);
                parent[vi] = fi;
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<RAtom>> = BTreeMap::new();
    for a in atoms {
        let root = find(&mut parent, index[a.vars().next().expect("atom has a var")]);
        groups.entry(root).or_default().push(a.clone());
    }
    groups.into_values().collect()
}

/// Backtracking count over one connected component: repeatedly assigns the
/// variable with the fewest remaining candidates. Every atom is fully
/// checked by the candidate filter of its last-assigned variable, so leaves
/// need no re-verification.
fn count_component(atoms: &[RAtom], d: &Structure) -> Count {
    let vars: Vec<String> = {
        let mut set = BTreeSet::new();
        for a in atoms {
            for v in a.vars() {
                set.insert(v.to_string());
            }
        }
        set.into_iter().collect()
    };
    let facts_by_rel: BTreeMap<&str, Vec<&Fact>> = {
        let mut m: BTreeMap<&str, Vec<&Fact>> = BTreeMap::new();
        for f in d.facts() {
            m.entry(f.rel.as_str()).or_default().push(f);
        }
        m
    };
    let mut assigned: BTreeMap<&str, &str> = BTreeMap::new();
    rec(atoms, &vars, d, &facts_by_rel, &mut assigned)
}

fn rec<'a>(
    atoms: &'a [RAtom],
    vars: &'a [String],
    d: &'a Structure,
    facts_by_rel: &BTreeMap<&str, Vec<&'a Fact>>,
    assigned: &mut BTreeMap<&'a str, &'a str>,
) -> Count {
    if assigned.len() == vars.len() {
        return Count::one();
    }
    let mut best: Option<(&str, Vec<&str>)> = None;
    for v in vars {
        if assigned.contains_key(v.as_str()) {
            continue;
        }
        let cands = candidates(v, atoms, d, facts_by_rel, assigned);
        let better = match &best {
            None => true,
            Some((_, b)) => cands.len() < b.len(),
        };
        if better {
            let exhausted = cands.is_empty();
            best = Some((v.as_str(), cands));
            if exhausted {
                return Count::zero();
            }
        }
    }
    let (var, cands) = best.expect("some variable is unassigned");
    let mut total = Count::zero();
    for c in cands {
        assigned.insert(var, c);
        total += rec(atoms, vars, d, facts_by_rel, assigned);
        assigned.remove(var);
    }
    total
}

/// Vertices `c` such that extending the partial assignment with `v -> c`
/// keeps every atom mentioning `v` satisfiable.
fn candidates<'a>(
    v: &str,
    atoms: &[RAtom],
    d: &'a Structure,
    facts_by_rel: &BTreeMap<&str, Vec<&'a Fact>>,
    assigned: &BTreeMap<&str, &str>,
) -> Vec<&'a str> {
    let resolve = |slot: &Slot| -> Option<String> {
        match slot {
            Slot::Vtx(w) => Some(w.clone()),
            Slot::Var(u) => assigned.get(u.as_str()).map(|w| w.to_string()),
        }
    };
    let mut cands: Vec<&str> = d.vertices().iter().map(String::as_str).collect();
    for atom in atoms {
        if !atom.vars().any(|u| u == v) {
            continue;
        }
        match atom {
            RAtom::Rel { rel, slots } => {
                let facts = facts_by_rel.get(rel.as_str()).map_or(&[][..], Vec::as_slice);
                cands.retain(|c| {
                    facts.iter().any(|f| {
                        slots.iter().zip(&f.args).all(|(slot, arg)| match slot {
                            Slot::Vtx(w) => arg == w,
                            Slot::Var(u) if u == v => arg == c,
                            Slot::Var(u) => match assigned.get(u.as_str()) {
                                Some(w) => arg == w,
                                None => true,
                            },
                        })
                    })
                });
            }
            RAtom::Neq(a, b) => {
                let other = match (a, b) {
                    (Slot::Var(u), o) if u == v => resolve(o),
                    (o, Slot::Var(u)) if u == v => resolve(o),
                    _ => None,
                };
                if let Some(w) = other {
                    cands.retain(|c| *c != w);
                }
            }
        }
        if cands.is_empty() {
            break;
        }
    }
    cands
}

/// Exhaustive-enumeration oracle: iterates all `|V|^|var(φ)|` assignments
/// and checks every atom directly. Same contract as [`count_homs`]; kept
/// deliberately independent of it.
pub fn count_homs_naive(cq: &Cq, d: &Structure) -> Result<Count, EvalError> {
    if !cq.sig().is_subsignature_of(d.sig()) {
        return Err(EvalError::SignatureMismatch);
    }
    for atom in cq.atoms() {
        for t in atom.terms() {
            if let Term::Vertex(v) = t {
                if !d.vertices().contains(v) {
                    return Err(EvalError::UnknownVertex(v.clone()));
                }
            }
        }
    }
    let vars: Vec<String> = cq.var_set().into_iter().collect();
    let universe: Vec<&String> = d.vertices().iter().collect();
    let value = |t: &Term, asg: &BTreeMap<&str, &str>| -> String {
        match t {
            Term::Var(v) => asg[v.as_str()].to_string(),
            Term::Const(c) => d
                .interpretation(c)
                .expect("subsignature check guarantees interpretation")
                .to_string(),
            Term::Vertex(v) => v.clone(),
        }
    };
    let satisfied = |asg: &BTreeMap<&str, &str>| -> bool {
        cq.atoms().iter().all(|atom| match atom {
            Atom::Rel { rel, args } => {
                let ground: Vec<String> = args.iter().map(|t| value(t, asg)).collect();
                d.has_fact(rel, &ground)
            }
            Atom::Neq(a, b) => value(a, asg) != value(b, asg),
        })
    };

    if vars.is_empty() {
        let empty = BTreeMap::new();
        return Ok(if satisfied(&empty) { Count::one() } else { Count::zero() });
    }
    if universe.is_empty() {
        return Ok(Count::zero());
    }
    let mut total = Count::zero();
    let mut idx = alloc::vec![0usize; vars.len()];
    loop {
        let asg: BTreeMap<&str, &str> = vars
            .iter()
            .zip(&idx)
            .map(|(v, &i)| (v.as_str(), universe[i].as_str()))
            .collect();
        if satisfied(&asg) {
            total += Count::one();
        }
        let mut pos = vars.len();
        loop {
            if pos == 0 {
                return Ok(total);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < universe.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// `Φ ⟶ D` for a union: the sum over disjuncts.
pub fn apply(q: &Ucq, d: &Structure) -> Result<Count, EvalError> {
    let mut total = Count::zero();
    for disjunct in q.disjuncts() {
        total += count_homs(disjunct, d)?;
    }
    Ok(total)
}

/// Splits a CQ without inequalities into the connected components of its
/// variable-sharing graph; ground atoms each form their own component.
/// Counts over the pieces multiply back to the count of the whole.
pub fn component_split(cq: &Cq) -> Result<Vec<Cq>, EvalError> {
    if cq.has_inequality() {
        return Err(EvalError::InequalityAtom);
    }
    let mut var_component: BTreeMap<String, usize> = BTreeMap::new();
    let mut parent: Vec<usize> = Vec::new();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for atom in cq.atoms() {
        let vs: Vec<&str> = atom.terms().filter_map(Term::as_var).collect();
        let mut it = vs.iter();
        if let Some(first) = it.next() {
            let fi = *var_component.entry(first.to_string()).or_insert_with(|| {
                parent.push(parent.len());
                parent.len() - 1
            });
            let fr = find(&mut parent, fi);
            for v in it {
                let vi = *var_component.entry(v.to_string()).or_insert_with(|| {
                    parent.push(parent.len());
                    parent.len() - 1
                });
                let vr = find(&mut parent, vi);
                parent[vr] = fr;
            }
        }
    }
    // group atom indices: ground atoms become singletons, keeping atom order
    let mut groups: Vec<(Option<usize>, Vec<Atom>)> = Vec::new();
    for atom in cq.atoms() {
        let root = atom
            .terms()
            .filter_map(Term::as_var)
            .next()
            .map(|v| find(&mut parent, var_component[v]));
        match root {
            None => groups.push((None, alloc::vec![atom.clone()])),
            Some(r) => {
                if let Some((_, atoms)) =
                    groups.iter_mut().find(|(g, _)| *g == Some(r))
                {
                    atoms.push(atom.clone());
                } else {
                    groups.push((Some(r), alloc::vec![atom.clone()]));
                }
            }
        }
    }
    Ok(groups
        .into_iter()
        .map(|(_, atoms)| Cq::new(cq.sig().clone(), atoms).expect("component of a valid query"))
        .collect())
}

/// The planets of a structure over an extension signature: vertices `p`
/// with both `R(venus,p)` and `R(p,venus)`.
pub fn planets(d: &Structure) -> Result<BTreeSet<String>, EvalError> {
    if !d.sig().is_extension() {
        return Err(EvalError::NotExtension);
    }
    let venus = d.interpretation(VENUS).expect("extension interprets venus");
    let out = d
        .vertices()
        .iter()
        .filter(|p| {
            d.has_fact(REL_R, &[venus.to_string(), (*p).clone()])
                && d.has_fact(REL_R, &[(*p).clone(), venus.to_string()])
        })
        .cloned()
        .collect();
    Ok(out)
}

/// Planets other than Venus itself.
pub fn planets_beyond_venus(d: &Structure) -> Result<BTreeSet<String>, EvalError> {
    let venus = d
        .interpretation(VENUS)
        .ok_or(EvalError::NotExtension)?
        .to_string();
    let mut ps = planets(d)?;
    ps.remove(&venus);
    Ok(ps)
}

/// The part of the universe visible from planet `p`: the substructure
/// induced by `{a : V(p,a)}`, with the signature narrowed to the base part.
/// Errors when a base constant's interpretation is not visible.
pub fn seen(p: &str, d: &Structure) -> Result<Structure, EvalError> {
    if !planets(d)?.contains(p) {
        return Err(EvalError::NotAPlanet(p.to_string()));
    }
    let visible: BTreeSet<String> = d
        .facts_of(REL_V)
        .filter(|f| f.args[0] == p)
        .map(|f| f.args[1].clone())
        .collect();
    let base = d.sig().base_part();
    let mut consts = BTreeMap::new();
    for c in base.constants() {
        let v = d.interpretation(c).expect("constants are total");
        if !visible.contains(v) {
            return Err(EvalError::BaseConstantInvisible {
                constant: c.to_string(),
                planet: p.to_string(),
            });
        }
        consts.insert(c.to_string(), v.to_string());
    }
    let facts: Vec<Fact> = d
        .facts()
        .iter()
        .filter(|f| base.has_relation(&f.rel) && f.args.iter().all(|a| visible.contains(a)))
        .cloned()
        .collect();
    Ok(Structure::new(base, visible, facts, consts).expect("visible substructure is well-formed"))
}

/// Outcome of an exact scaled-containment check at one structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Containment {
    /// Whether `scale * (qs -> d) <= (qb -> d)`.
    pub holds: bool,
    pub small_count: Count,
    pub big_count: Count,
}

/// Compares `r * (qs ⟶ d)` against `qb ⟶ d` exactly in rationals.
pub fn check_scaled_containment_at(
    r: &Rational,
    qs: &Ucq,
    qb: &Ucq,
    d: &Structure,
) -> Result<Containment, EvalError> {
    let cs = apply(qs, d)?;
    let cb = apply(qb, d)?;
    let lhs = r * Rational::from_integer(BigInt::from(cs.clone()));
    let rhs = Rational::from_integer(BigInt::from(cb.clone()));
    Ok(Containment { holds: lhs <= rhs, small_count: cs, big_count: cb })
}

/// Mars and Venus interpreted by distinct vertices. Works for any signature
/// interpreting both constants.
pub fn is_non_trivial(d: &Structure) -> Option<bool> {
    match (d.interpretation(MARS), d.interpretation(VENUS)) {
        (Some(m), Some(v)) => Some(m != v),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::QueryError;
    use crate::sig::Signature;
    use alloc::vec;

    fn sig3() -> Signature {
        Signature::of(&[("E1", 2), ("E2", 2), ("E3", 2)], &[]).unwrap()
    }

    fn golden() -> Structure {
        let mut facts = Vec::new();
        for rel in ["E1", "E2", "E3"] {
            facts.push(Fact::new(rel, &["a", "b"]));
            facts.push(Fact::new(rel, &["b", "a"]));
        }
        Structure::new(sig3(), vec![], facts, BTreeMap::new()).unwrap()
    }

    fn e1yz() -> Cq {
        Cq::new(
            sig3(),
            vec![Atom::rel("E1", vec![Term::var("y"), Term::var("z")])],
        )
        .unwrap()
    }

    #[test]
    fn single_disjunct_counts() {
        let d = golden();
        assert_eq!(count_homs(&e1yz(), &d).unwrap(), Count::from(2u32));
        assert_eq!(count_homs_naive(&e1yz(), &d).unwrap(), Count::from(2u32));
    }

    #[test]
    fn empty_cq_counts_one() {
        let d = golden();
        let empty = Cq::empty(sig3());
        assert_eq!(count_homs(&empty, &d).unwrap(), Count::one());
        assert_eq!(count_homs_naive(&empty, &d).unwrap(), Count::one());
    }

    #[test]
    fn path_on_three_cycle() {
        let sig = Signature::of(&[("E", 2)], &[]).unwrap();
        let d = Structure::new(
            sig.clone(),
            vec![],
            vec![
                Fact::new("E", &["a", "b"]),
                Fact::new("E", &["b", "c"]),
                Fact::new("E", &["c", "a"]),
            ],
            BTreeMap::new(),
        )
        .unwrap();
        let q = Cq::new(
            sig,
            vec![
                Atom::rel("E", vec![Term::var("x"), Term::var("y")]),
                Atom::rel("E", vec![Term::var("y"), Term::var("z")]),
            ],
        )
        .unwrap();
        assert_eq!(count_homs(&q, &d).unwrap(), Count::from(3u32));
        assert_eq!(count_homs_naive(&q, &d).unwrap(), Count::from(3u32));
    }

    #[test]
    fn union_sums_disjuncts() {
        let d = golden();
        let mk = |rel: &str| {
            Cq::new(
                sig3(),
                vec![Atom::rel(rel, vec![Term::var("y"), Term::var("z")])],
            )
            .unwrap()
        };
        let psi = Ucq::new(vec![mk("E1"), mk("E2"), mk("E3")]).unwrap();
        assert_eq!(apply(&psi, &d).unwrap(), Count::from(6u32));
        let twice = Ucq::new(vec![mk("E1"), mk("E1")]).unwrap();
        assert_eq!(apply(&twice, &d).unwrap(), Count::from(4u32));
    }

    #[test]
    fn inequality_on_unary_relation() {
        let sig = Signature::of(&[("P", 1)], &[]).unwrap();
        let d = Structure::new(
            sig.clone(),
            vec![],
            vec![Fact::new("P", &["m"]), Fact::new("P", &["v"])],
            BTreeMap::new(),
        )
        .unwrap();
        let q = Cq::new(
            sig,
            vec![
                Atom::rel("P", vec![Term::var("z")]),
                Atom::rel("P", vec![Term::var("zp")]),
                Atom::Neq(Term::var("z"), Term::var("zp")),
            ],
        )
        .unwrap();
        assert_eq!(count_homs_naive(&q, &d).unwrap(), Count::from(2u32));
        assert_eq!(count_homs(&q, &d).unwrap(), Count::from(2u32));
    }

    #[test]
    fn component_split_factorizes() {
        let sig = Signature::of(&[("X2", 1), ("X4", 1)], &[]).unwrap();
        let q = Cq::new(
            sig,
            vec![
                Atom::rel("X2", vec![Term::var("u")]),
                Atom::rel("X4", vec![Term::var("v")]),
                Atom::rel("X2", vec![Term::var("w")]),
            ],
        )
        .unwrap();
        let parts = component_split(&q).unwrap();
        assert_eq!(parts.len(), 3);

        let sig = Signature::of(&[("E", 2)], &[]).unwrap();
        let q = Cq::new(
            sig,
            vec![
                Atom::rel("E", vec![Term::var("x"), Term::var("y")]),
                Atom::rel("E", vec![Term::var("y"), Term::var("z")]),
            ],
        )
        .unwrap();
        assert_eq!(component_split(&q).unwrap().len(), 1);
    }

    #[test]
    fn self_inequality_is_unsatisfiable() {
        // regression: the candidate filter alone cannot see x != x
        let sig = Signature::of(&[("P", 1)], &[]).unwrap();
        let d = Structure::new(
            sig.clone(),
            vec![],
            vec![Fact::new("P", &["a"]), Fact::new("P", &["b"])],
            BTreeMap::new(),
        )
        .unwrap();
        let q = Cq::new(
            sig,
            vec![
                Atom::rel("P", vec![Term::var("z")]),
                Atom::Neq(Term::var("z"), Term::var("z")),
            ],
        )
        .unwrap();
        assert_eq!(count_homs(&q, &d).unwrap(), Count::zero());
        assert_eq!(count_homs_naive(&q, &d).unwrap(), Count::zero());
    }

    #[test]
    fn component_split_rejects_inequalities() {
        let sig = Signature::of(&[("P", 1)], &[]).unwrap();
        let q = Cq::new(
            sig,
            vec![
                Atom::rel("P", vec![Term::var("z")]),
                Atom::Neq(Term::var("z"), Term::var("z")),
            ],
        )
        .unwrap();
        assert!(matches!(component_split(&q), Err(EvalError::InequalityAtom)));
    }

    #[test]
    fn signature_mismatch_detected() {
        let d = golden();
        let other = Signature::of(&[("F", 2)], &[]).unwrap();
        let q = Cq::new(
            other,
            vec![Atom::rel("F", vec![Term::var("x"), Term::var("y")])],
        )
        .unwrap();
        assert!(matches!(count_homs(&q, &d), Err(EvalError::SignatureMismatch)));
        assert!(matches!(
            count_homs_naive(&q, &d),
            Err(EvalError::SignatureMismatch)
        ));
    }

    #[test]
    fn ground_atom_zeroes_or_passes() {
        let sig = Signature::of(&[("P", 1)], &["c"]).unwrap();
        let mut consts = BTreeMap::new();
        consts.insert("c".to_string(), "v".to_string());
        let d = Structure::new(
            sig.clone(),
            vec!["v".to_string(), "w".to_string()],
            vec![Fact::new("P", &["w"])],
            consts,
        )
        .unwrap();
        let q = Cq::new(sig.clone(), vec![Atom::rel("P", vec![Term::constant("c")])]).unwrap();
        assert_eq!(count_homs(&q, &d).unwrap(), Count::zero());
        let q2 = Cq::new(
            sig,
            vec![
                Atom::rel("P", vec![Term::constant("c")]),
                Atom::rel("P", vec![Term::var("x")]),
            ],
        )
        .unwrap();
        // ground failure zeroes the whole count even with satisfiable parts
        assert_eq!(count_homs(&q2, &d).unwrap(), Count::zero());
        assert_eq!(count_homs_naive(&q2, &d).unwrap(), Count::zero());
    }

    #[test]
    fn unknown_vertex_is_an_error() {
        let d = golden();
        let q = Cq::new(
            sig3(),
            vec![Atom::rel("E1", vec![Term::vertex("zz"), Term::var("y")])],
        )
        .unwrap();
        assert!(matches!(count_homs(&q, &d), Err(EvalError::UnknownVertex(_))));
    }

    #[test]
    fn scaled_containment_compares_exactly() {
        let d = golden();
        let psi = Ucq::from_cq(e1yz());
        let r1 = Rational::from_integer(BigInt::from(1));
        let c = check_scaled_containment_at(&r1, &psi, &psi, &d).unwrap();
        assert!(c.holds);
        assert_eq!(c.small_count, Count::from(2u32));
        // 2 * 2 > 2: fails
        let r2 = Rational::from_integer(BigInt::from(2));
        assert!(!check_scaled_containment_at(&r2, &psi, &psi, &d).unwrap().holds);
        // 3/2 * 2 = 3 > 2: fails; 1/2 * 2 = 1 <= 2 holds
        let r32 = Rational::new(BigInt::from(3), BigInt::from(2));
        assert!(!check_scaled_containment_at(&r32, &psi, &psi, &d).unwrap().holds);
        let r12 = Rational::new(BigInt::from(1), BigInt::from(2));
        assert!(check_scaled_containment_at(&r12, &psi, &psi, &d).unwrap().holds);
    }

    #[test]
    fn vertex_terms_count_like_fixed_points() {
        let d = golden();
        let q = Cq::new(
            sig3(),
            vec![Atom::rel("E1", vec![Term::vertex("a"), Term::var("y")])],
        )
        .unwrap();
        assert_eq!(count_homs(&q, &d).unwrap(), Count::one());
        assert_eq!(count_homs_naive(&q, &d).unwrap(), Count::one());
    }

    #[test]
    fn ucq_requires_disjunct() {
        assert!(matches!(Ucq::new(vec![]), Err(QueryError::EmptyUnion)));
    }
}
