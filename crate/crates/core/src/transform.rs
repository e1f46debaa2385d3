//! The Venus/Mars transformations: the ground Good query, relativization,
//! R-cliques, CQ-ization, marsification, the eta side conditions, and trip
//! enumeration with the trip-wise counting scheme.
//!
//! Aliens, the fresh variables introduced by CQ-ization, live in the
//! reserved namespace `x1, x2, ...`; inputs using those names are rejected
//! so freshness never requires renaming.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::eval::{count_homs, planets, seen, Count, EvalError};
use crate::query::{fresh_name, Atom, Cq, QueryError, Term, Ucq};
use crate::sig::{venus_atom_tuples, SigError, Signature, MARS, REL_R, REL_V, VENUS};
use crate::structure::{Fact, Structure, StructureError};

/// Default bound on `|planets|^arity` when materializing trips.
pub const DEFAULT_TRIP_CAP: usize = 1 << 21;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum XformError {
    #[error("operation requires a base signature")]
    NotBase,
    #[error("query is not pleasant (an atom has no variable)")]
    NotPleasant,
    #[error("operation is undefined on queries with inequality atoms")]
    InequalityAtom,
    #[error("term `{0}` already occurs in the query")]
    VariableOccurs(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("variable `{0}` collides with the reserved alien namespace")]
    AlienCollision(String),
    #[error("eta needs at least one conjunct")]
    ZeroConjuncts,
    #[error("structure is not good")]
    NotGood,
    #[error("trip space {space} exceeds cap {cap}")]
    TripSpaceExceeded { space: usize, cap: usize },
    #[error(transparent)]
    Sig(#[from] SigError),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// The reserved name of the `k`-th alien variable (1-based).
pub fn alien_name(k: usize) -> String {
    format!("x{k}")
}

/// True for names of the form `x<digits>`.
pub fn is_alien_name(name: &str) -> bool {
    name.len() > 1
        && name.starts_with('x')
        && name[1..].bytes().all(|b| b.is_ascii_digit())
}

fn venus() -> Term {
    Term::constant(VENUS)
}

fn planet_atoms(x: &Term) -> [Atom; 2] {
    [
        Atom::rel(REL_R, alloc::vec![venus(), x.clone()]),
        Atom::rel(REL_R, alloc::vec![x.clone(), venus()]),
    ]
}

/// The variable-free query whose satisfaction makes a structure good:
/// `V(venus,venus) ∧ R(venus,venus)` plus every Venus atom of the base
/// signature.
pub fn good_query(sig: &Signature) -> Result<Cq, XformError> {
    if !sig.is_base() {
        return Err(XformError::NotBase);
    }
    let ext = sig.extend()?;
    let mut atoms = alloc::vec![
        Atom::rel(REL_V, alloc::vec![venus(), venus()]),
        Atom::rel(REL_R, alloc::vec![venus(), venus()]),
    ];
    for (rel, args) in venus_atom_tuples(sig) {
        atoms.push(Atom::Rel {
            rel,
            args: args.iter().map(|name| Term::constant(name)).collect(),
        });
    }
    Ok(Cq::new(ext, atoms)?)
}

/// Relativization `x ∟ φ`: the query `φ ∧ Planet(x) ∧ ⋀_{y ∈ var(φ)} V(x,y)`
/// over the extended signature. `x` may be a variable (fresh for `φ`), a
/// constant, or a literal vertex.
pub fn relativize(x: &Term, cq: &Cq) -> Result<Cq, XformError> {
    if !cq.sig().is_base() {
        return Err(XformError::NotBase);
    }
    if cq.has_inequality() {
        return Err(XformError::InequalityAtom);
    }
    if !cq.is_pleasant() {
        return Err(XformError::NotPleasant);
    }
    if let Term::Var(v) = x {
        if cq.var_set().contains(v) {
            return Err(XformError::VariableOccurs(v.clone()));
        }
    }
    let ext = cq.sig().extend()?;
    let mut atoms: Vec<Atom> = cq.atoms().to_vec();
    atoms.extend(planet_atoms(x));
    for y in cq.vars_in_order() {
        atoms.push(Atom::rel(REL_V, alloc::vec![x.clone(), Term::Var(y)]));
    }
    Ok(Cq::new(ext, atoms)?)
}

/// `RClique(x1,..,xj)`: each variable on a planet, all pairs connected by
/// `R` in both directions.
pub fn rclique(sig: &Signature, vars: &[String]) -> Result<Cq, XformError> {
    if !sig.is_base() {
        return Err(XformError::NotBase);
    }
    let mut seen_names = BTreeSet::new();
    for v in vars {
        if !seen_names.insert(v.clone()) {
            return Err(XformError::DuplicateVariable(v.clone()));
        }
    }
    let ext = sig.extend()?;
    Ok(Cq::new(ext, rclique_atoms(vars))?)
}

fn rclique_atoms(vars: &[String]) -> Vec<Atom> {
    let mut atoms = Vec::new();
    for v in vars {
        atoms.extend(planet_atoms(&Term::Var(v.clone())));
    }
    for (i, vi) in vars.iter().enumerate() {
        for vj in &vars[i + 1..] {
            atoms.push(Atom::rel(
                REL_R,
                alloc::vec![Term::var(vi), Term::var(vj)],
            ));
            atoms.push(Atom::rel(
                REL_R,
                alloc::vec![Term::var(vj), Term::var(vi)],
            ));
        }
    }
    atoms
}

/// CQ-ization: one alien per disjunct, the aliens forming an R-clique, each
/// alien watching its disjunct. The result is a single CQ over the extended
/// signature whose atoms are `RClique(x1..xj)` followed, per disjunct, by
/// the disjunct's atoms and its visibility constraints.
pub fn cqize(q: &Ucq) -> Result<Cq, XformError> {
    if !q.sig().is_base() {
        return Err(XformError::NotBase);
    }
    if q.has_inequality() {
        return Err(XformError::InequalityAtom);
    }
    if !q.is_pleasant() {
        return Err(XformError::NotPleasant);
    }
    let arity = q.disjuncts().len();
    let aliens: Vec<String> = (1..=arity).map(alien_name).collect();
    for d in q.disjuncts() {
        for v in d.var_set() {
            if is_alien_name(&v) {
                return Err(XformError::AlienCollision(v));
            }
        }
    }
    let ext = q.sig().extend()?;
    let mut atoms = rclique_atoms(&aliens);
    for (alien, disjunct) in aliens.iter().zip(q.disjuncts()) {
        atoms.extend(disjunct.atoms().iter().cloned());
        for y in disjunct.vars_in_order() {
            atoms.push(Atom::rel(REL_V, alloc::vec![Term::var(alien), Term::Var(y)]));
        }
    }
    Ok(Cq::new(ext, atoms)?)
}

/// Marsification: embeds a base structure as the view from Mars inside a
/// very good universe. Venus and Mars become fresh vertices; Venus satisfies
/// every Venus atom and sees only itself; Mars is a planet seeing exactly
/// the original structure.
pub fn marsify(d: &Structure) -> Result<Structure, XformError> {
    if !d.sig().is_base() {
        return Err(XformError::NotBase);
    }
    let ext = d.sig().extend()?;
    let venus_v = fresh_name(VENUS, |n| d.vertices().contains(n));
    let mars_v = fresh_name(MARS, |n| d.vertices().contains(n) || n == venus_v);

    let mut vertices: BTreeSet<String> = d.vertices().clone();
    vertices.insert(venus_v.clone());
    vertices.insert(mars_v.clone());

    let mut consts = d.consts().clone();
    consts.insert(VENUS.to_string(), venus_v.clone());
    consts.insert(MARS.to_string(), mars_v.clone());

    let mut facts: Vec<Fact> = d.facts().iter().cloned().collect();
    facts.push(Fact::new(REL_V, &[&venus_v, &venus_v]));
    facts.push(Fact::new(REL_R, &[&venus_v, &venus_v]));
    facts.push(Fact::new(REL_R, &[&venus_v, &mars_v]));
    facts.push(Fact::new(REL_R, &[&mars_v, &venus_v]));
    for (rel, args) in venus_atom_tuples(d.sig()) {
        let ground: Vec<String> = args
            .iter()
            .map(|name| {
                if name == VENUS {
                    venus_v.clone()
                } else {
                    d.interpretation(name)
                        .expect("base constants are interpreted")
                        .to_string()
                }
            })
            .collect();
        facts.push(Fact { rel, args: ground });
    }
    for a in d.vertices() {
        facts.push(Fact::new(REL_V, &[&mars_v, a]));
    }
    Ok(Structure::new(ext, vertices, facts, consts)?)
}

/// `η₀`: `m` visibility conjuncts `V(venus, _)` on fresh variables. On a
/// foggy structure it evaluates to 1; on a good non-foggy one to at least
/// `2^m`.
pub fn eta0(m: usize, sig: &Signature) -> Result<Cq, XformError> {
    if m == 0 {
        return Err(XformError::ZeroConjuncts);
    }
    if !sig.is_base() {
        return Err(XformError::NotBase);
    }
    let ext = sig.extend()?;
    let atoms = (1..=m)
        .map(|i| Atom::rel(REL_V, alloc::vec![venus(), Term::var(&format!("_e{i}"))]))
        .collect();
    Ok(Cq::new(ext, atoms)?)
}

/// `η₁`: `V(venus, _) ∧ R(v, v)`. Evaluates to 1 exactly on very good
/// structures (among good ones), and to at least 2 otherwise.
pub fn eta1(sig: &Signature) -> Result<Cq, XformError> {
    if !sig.is_base() {
        return Err(XformError::NotBase);
    }
    let ext = sig.extend()?;
    let atoms = alloc::vec![
        Atom::rel(REL_V, alloc::vec![venus(), Term::var("_e1")]),
        Atom::rel(REL_R, alloc::vec![Term::var("_r1"), Term::var("_r1")]),
    ];
    Ok(Cq::new(ext, atoms)?)
}

/// `Φ[h]`: replaces each variable in the domain of `h` by a literal vertex.
pub fn substitute(cq: &Cq, h: &BTreeMap<String, String>) -> Result<Cq, QueryError> {
    cq.substitute(h)
}

/// An assignment of the aliens `x1..xj` to planets forming an R-clique.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Trip {
    images: Vec<String>,
}

impl Trip {
    pub fn new(images: Vec<String>) -> Trip {
        Trip { images }
    }

    pub fn arity(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[String] {
        &self.images
    }

    /// The substitution `x1 -> images[0], ...` as a variable-to-vertex map.
    pub fn substitution(&self) -> BTreeMap<String, String> {
        self.images
            .iter()
            .enumerate()
            .map(|(i, p)| (alien_name(i + 1), p.clone()))
            .collect()
    }

    /// Classification relative to the Venus vertex.
    pub fn classify(&self, venus_vertex: &str) -> TripClass {
        let away: Vec<(usize, &String)> = self
            .images
            .iter()
            .enumerate()
            .filter(|(_, p)| p.as_str() != venus_vertex)
            .collect();
        match away.len() {
            0 => TripClass::AllVenus,
            1 => TripClass::OneAway {
                alien: away[0].0 + 1,
                planet: away[0].1.clone(),
            },
            _ => TripClass::TwoPlusAway {
                destinations: away.into_iter().map(|(_, p)| p.clone()).collect(),
            },
        }
    }
}

/// Where a trip sends the aliens: everyone stays home, exactly one leaves,
/// or at least two leave (then tagged with the set of destination planets).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum TripClass {
    AllVenus,
    OneAway { alien: usize, planet: String },
    TwoPlusAway { destinations: BTreeSet<String> },
}

/// All `j`-trips of a good structure, each with its classification, in
/// lexicographic order of the planet tuple.
pub fn enumerate_trips(j: usize, d: &Structure) -> Result<Vec<(Trip, TripClass)>, XformError> {
    enumerate_trips_capped(j, d, DEFAULT_TRIP_CAP)
}

/// Backtracking enumeration: aliens are placed one by one and a placement
/// is abandoned as soon as an R-pair is missing. On a good structure every
/// consistent prefix extends by Venus, so the work is proportional to the
/// number of trips, not to `|planets|^j`. Errors when more than `cap` trips
/// would be returned.
pub fn enumerate_trips_capped(
    j: usize,
    d: &Structure,
    cap: usize,
) -> Result<Vec<(Trip, TripClass)>, XformError> {
    let flags = d.classify()?;
    if !flags.good {
        return Err(XformError::NotGood);
    }
    let venus_vertex = d.interpretation(VENUS).expect("extension interprets venus");
    let ps: Vec<&str> = {
        let set = planets(d)?;
        d.vertices()
            .iter()
            .filter(|v| set.contains(*v))
            .map(String::as_str)
            .collect()
    };
    let r_pair = |a: &str, b: &str| {
        d.has_fact(REL_R, &[a.to_string(), b.to_string()])
            && d.has_fact(REL_R, &[b.to_string(), a.to_string()])
    };
    let mut out: Vec<(Trip, TripClass)> = Vec::new();
    let mut prefix: Vec<&str> = Vec::with_capacity(j);
    fn descend<'a>(
        j: usize,
        ps: &[&'a str],
        r_pair: &impl Fn(&str, &str) -> bool,
        prefix: &mut Vec<&'a str>,
        venus_vertex: &str,
        cap: usize,
        out: &mut Vec<(Trip, TripClass)>,
    ) -> Result<(), XformError> {
        if prefix.len() == j {
            if out.len() >= cap {
                return Err(XformError::TripSpaceExceeded { space: out.len() + 1, cap });
            }
            let trip = Trip::new(prefix.iter().map(|s| s.to_string()).collect());
            let class = trip.classify(venus_vertex);
            out.push((trip, class));
            return Ok(());
        }
        for &p in ps {
            if prefix.iter().all(|&q| r_pair(q, p)) {
                prefix.push(p);
                descend(j, ps, r_pair, prefix, venus_vertex, cap, out)?;
                prefix.pop();
            }
        }
        Ok(())
    }
    descend(j, &ps, &r_pair, &mut prefix, venus_vertex, cap, &mut out)?;
    Ok(out)
}


/// One row of a trip-wise count: the trip, its class, and the number of
/// homomorphisms of the CQ-ization agreeing with it on the aliens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripRow {
    pub trip: Trip,
    pub class: TripClass,
    pub count: Count,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripCount {
    pub total: Count,
    pub rows: Vec<TripRow>,
}

/// Counts `cqize(q) ⟶ d` by grouping homomorphisms by trip: the summand for
/// trip `h` is the product over disjuncts of the disjunct's count on the
/// substructure seen from its alien's planet. Per-(disjunct, planet) factors
/// are computed once.
pub fn count_by_trips(q: &Ucq, d: &Structure) -> Result<TripCount, XformError> {
    if !q.is_pleasant() {
        return Err(XformError::NotPleasant);
    }
    let arity = q.disjuncts().len();
    let trips = enumerate_trips(arity, d)?;
    let mut factor: BTreeMap<(usize, &str), Count> = BTreeMap::new();
    let mut seen_cache: BTreeMap<&str, Structure> = BTreeMap::new();
    for p in planets(d)? {
        let p_ref = d
            .vertices()
            .get(&p)
            .expect("planet is a vertex")
            .as_str();
        seen_cache.insert(p_ref, seen(p_ref, d)?);
    }
    for (j, disjunct) in q.disjuncts().iter().enumerate() {
        for (p, view) in &seen_cache {
            factor.insert((j, p), count_homs(disjunct, view)?);
        }
    }
    let mut rows = Vec::with_capacity(trips.len());
    let mut total = Count::zero();
    for (trip, class) in trips {
        let mut product = Count::one();
        for (j, p) in trip.images().iter().enumerate() {
            product *= factor
                .get(&(j, p.as_str()))
                .expect("factors cover all planets")
                .clone();
        }
        total += product.clone();
        rows.push(TripRow { trip, class, count: product });
    }
    Ok(TripCount { total, rows })
}
