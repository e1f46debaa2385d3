//! Structure enumeration and seeded random generation of structures,
//! queries, polynomials and valuations.
//!
//! Enumeration walks vertex counts, constant placements and fact subsets
//! deterministically, optionally keeping one representative per isomorphism
//! class (canonical forms by color refinement plus minimization). Sampling
//! is fully determined by the 64-bit seed; flagged structures (good, foggy,
//! very good) are built directly rather than by rejection.

use std::collections::{BTreeMap, BTreeSet};

use bagcq_core::poly::{Monomial, Polynomial, Valuation};
use bagcq_core::query::{Atom, Cq, Term, Ucq};
use bagcq_core::sig::{Signature, MARS, REL_R, REL_V, VENUS};
use bagcq_core::structure::{Fact, Structure, StructureFlags};
use bagcq_core::transform::is_alien_name;
use bagcq_core::Count;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("fact space needs {bits} bits, cap is {cap}")]
    FactSpaceExceeded { bits: usize, cap: usize },
    #[error("required flags need an extension signature")]
    FlagsNeedExtension,
    #[error("a non-trivial structure needs at least 2 vertices")]
    NonTrivialNeedsTwo,
}

/// Which flags generated structures must satisfy (`true` = required).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FlagReq {
    pub good: bool,
    pub foggy: bool,
    pub very_good: bool,
    pub non_trivial: bool,
}

impl FlagReq {
    pub fn satisfied_by(&self, flags: &StructureFlags) -> bool {
        (!self.good || flags.good)
            && (!self.foggy || flags.foggy)
            && (!self.very_good || flags.very_good)
            && (!self.non_trivial || flags.non_trivial)
    }

    fn any_goodness(&self) -> bool {
        self.good || self.foggy || self.very_good
    }
}

/// Generator configuration; a fixed seed reproduces the sample stream
/// byte for byte.
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub sig: Signature,
    pub max_vertices: usize,
    pub required: FlagReq,
    pub seed: u64,
    pub samples: usize,
    /// Keep one representative per isomorphism class while enumerating
    /// (automatically off beyond 5 vertices).
    pub canonical: bool,
    /// Cap on the number of fact slots per (vertex count, placement) slice.
    pub max_fact_bits: usize,
}

impl GenConfig {
    pub fn new(sig: Signature) -> GenConfig {
        GenConfig {
            sig,
            max_vertices: 3,
            required: FlagReq::default(),
            seed: 0,
            samples: 100,
            canonical: false,
            max_fact_bits: 20,
        }
    }

    pub fn max_vertices(mut self, n: usize) -> Self {
        self.max_vertices = n.max(1);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn required(mut self, required: FlagReq) -> Self {
        self.required = required;
        self
    }

    pub fn canonical(mut self, on: bool) -> Self {
        self.canonical = on;
        self
    }

    pub fn describe(&self) -> String {
        let rels: Vec<String> = self.sig.relations().map(|(n, a)| format!("{n}/{a}")).collect();
        format!(
            "sig=[{}] consts=[{}] max_vertices={} seed={} samples={} canonical={} flags={:?}",
            rels.join(","),
            self.sig.constants().collect::<Vec<_>>().join(","),
            self.max_vertices,
            self.seed,
            self.samples,
            self.canonical,
            self.required,
        )
    }
}

fn vertex_name(i: usize) -> String {
    format!("v{}", i + 1)
}

/// All (relation, tuple) slots over `n` vertices, in deterministic order.
fn fact_slots(sig: &Signature, n: usize) -> Vec<(String, Vec<usize>)> {
    let mut slots = Vec::new();
    for (rel, arity) in sig.relations() {
        let mut idx = vec![0usize; arity];
        if n == 0 {
            continue;
        }
        'tuples: loop {
            slots.push((rel.to_string(), idx.clone()));
            let mut pos = arity;
            loop {
                if pos == 0 {
                    break 'tuples;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < n {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }
    slots
}

fn build(
    sig: &Signature,
    n: usize,
    slots: &[(String, Vec<usize>)],
    include: impl Fn(usize) -> bool,
    placement: &BTreeMap<String, usize>,
) -> Structure {
    let vertices: Vec<String> = (0..n).map(vertex_name).collect();
    let facts: Vec<Fact> = slots
        .iter()
        .enumerate()
        .filter(|(i, _)| include(*i))
        .map(|(_, (rel, tuple))| Fact {
            rel: rel.clone(),
            args: tuple.iter().map(|&v| vertex_name(v)).collect(),
        })
        .collect();
    let consts: BTreeMap<String, String> = placement
        .iter()
        .map(|(c, &v)| (c.clone(), vertex_name(v)))
        .collect();
    Structure::new(sig.clone(), vertices, facts, consts).expect("enumerated structure is valid")
}

/// Exhaustively enumerates structures over the configured signature with at
/// most `max_vertices` vertices, filtered by the required flags, optionally
/// one per isomorphism class.
pub fn enumerate_structures(cfg: &GenConfig) -> Result<StructureEnumerator, GenError> {
    if cfg.required.any_goodness() && !cfg.sig.is_extension() {
        return Err(GenError::FlagsNeedExtension);
    }
    if cfg.required.non_trivial
        && !(cfg.sig.has_constant(MARS) && cfg.sig.has_constant(VENUS))
    {
        return Err(GenError::FlagsNeedExtension);
    }
    let bits = fact_slots(&cfg.sig, cfg.max_vertices).len();
    if bits > cfg.max_fact_bits || bits >= 64 {
        return Err(GenError::FactSpaceExceeded { bits, cap: cfg.max_fact_bits });
    }
    let n_min = if cfg.sig.constants().next().is_some() { 1 } else { 0 };
    Ok(StructureEnumerator {
        cfg: cfg.clone(),
        n: n_min,
        slots: fact_slots(&cfg.sig, n_min),
        placement: first_placement(&cfg.sig),
        placement_done: false,
        mask: 0,
        mask_done: false,
        seen_keys: BTreeSet::new(),
    })
}

fn first_placement(sig: &Signature) -> BTreeMap<String, usize> {
    sig.constants().map(|c| (c.to_string(), 0usize)).collect()
}

pub struct StructureEnumerator {
    cfg: GenConfig,
    n: usize,
    slots: Vec<(String, Vec<usize>)>,
    placement: BTreeMap<String, usize>,
    placement_done: bool,
    mask: u64,
    mask_done: bool,
    seen_keys: BTreeSet<Vec<u8>>,
}

impl StructureEnumerator {
    /// Odometer step over the current (n, placement, mask) state.
    fn advance(&mut self) {
        if !self.mask_done {
            self.mask += 1;
            if self.mask < (1u64 << self.slots.len()) {
                return;
            }
            self.mask = 0;
            self.mask_done = true;
        }
        // next constant placement
        if !self.placement_done {
            self.mask_done = false;
            let keys: Vec<String> = self.placement.keys().cloned().collect();
            for key in &keys {
                let v = self.placement.get_mut(key).expect("key exists");
                *v += 1;
                if *v < self.n.max(1) {
                    return;
                }
                *v = 0;
            }
            self.placement_done = true;
        }
        // next vertex count
        self.n += 1;
        self.slots = fact_slots(&self.cfg.sig, self.n);
        self.placement = first_placement(&self.cfg.sig);
        self.placement_done = false;
        self.mask = 0;
        self.mask_done = self.slots.len() >= 64; // unreachable under the cap
    }

    fn exhausted(&self) -> bool {
        self.n > self.cfg.max_vertices
    }
}

impl Iterator for StructureEnumerator {
    type Item = Structure;

    fn next(&mut self) -> Option<Structure> {
        loop {
            if self.exhausted() {
                return None;
            }
            let mask = self.mask;
            let candidate = build(
                &self.cfg.sig,
                self.n,
                &self.slots,
                |i| mask & (1u64 << i) != 0,
                &self.placement,
            );
            self.advance();
            if self.cfg.required.any_goodness() || self.cfg.required.non_trivial {
                match candidate.classify() {
                    Ok(flags) if self.cfg.required.satisfied_by(&flags) => {}
                    _ => continue,
                }
            }
            if self.cfg.canonical && candidate.vertices().len() <= 5 {
                let key = canonical_key(&candidate);
                if !self.seen_keys.insert(key) {
                    continue;
                }
            }
            return Some(candidate);
        }
    }
}

/// A byte string equal for exactly the isomorphic structures (over the same
/// signature): the minimum serialization over vertex bijections respecting
/// the color-refinement partition.
pub fn canonical_key(d: &Structure) -> Vec<u8> {
    let vertices: Vec<&String> = d.vertices().iter().collect();
    let n = vertices.len();
    let index: BTreeMap<&str, usize> = vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let rels: Vec<&str> = d.sig().relations().map(|(r, _)| r).collect();
    let rel_index: BTreeMap<&str, usize> = rels.iter().enumerate().map(|(i, r)| (*r, i)).collect();
    let facts: Vec<(usize, Vec<usize>)> = d
        .facts()
        .iter()
        .map(|f| {
            (
                rel_index[f.rel.as_str()],
                f.args.iter().map(|a| index[a.as_str()]).collect(),
            )
        })
        .collect();
    let consts: Vec<(usize, usize)> = d
        .consts()
        .iter()
        .enumerate()
        .map(|(ci, (_, v))| (ci, index[v.as_str()]))
        .collect();

    let colors = refine_colors(n, &facts, &consts);

    // vertices of the same refined color share a block of target positions;
    // the canonical form is the minimum rendering over all ways of laying
    // the members of each class out within its block
    let mut classes: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (v, &c) in colors.iter().enumerate() {
        classes.entry(c).or_default().push(v);
    }
    let class_list: Vec<Vec<usize>> = classes.into_values().collect();
    let mut perm: Vec<usize> = vec![0; n];
    let mut best: Option<Vec<u8>> = None;
    assign_classes(&class_list, 0, 0, &mut perm, &mut |p| {
        let mut rendered_facts: Vec<(usize, Vec<usize>)> = facts
            .iter()
            .map(|(r, tuple)| (*r, tuple.iter().map(|&v| p[v]).collect()))
            .collect();
        rendered_facts.sort();
        let mut rendered_consts: Vec<(usize, usize)> =
            consts.iter().map(|&(c, v)| (c, p[v])).collect();
        rendered_consts.sort();
        let mut bytes = Vec::new();
        bytes.push(n as u8);
        for (r, tuple) in &rendered_facts {
            bytes.push(255);
            bytes.push(*r as u8);
            bytes.extend(tuple.iter().map(|&v| v as u8));
        }
        for (c, v) in &rendered_consts {
            bytes.push(254);
            bytes.push(*c as u8);
            bytes.push(*v as u8);
        }
        if best.as_ref().is_none_or(|b| bytes < *b) {
            best = Some(bytes);
        }
    });
    best.unwrap_or_default()
}

/// Recursively assigns each color class's members to its position block in
/// every order, visiting each complete position map.
fn assign_classes(
    classes: &[Vec<usize>],
    class_idx: usize,
    next_position: usize,
    perm: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if class_idx == classes.len() {
        visit(perm);
        return;
    }
    let members = &classes[class_idx];
    let mut order: Vec<usize> = (0..members.len()).collect();
    permute_all(&mut order, 0, &mut |layout| {
        for (offset, &slot) in layout.iter().enumerate() {
            perm[members[slot]] = next_position + offset;
        }
        assign_classes(classes, class_idx + 1, next_position + members.len(), perm, visit);
    });
}

fn permute_all(order: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == order.len() {
        visit(order);
        return;
    }
    for i in k..order.len() {
        order.swap(k, i);
        permute_all(order, k + 1, visit);
        order.swap(k, i);
    }
}

/// Iterated color refinement; isomorphisms preserve the resulting classes.
fn refine_colors(n: usize, facts: &[(usize, Vec<usize>)], consts: &[(usize, usize)]) -> Vec<u64> {
    let mut colors: Vec<u64> = vec![0; n];
    for &(c, v) in consts {
        colors[v] = colors[v].wrapping_mul(31).wrapping_add(c as u64 + 1);
    }
    for _ in 0..n {
        let mut sigs: Vec<Vec<u64>> = vec![Vec::new(); n];
        for (r, tuple) in facts {
            for (pos, &v) in tuple.iter().enumerate() {
                let mut h = (*r as u64 + 1) << 32 | (pos as u64 + 1) << 16;
                for &w in tuple {
                    h = h.wrapping_mul(1_000_003).wrapping_add(colors[w]);
                }
                sigs[v].push(h);
            }
        }
        let mut keys: Vec<(u64, Vec<u64>)> = Vec::with_capacity(n);
        for v in 0..n {
            sigs[v].sort_unstable();
            keys.push((colors[v], sigs[v].clone()));
        }
        let mut sorted: Vec<&(u64, Vec<u64>)> = keys.iter().collect();
        sorted.sort();
        sorted.dedup();
        let new_colors: Vec<u64> = keys
            .iter()
            .map(|k| sorted.binary_search(&k).expect("key present") as u64)
            .collect();
        if new_colors == colors {
            break;
        }
        colors = new_colors;
    }
    colors
}

/// Seeded pseudo-random structures satisfying the required flags by
/// construction.
pub fn sample_structures(cfg: &GenConfig) -> Result<impl Iterator<Item = Structure>, GenError> {
    if cfg.required.any_goodness() && !cfg.sig.is_extension() {
        return Err(GenError::FlagsNeedExtension);
    }
    if cfg.required.non_trivial {
        if !(cfg.sig.has_constant(MARS) && cfg.sig.has_constant(VENUS)) {
            return Err(GenError::FlagsNeedExtension);
        }
        if cfg.max_vertices < 2 {
            return Err(GenError::NonTrivialNeedsTwo);
        }
    }
    let cfg = cfg.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut emitted = 0usize;
    Ok(std::iter::from_fn(move || {
        if emitted >= cfg.samples {
            return None;
        }
        emitted += 1;
        let d = if cfg.required.any_goodness() {
            random_flagged_structure(&mut rng, &cfg.sig, cfg.max_vertices, cfg.required)
        } else {
            random_structure(&mut rng, &cfg.sig, cfg.max_vertices, cfg.required.non_trivial)
        };
        debug_assert!(
            !cfg.sig.is_extension()
                || cfg
                    .required
                    .satisfied_by(&d.classify().expect("extension signature")),
            "generated structure must satisfy the required flags"
        );
        Some(d)
    }))
}

/// A plain random structure: every tuple is a fact with probability 1/2.
pub fn random_structure(
    rng: &mut ChaCha8Rng,
    sig: &Signature,
    max_vertices: usize,
    force_non_trivial: bool,
) -> Structure {
    let has_consts = sig.constants().next().is_some();
    let n_min = if force_non_trivial {
        2
    } else if has_consts {
        1
    } else {
        0
    };
    let n = rng.random_range(n_min..=max_vertices.max(n_min));
    let slots = fact_slots(sig, n);
    let chosen: BTreeSet<usize> = (0..slots.len()).filter(|_| rng.random_bool(0.5)).collect();
    let mut placement = BTreeMap::new();
    for c in sig.constants() {
        placement.insert(c.to_string(), rng.random_range(0..n.max(1)));
    }
    if force_non_trivial {
        let m = rng.random_range(0..n);
        let v = (m + 1 + rng.random_range(0..n - 1)) % n;
        placement.insert(MARS.to_string(), m);
        placement.insert(VENUS.to_string(), v);
    }
    build(sig, n, &slots, |i| chosen.contains(&i), &placement)
}

/// Builds a structure that is good by construction and respects the
/// foggy / very-good prohibitions while adding random extra facts.
pub fn random_flagged_structure(
    rng: &mut ChaCha8Rng,
    sig: &Signature,
    max_vertices: usize,
    req: FlagReq,
) -> Structure {
    let n = rng.random_range(if req.non_trivial { 2 } else { 1 }..=max_vertices.max(2));
    let venus = 0usize;
    let mars = if req.non_trivial {
        1 + rng.random_range(0..n - 1)
    } else {
        rng.random_range(0..n)
    };
    let mut placement: BTreeMap<String, usize> = BTreeMap::new();
    placement.insert(VENUS.to_string(), venus);
    placement.insert(MARS.to_string(), mars);
    for c in sig.base_part().constants() {
        placement.insert(c.to_string(), rng.random_range(0..n));
    }

    let slots = fact_slots(sig, n);
    let mut chosen: BTreeSet<usize> = BTreeSet::new();
    let forbidden = |rel: &str, tuple: &[usize]| -> bool {
        if (req.foggy || req.very_good) && rel == REL_V && tuple[0] == venus && tuple[1] != venus {
            return true;
        }
        if req.very_good && rel == REL_R && tuple[0] == tuple[1] && tuple[0] != venus {
            return true;
        }
        false
    };
    // the good skeleton
    let mut mandatory: Vec<(String, Vec<usize>)> = vec![
        (REL_V.to_string(), vec![venus, venus]),
        (REL_R.to_string(), vec![venus, venus]),
    ];
    for (rel, args) in bagcq_core::sig::venus_atom_tuples(sig) {
        let tuple: Vec<usize> = args
            .iter()
            .map(|name| {
                if name == VENUS {
                    venus
                } else {
                    placement[name]
                }
            })
            .collect();
        mandatory.push((rel, tuple));
    }
    for m in &mandatory {
        let pos = slots.iter().position(|s| s == m).expect("mandatory fact is a slot");
        chosen.insert(pos);
    }
    // planet candidates: connect some vertices to Venus both ways
    for p in 0..n {
        if p != venus && rng.random_bool(0.5) {
            for t in [vec![venus, p], vec![p, venus]] {
                let pos = slots
                    .iter()
                    .position(|s| s.0 == REL_R && s.1 == t)
                    .expect("R tuple is a slot");
                chosen.insert(pos);
            }
        }
    }
    // random extras, skipping the forbidden patterns
    for (i, (rel, tuple)) in slots.iter().enumerate() {
        if chosen.contains(&i) || forbidden(rel, tuple) {
            continue;
        }
        if rng.random_bool(0.3) {
            chosen.insert(i);
        }
    }
    build(sig, n, &slots, |i| chosen.contains(&i), &placement)
}

/// Options for random query generation.
#[derive(Debug, Clone, Copy)]
pub struct QueryGenOpts {
    pub max_disjuncts: usize,
    pub max_atoms: usize,
    pub max_vars: usize,
    pub pleasant: bool,
    pub allow_constants: bool,
    /// Probability of appending one inequality atom between two variables
    /// of the query.
    pub inequality_prob: f64,
}

impl Default for QueryGenOpts {
    fn default() -> Self {
        QueryGenOpts {
            max_disjuncts: 3,
            max_atoms: 3,
            max_vars: 4,
            pleasant: true,
            allow_constants: true,
            inequality_prob: 0.0,
        }
    }
}

/// A random CQ over `sig`. Pleasantness is enforced when requested;
/// variables come from a small pool so joins actually happen.
pub fn random_cq(rng: &mut ChaCha8Rng, sig: &Signature, opts: &QueryGenOpts) -> Cq {
    let rels: Vec<(String, usize)> = sig.relations().map(|(n, a)| (n.to_string(), a)).collect();
    let consts: Vec<String> = sig.constants().map(|c| c.to_string()).collect();
    let pool: Vec<String> = (0..opts.max_vars.max(1))
        .map(|i| {
            let name = format!("{}", (b'q' + (i % 8) as u8) as char);
            if i >= 8 {
                format!("{name}{}", i / 8)
            } else {
                name
            }
        })
        .filter(|v| !is_alien_name(v))
        .collect();
    let natoms = if rels.is_empty() {
        0
    } else {
        rng.random_range(if opts.pleasant { 0 } else { 1 }..=opts.max_atoms.max(1))
    };
    let mut atoms = Vec::with_capacity(natoms);
    for _ in 0..natoms {
        let (rel, arity) = rels[rng.random_range(0..rels.len())].clone();
        let mut args: Vec<Term> = (0..arity)
            .map(|_| {
                if opts.allow_constants && !consts.is_empty() && rng.random_bool(0.2) {
                    Term::Const(consts[rng.random_range(0..consts.len())].clone())
                } else {
                    Term::Var(pool[rng.random_range(0..pool.len())].clone())
                }
            })
            .collect();
        if opts.pleasant && !args.iter().any(Term::is_var) {
            let k = rng.random_range(0..args.len());
            args[k] = Term::Var(pool[rng.random_range(0..pool.len())].clone());
        }
        atoms.push(Atom::Rel { rel, args });
    }
    if opts.inequality_prob > 0.0 && rng.random_bool(opts.inequality_prob) {
        let vars: Vec<String> = atoms
            .iter()
            .flat_map(|a| a.terms().filter_map(|t| t.as_var().map(str::to_string)))
            .collect();
        if vars.len() >= 2 {
            let a = vars[rng.random_range(0..vars.len())].clone();
            let b = vars[rng.random_range(0..vars.len())].clone();
            atoms.push(Atom::Neq(Term::Var(a), Term::Var(b)));
        }
    }
    Cq::new(sig.clone(), atoms).expect("generated atoms respect the signature")
}

/// A random UCQ with 1..=max_disjuncts disjuncts.
pub fn random_ucq(rng: &mut ChaCha8Rng, sig: &Signature, opts: &QueryGenOpts) -> Ucq {
    let k = rng.random_range(1..=opts.max_disjuncts.max(1));
    let disjuncts = (0..k).map(|_| random_cq(rng, sig, opts)).collect();
    Ucq::new(disjuncts).expect("disjuncts share the signature")
}

/// A random base signature: 1-3 relations of arity 1-2, sometimes one
/// constant.
pub fn random_base_sig(rng: &mut ChaCha8Rng, allow_constants: bool) -> Signature {
    let nrels = rng.random_range(1..=3);
    let rels: Vec<(String, usize)> = (0..nrels)
        .map(|i| (format!("A{}", i + 1), rng.random_range(1..=2)))
        .collect();
    let consts: Vec<String> = if allow_constants && rng.random_bool(0.3) {
        vec!["c".to_string()]
    } else {
        Vec::new()
    };
    Signature::new(rels, consts).expect("generated signature is valid")
}

pub fn random_monomial(rng: &mut ChaCha8Rng, nvars: u32, max_degree: usize) -> Monomial {
    let d = rng.random_range(0..=max_degree);
    let indices = (0..d).map(|_| rng.random_range(1..=nvars.max(1))).collect();
    Monomial::new(indices).expect("indices are positive")
}

pub fn random_polynomial(
    rng: &mut ChaCha8Rng,
    nvars: u32,
    max_monomials: usize,
    max_degree: usize,
) -> Polynomial {
    let k = rng.random_range(1..=max_monomials.max(1));
    let monomials = (0..k).map(|_| random_monomial(rng, nvars, max_degree)).collect();
    Polynomial::new(nvars, monomials).expect("indices within bounds")
}

pub fn random_valuation(rng: &mut ChaCha8Rng, nvars: u32, max_entry: u32) -> Valuation {
    Valuation::new(
        (0..nvars)
            .map(|_| Count::from(rng.random_range(0..=max_entry)))
            .collect(),
    )
}
