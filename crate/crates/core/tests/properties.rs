//! Property tests: the engine against the exhaustive oracle, component
//! factorization, restriction identity, and marsification always producing
//! very good non-trivial structures.

use std::collections::BTreeMap;

use bagcq_core::eval::{component_split, count_homs, count_homs_naive, Count};
use bagcq_core::query::{Atom, Cq, Term};
use bagcq_core::sig::Signature;
use bagcq_core::structure::{Fact, Structure};
use bagcq_core::transform::marsify;
use num_traits::One;
use proptest::prelude::*;

fn sig() -> Signature {
    Signature::of(&[("E", 2), ("P", 1)], &["c"]).unwrap()
}

const VAR_POOL: [&str; 4] = ["q", "r", "s", "t"];

#[derive(Debug, Clone)]
enum TermSpec {
    Var(u8),
    Const,
}

#[derive(Debug, Clone)]
enum AtomSpec {
    Edge(TermSpec, TermSpec),
    Point(TermSpec),
    Neq(u8, u8),
}

fn term_spec() -> impl Strategy<Value = TermSpec> {
    prop_oneof![
        4 => (0u8..4).prop_map(TermSpec::Var),
        1 => Just(TermSpec::Const),
    ]
}

fn atom_spec() -> impl Strategy<Value = AtomSpec> {
    prop_oneof![
        3 => (term_spec(), term_spec()).prop_map(|(a, b)| AtomSpec::Edge(a, b)),
        2 => term_spec().prop_map(AtomSpec::Point),
        1 => (0u8..4, 0u8..4).prop_map(|(a, b)| AtomSpec::Neq(a, b)),
    ]
}

fn realize_term(spec: &TermSpec) -> Term {
    match spec {
        TermSpec::Var(i) => Term::var(VAR_POOL[*i as usize % VAR_POOL.len()]),
        TermSpec::Const => Term::constant("c"),
    }
}

/// Builds a valid CQ from atom specs; inequality specs are only kept when
/// both variables already occur relationally.
fn realize_cq(specs: &[AtomSpec]) -> Cq {
    let mut atoms = Vec::new();
    let mut rel_vars: Vec<String> = Vec::new();
    for spec in specs {
        match spec {
            AtomSpec::Edge(a, b) => {
                let (ta, tb) = (realize_term(a), realize_term(b));
                for t in [&ta, &tb] {
                    if let Term::Var(v) = t {
                        rel_vars.push(v.clone());
                    }
                }
                atoms.push(Atom::rel("E", vec![ta, tb]));
            }
            AtomSpec::Point(a) => {
                let t = realize_term(a);
                if let Term::Var(v) = &t {
                    rel_vars.push(v.clone());
                }
                atoms.push(Atom::rel("P", vec![t]));
            }
            AtomSpec::Neq(a, b) => {
                let va = VAR_POOL[*a as usize % VAR_POOL.len()];
                let vb = VAR_POOL[*b as usize % VAR_POOL.len()];
                if rel_vars.iter().any(|v| v == va) && rel_vars.iter().any(|v| v == vb) {
                    atoms.push(Atom::Neq(Term::var(va), Term::var(vb)));
                }
            }
        }
    }
    Cq::new(sig(), atoms).expect("realized atoms are valid")
}

#[derive(Debug, Clone)]
struct StructSpec {
    vertices: u8,
    edges: Vec<(u8, u8)>,
    points: Vec<u8>,
    const_at: u8,
}

fn struct_spec() -> impl Strategy<Value = StructSpec> {
    (1u8..=4)
        .prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec((0..n, 0..n), 0..6),
                proptest::collection::vec(0..n, 0..4),
                0..n,
            )
        })
        .prop_map(|(vertices, edges, points, const_at)| StructSpec {
            vertices,
            edges,
            points,
            const_at,
        })
}

fn realize_structure(spec: &StructSpec) -> Structure {
    let name = |i: u8| format!("v{i}");
    let vertices: Vec<String> = (0..spec.vertices).map(name).collect();
    let mut facts = Vec::new();
    for (a, b) in &spec.edges {
        facts.push(Fact::new("E", &[&name(*a), &name(*b)]));
    }
    for p in &spec.points {
        facts.push(Fact::new("P", &[&name(*p)]));
    }
    let mut consts = BTreeMap::new();
    consts.insert("c".to_string(), name(spec.const_at));
    Structure::new(sig(), vertices, facts, consts).expect("realized structure is valid")
}

proptest! {
    #[test]
    fn engine_matches_oracle(
        atoms in proptest::collection::vec(atom_spec(), 0..=4),
        d in struct_spec(),
    ) {
        let q = realize_cq(&atoms);
        let d = realize_structure(&d);
        let fast = count_homs(&q, &d).unwrap();
        let slow = count_homs_naive(&q, &d).unwrap();
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn factorization_over_components(
        atoms in proptest::collection::vec(atom_spec(), 0..=4),
        d in struct_spec(),
    ) {
        let q = realize_cq(&atoms);
        prop_assume!(!q.has_inequality());
        let d = realize_structure(&d);
        let whole = count_homs(&q, &d).unwrap();
        let mut product = Count::one();
        for part in component_split(&q).unwrap() {
            product *= count_homs(&part, &d).unwrap();
        }
        prop_assert_eq!(whole, product);
    }

    #[test]
    fn evaluation_is_deterministic(
        atoms in proptest::collection::vec(atom_spec(), 0..=4),
        d in struct_spec(),
    ) {
        let q = realize_cq(&atoms);
        let d = realize_structure(&d);
        prop_assert_eq!(count_homs(&q, &d).unwrap(), count_homs(&q, &d).unwrap());
    }

    #[test]
    fn restriction_to_everything_is_identity(d in struct_spec()) {
        let d = realize_structure(&d);
        prop_assert_eq!(d.restrict(d.vertices()).unwrap(), d);
    }

    #[test]
    fn marsification_is_always_very_good(d in struct_spec()) {
        // drop the constant: marsification needs a base structure, and the
        // base signature here keeps `c`, which is fine
        let d = realize_structure(&d);
        let m = marsify(&d).unwrap();
        let flags = m.classify().unwrap();
        prop_assert!(flags.good && flags.foggy && flags.very_good && flags.non_trivial);
        prop_assert_eq!(m.sig().base_part(), d.sig().clone());
    }
}
