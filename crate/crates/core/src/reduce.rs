//! Constructors for containment-instance pairs: the CQ-vs-UCQ equivalence
//! pair, the polynomial-comparison pairs (unscaled and scaled), the
//! inequality gadgets, and the believer transformation that makes arbitrary
//! queries pleasant.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::One;

use crate::eval::{Count, EvalError, Rational};
use crate::poly::{
    mono_to_cq, pad_polynomials, pick_cent, poly_to_ucq, unary_sig, PolyError, Polynomial,
};
use crate::query::{fresh_name, Atom, Cq, QueryError, Term, Ucq};
use crate::sig::{SigError, Signature, MARS, REL_R, VENUS};
use crate::structure::{Fact, Structure, StructureError};
use crate::transform::{cqize, eta0, eta1, good_query, relativize, XformError};

/// Suffix distinguishing believer relations from their base counterparts.
const PRIME_SUFFIX: &str = "_b";
/// The gadget relation of the inequality reduction.
const GADGET_REL: &str = "P";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReduceError {
    #[error("query is not pleasant; apply pleasantize first")]
    NotPleasant,
    #[error("the two queries are over different signatures")]
    SignatureMismatch,
    #[error("polynomial must be nonempty")]
    EmptyPolynomial,
    #[error("epsilon must satisfy 0 < eps <= 1")]
    EpsOutOfRange,
    #[error("relation `{0}` already occurs in the signature")]
    RelationTaken(String),
    #[error("relation `{0}` does not carry the believer suffix")]
    NotBelieverSignature(String),
    #[error("`{0}` is not a vertex of the structure")]
    VertexMissing(String),
    #[error(transparent)]
    Xform(#[from] XformError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Sig(#[from] SigError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Over which class of structures a produced instance claims containment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    AllStructures,
    /// Only structures interpreting Mars and Venus by distinct vertices.
    NonTrivialOnly,
}

/// Which constructor produced an instance, with its parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Theorem1,
    Theorem2,
    Theorem3 { c: Rational, cent: Rational, u: Count },
    Corollary5,
}

/// A scaled containment instance: does `scale · (qs ⟶ D) <= qb ⟶ D` hold
/// for every structure of the instance's mode?
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionInstance {
    pub qs: Ucq,
    pub qb: Ucq,
    pub scale: Rational,
    pub mode: Mode,
    pub provenance: Provenance,
}

/// The CQ-vs-UCQ pair: `γ_s = Good ∧ cqize(ψ_s)`, `γ_b = η₀ ∧ cqize(Ψ_b)`
/// with one η₀ conjunct per disjunct of `Ψ_b`. Containment of `ψ_s` in
/// `Ψ_b` is equivalent to containment of `γ_s` in `γ_b` over all
/// structures.
pub fn build_thm1(psi_s: &Cq, psi_b: &Ucq) -> Result<ReductionInstance, ReduceError> {
    if psi_s.sig() != psi_b.sig() {
        return Err(ReduceError::SignatureMismatch);
    }
    if !psi_b.is_pleasant() || !psi_s.is_pleasant() {
        return Err(ReduceError::NotPleasant);
    }
    let sig = psi_s.sig();
    let gamma_s = good_query(sig)?.conjoin(&cqize(&Ucq::from_cq(psi_s.clone()))?)?;
    let m = psi_b.disjuncts().len();
    let gamma_b = eta0(m, sig)?.conjoin(&cqize(psi_b)?)?;
    Ok(ReductionInstance {
        qs: Ucq::from_cq(gamma_s),
        qb: Ucq::from_cq(gamma_b),
        scale: Rational::one(),
        mode: Mode::AllStructures,
        provenance: Provenance::Theorem1,
    })
}

fn prime_name(name: &str) -> String {
    format!("{name}{PRIME_SUFFIX}")
}

/// Σ ↦ Σ′: every relation gains one leading believer position.
pub fn believer_signature(sig: &Signature) -> Signature {
    Signature::new(
        sig.relations().map(|(n, a)| (prime_name(n), a + 1)),
        sig.constants().map(|c| c.to_string()),
    )
    .expect("priming preserves well-formedness")
}

fn unprime_signature(sig: &Signature) -> Result<Signature, ReduceError> {
    let mut rels = Vec::new();
    for (n, a) in sig.relations() {
        let base = n
            .strip_suffix(PRIME_SUFFIX)
            .filter(|_| a >= 2)
            .ok_or_else(|| ReduceError::NotBelieverSignature(n.to_string()))?;
        rels.push((base.to_string(), a - 1));
    }
    Ok(Signature::new(rels, sig.constants().map(|c| c.to_string()))?)
}

/// The believer transformation: every relational atom `R(ȳ)` of a disjunct
/// becomes `R′(x, ȳ)` with one fresh variable `x` shared across the
/// disjunct. The result is pleasant (for inputs without ground inequality
/// atoms, which pass through unchanged).
pub fn pleasantize(q: &Ucq) -> Result<Ucq, ReduceError> {
    let primed = believer_signature(q.sig());
    let mut disjuncts = Vec::with_capacity(q.disjuncts().len());
    for d in q.disjuncts() {
        let believer = fresh_name("b", |n| d.var_set().contains(n));
        let atoms = d
            .atoms()
            .iter()
            .map(|atom| match atom {
                Atom::Rel { rel, args } => {
                    let mut new_args = Vec::with_capacity(args.len() + 1);
                    new_args.push(Term::var(&believer));
                    new_args.extend(args.iter().cloned());
                    Atom::Rel { rel: prime_name(rel), args: new_args }
                }
                Atom::Neq(a, b) => Atom::Neq(a.clone(), b.clone()),
            })
            .collect();
        disjuncts.push(Cq::new(primed.clone(), atoms)?);
    }
    Ok(Ucq::new(disjuncts)?)
}

/// `D^c`: tags every fact of a base structure with believer `c` (adding `c`
/// as a vertex when new).
pub fn believer_lift(d: &Structure, c: &str) -> Result<Structure, ReduceError> {
    let primed = believer_signature(d.sig());
    let mut vertices: Vec<String> = d.vertices().iter().cloned().collect();
    vertices.push(c.to_string());
    let facts = d
        .facts()
        .iter()
        .map(|f| {
            let mut args = Vec::with_capacity(f.args.len() + 1);
            args.push(c.to_string());
            args.extend(f.args.iter().cloned());
            Fact { rel: prime_name(&f.rel), args }
        })
        .collect::<Vec<_>>();
    Ok(Structure::new(primed, vertices, facts, d.consts().clone())?)
}

/// `D_c`: what believer `c` believes. Keeps the whole vertex set, so
/// summing counts over all believers matches the lifted query's count.
pub fn believer_slice(d: &Structure, c: &str) -> Result<Structure, ReduceError> {
    if !d.vertices().contains(c) {
        return Err(ReduceError::VertexMissing(c.to_string()));
    }
    let base = unprime_signature(d.sig())?;
    let facts = d
        .facts()
        .iter()
        .filter(|f| f.args[0] == c)
        .map(|f| {
            let rel = f
                .rel
                .strip_suffix(PRIME_SUFFIX)
                .expect("signature already validated")
                .to_string();
            Fact { rel, args: f.args[1..].to_vec() }
        })
        .collect::<Vec<_>>();
    Ok(Structure::new(
        base,
        d.vertices().iter().cloned(),
        facts,
        d.consts().clone(),
    )?)
}

fn planet_mars_cq(ext: &Signature) -> Result<Cq, QueryError> {
    let mars = Term::constant(MARS);
    let venus = Term::constant(VENUS);
    Cq::new(
        ext.clone(),
        alloc::vec![
            Atom::rel(REL_R, alloc::vec![venus.clone(), mars.clone()]),
            Atom::rel(REL_R, alloc::vec![mars, venus]),
        ],
    )
}

/// The UCQ-vs-CQ pair for a polynomial comparison `P_s(Ξ) <= 1 + P_b(Ξ)`:
/// the s-side evaluates `P_s` at Mars disjunct-wise, the b-side is the
/// CQ-ization of `ucq(P_b)`. Mode: non-trivial structures.
pub fn build_thm2(ps: &Polynomial, pb: &Polynomial) -> Result<ReductionInstance, ReduceError> {
    if ps.is_empty() || pb.is_empty() {
        return Err(ReduceError::EmptyPolynomial);
    }
    let nvars = ps.nvars().max(pb.nvars());
    let ps = ps.widen(nvars)?;
    let pb = pb.widen(nvars)?;
    let sig = unary_sig(nvars);
    let good = good_query(&sig)?;
    let mars = Term::constant(MARS);
    let mut disjuncts = Vec::with_capacity(ps.len());
    for m in ps.monomials() {
        let watched = relativize(&mars, &mono_to_cq(m, nvars)?)?;
        disjuncts.push(good.conjoin(&watched)?);
    }
    let phi_b = cqize(&poly_to_ucq(&pb)?)?;
    Ok(ReductionInstance {
        qs: Ucq::new(disjuncts)?,
        qb: Ucq::from_cq(phi_b),
        scale: Rational::one(),
        mode: Mode::NonTrivialOnly,
        provenance: Provenance::Theorem2,
    })
}

/// The scaled CQ-vs-CQ pair for `c = 1 + ε`: pads the polynomial pair to
/// the ¢-coefficient condition, then `β_s = Good ∧ Planet(mars) ∧
/// cqize(ucq(P_s))` and `β_b = η₁ ∧ cqize(ucq(P_b))`, claimed at scale `c`
/// over non-trivial structures.
pub fn build_thm3(
    ps0: &Polynomial,
    pb0: &Polynomial,
    eps: &Rational,
) -> Result<ReductionInstance, ReduceError> {
    let zero = Rational::from_integer(BigInt::from(0));
    let one = Rational::one();
    if !(eps > &zero && eps <= &one) {
        return Err(ReduceError::EpsOutOfRange);
    }
    if ps0.is_empty() || pb0.is_empty() {
        return Err(ReduceError::EmptyPolynomial);
    }
    let c = one + eps;
    let cent = pick_cent(&c)?;
    let padded = pad_polynomials(ps0, pb0, &c, &cent)?;
    let nvars = padded.p_s.nvars();
    let sig = unary_sig(nvars);
    let ext = sig.extend()?;

    let beta_s = good_query(&sig)?
        .conjoin(&planet_mars_cq(&ext)?)?
        .conjoin(&cqize(&poly_to_ucq(&padded.p_s)?)?)?;
    let beta_b = eta1(&sig)?.conjoin(&cqize(&poly_to_ucq(&padded.p_b)?)?)?;
    Ok(ReductionInstance {
        qs: Ucq::from_cq(beta_s),
        qb: Ucq::from_cq(beta_b),
        scale: c.clone(),
        mode: Mode::NonTrivialOnly,
        provenance: Provenance::Theorem3 { c, cent, u: padded.u },
    })
}

/// The inequality gadgets over `{P/1}` plus the Mars/Venus constants:
/// `α_s = mars≠venus ∧ P(mars) ∧ P(venus) ∧ P(z) ∧ P(z')` and
/// `α_b = P(z) ∧ P(z') ∧ z≠z'`. For every structure
/// `α_s ⟶ D <= 2·(α_b ⟶ D)`, with equality achievable.
pub fn cor5_gadgets() -> (Cq, Cq) {
    let sig = Signature::of(&[(GADGET_REL, 1)], &[])
        .and_then(|s| s.extend())
        .expect("gadget signature is well-formed");
    gadget_queries(&sig).expect("gadgets over their own signature are valid")
}

fn gadget_queries(sig: &Signature) -> Result<(Cq, Cq), QueryError> {
    let mars = Term::constant(MARS);
    let venus = Term::constant(VENUS);
    let alpha_s = Cq::new(
        sig.clone(),
        alloc::vec![
            Atom::Neq(mars.clone(), venus.clone()),
            Atom::rel(GADGET_REL, alloc::vec![mars]),
            Atom::rel(GADGET_REL, alloc::vec![venus]),
            Atom::rel(GADGET_REL, alloc::vec![Term::var("z")]),
            Atom::rel(GADGET_REL, alloc::vec![Term::var("zp")]),
        ],
    )?;
    let alpha_b = Cq::new(
        sig.clone(),
        alloc::vec![
            Atom::rel(GADGET_REL, alloc::vec![Term::var("z")]),
            Atom::rel(GADGET_REL, alloc::vec![Term::var("zp")]),
            Atom::Neq(Term::var("z"), Term::var("zp")),
        ],
    )?;
    Ok((alpha_s, alpha_b))
}

/// Internalizes the factor 2 and the non-triviality requirement of a scaled
/// instance into inequality atoms: `γ_s = β_s ∧ α_s`, `γ_b = β_b ∧ α_b`
/// over the common signature extended with the fresh gadget relation.
/// `2·β_s` contained in `β_b` over non-trivial structures iff `γ_s`
/// contained in `γ_b` over all structures.
pub fn cor5_compose(beta_s: &Cq, beta_b: &Cq) -> Result<ReductionInstance, ReduceError> {
    if beta_s.sig() != beta_b.sig() {
        return Err(ReduceError::SignatureMismatch);
    }
    if beta_s.sig().has_relation(GADGET_REL) {
        return Err(ReduceError::RelationTaken(GADGET_REL.to_string()));
    }
    let sig = beta_s
        .sig()
        .with_added(&[(GADGET_REL, 1)], &[MARS, VENUS])?;
    let (alpha_s, alpha_b) = gadget_queries(&sig)?;
    let lift = |q: &Cq| Cq::new(sig.clone(), q.atoms().to_vec());
    let gamma_s = lift(beta_s)?.conjoin(&alpha_s)?;
    let gamma_b = lift(beta_b)?.conjoin(&alpha_b)?;
    Ok(ReductionInstance {
        qs: Ucq::from_cq(gamma_s),
        qb: Ucq::from_cq(gamma_b),
        scale: Rational::one(),
        mode: Mode::AllStructures,
        provenance: Provenance::Corollary5,
    })
}

/// True when the instance claims containment at `d` (respecting its mode:
/// a trivial structure never witnesses anything for non-trivial-only
/// instances).
pub fn instance_applies_to(inst: &ReductionInstance, d: &Structure) -> bool {
    match inst.mode {
        Mode::AllStructures => true,
        Mode::NonTrivialOnly => {
            matches!(
                (d.interpretation(MARS), d.interpretation(VENUS)),
                (Some(m), Some(v)) if m != v
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{apply, count_homs, count_homs_naive};
    use crate::poly::{Monomial, Valuation};
    use alloc::collections::{BTreeMap, BTreeSet};
    use alloc::vec;

    #[test]
    fn pleasantize_adds_a_shared_variable() {
        let sig = Signature::of(&[("A", 1), ("B", 2)], &["a"]).unwrap();
        let q = Cq::new(
            sig.clone(),
            vec![
                Atom::rel("A", vec![Term::constant("a")]),
                Atom::rel("B", vec![Term::constant("a"), Term::var("x")]),
            ],
        )
        .unwrap();
        assert!(!q.is_pleasant());
        let p = pleasantize(&Ucq::from_cq(q)).unwrap();
        assert!(p.is_pleasant());
        let d = p.disjuncts()[0].clone();
        assert_eq!(d.atoms().len(), 2);
        // both atoms share the same believer variable
        let believers: BTreeSet<&Term> = d
            .atoms()
            .iter()
            .map(|a| match a {
                Atom::Rel { args, .. } => &args[0],
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(believers.len(), 1);
    }

    #[test]
    fn believer_round_trip() {
        let sig = Signature::of(&[("E", 2)], &[]).unwrap();
        let d = Structure::new(
            sig,
            vec!["c".to_string()],
            vec![Fact::new("E", &["a", "b"]), Fact::new("E", &["b", "c"])],
            BTreeMap::new(),
        )
        .unwrap();
        let lifted = believer_lift(&d, "c").unwrap();
        assert!(lifted.has_fact("E_b", &["c".into(), "a".into(), "b".into()]));
        let back = believer_slice(&lifted, "c").unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn believer_identity_on_a_small_structure() {
        // count of the lifted query equals the sum of slice counts
        let sig = Signature::of(&[("E", 2)], &[]).unwrap();
        let primed = believer_signature(&sig);
        let d = Structure::new(
            primed,
            vec![],
            vec![
                Fact::new("E_b", &["u", "a", "b"]),
                Fact::new("E_b", &["u", "b", "a"]),
                Fact::new("E_b", &["a", "a", "a"]),
            ],
            BTreeMap::new(),
        )
        .unwrap();
        let phi = Cq::new(
            sig,
            vec![Atom::rel("E", vec![Term::var("x"), Term::var("y")])],
        )
        .unwrap();
        let lifted = pleasantize(&Ucq::from_cq(phi.clone())).unwrap();
        let total = apply(&lifted, &d).unwrap();
        let mut by_slices = Count::from(0u32);
        for c in d.vertices() {
            let slice = believer_slice(&d, c).unwrap();
            by_slices += count_homs(&phi, &slice).unwrap();
        }
        assert_eq!(total, by_slices);
    }

    #[test]
    fn cor5_gadget_counts() {
        let (alpha_s, alpha_b) = cor5_gadgets();
        let sig = alpha_s.sig().clone();
        let mut consts = BTreeMap::new();
        consts.insert(MARS.to_string(), "m".to_string());
        consts.insert(VENUS.to_string(), "v".to_string());
        let d = Structure::new(
            sig.clone(),
            vec![],
            vec![Fact::new("P", &["m"]), Fact::new("P", &["v"])],
            consts.clone(),
        )
        .unwrap();
        assert_eq!(count_homs_naive(&alpha_s, &d).unwrap(), Count::from(4u32));
        assert_eq!(count_homs_naive(&alpha_b, &d).unwrap(), Count::from(2u32));
        assert_eq!(count_homs(&alpha_s, &d).unwrap(), Count::from(4u32));
        assert_eq!(count_homs(&alpha_b, &d).unwrap(), Count::from(2u32));

        // trivial structure: mars = venus kills the s-gadget
        let mut consts_t = BTreeMap::new();
        consts_t.insert(MARS.to_string(), "m".to_string());
        consts_t.insert(VENUS.to_string(), "m".to_string());
        let dt = Structure::new(sig, vec![], vec![Fact::new("P", &["m"])], consts_t).unwrap();
        assert_eq!(count_homs(&alpha_s, &dt).unwrap(), Count::from(0u32));
    }

    #[test]
    fn thm2_counts_on_marsification() {
        use crate::poly::structure_of_valuation;
        use crate::transform::marsify;
        let ps = Polynomial::new(
            2,
            vec![
                Monomial::new(vec![1]).unwrap(),
                Monomial::new(vec![1, 2]).unwrap(),
            ],
        )
        .unwrap();
        let pb = Polynomial::new(2, vec![Monomial::new(vec![2]).unwrap()]).unwrap();
        let inst = build_thm2(&ps, &pb).unwrap();
        let xi = Valuation::from_u32(&[3, 2]);
        let d = marsify(&structure_of_valuation(&xi).unwrap()).unwrap();
        // s-side reads P_s at Mars; b-side is 1 + P_b
        assert_eq!(apply(&inst.qs, &d).unwrap(), ps.eval(&xi).unwrap());
        let expected_b = Count::from(1u32) + pb.eval(&xi).unwrap();
        assert_eq!(apply(&inst.qb, &d).unwrap(), expected_b);
    }

    #[test]
    fn thm3_rejects_bad_eps() {
        let p = Polynomial::new(1, vec![Monomial::new(vec![1]).unwrap()]).unwrap();
        let zero = Rational::from_integer(BigInt::from(0));
        assert!(matches!(
            build_thm3(&p, &p, &zero),
            Err(ReduceError::EpsOutOfRange)
        ));
        let two = Rational::from_integer(BigInt::from(2));
        assert!(matches!(
            build_thm3(&p, &p, &two),
            Err(ReduceError::EpsOutOfRange)
        ));
    }

    #[test]
    fn thm1_requires_pleasant_inputs() {
        let sig = Signature::of(&[("A", 1)], &["a"]).unwrap();
        let unpleasant = Cq::new(sig.clone(), vec![Atom::rel("A", vec![Term::constant("a")])])
            .unwrap();
        let pleasant = Cq::new(sig, vec![Atom::rel("A", vec![Term::var("x")])]).unwrap();
        assert!(matches!(
            build_thm1(&unpleasant, &Ucq::from_cq(pleasant.clone())),
            Err(ReduceError::NotPleasant)
        ));
        assert!(build_thm1(&pleasant, &Ucq::from_cq(pleasant.clone())).is_ok());
    }
}
