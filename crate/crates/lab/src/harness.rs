//! The property harness: one registered check per identity the library is
//! built around, each running over seeded generated inputs and reporting
//! pass/fail counts with a serialized first counterexample, plus a bounded
//! counterexample search for containment instances.
//!
//! Conditional identities are checked exactly as their proofs use them: the
//! premise is evaluated on the generated inputs and only premise-satisfying
//! cases count as runs.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use bagcq_core::eval::{
    apply, check_scaled_containment_at, count_homs, count_homs_naive, planets,
    planets_beyond_venus, seen, Count, EvalError, Rational,
};
use bagcq_core::poly::{
    coef, coef_condition_holds, mono_to_cq, pad_polynomials, pick_cent, poly_to_ucq, unary_sig,
    Monomial, PolyError, Polynomial,
};
use bagcq_core::query::{Cq, QueryError, Term, Ucq};
use bagcq_core::reduce::{
    believer_slice, build_thm1, build_thm2, build_thm3, cor5_gadgets, instance_applies_to,
    pleasantize, Mode, ReduceError, ReductionInstance,
};
use bagcq_core::sig::{SigError, MARS, VENUS};
use bagcq_core::structure::{Structure, StructureError};
use bagcq_core::transform::{
    cqize, enumerate_trips, eta0, relativize, substitute, Trip, TripClass, XformError,
};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand::Rng;

use crate::gen::{
    enumerate_structures, random_base_sig, random_cq, random_flagged_structure,
    random_monomial, random_polynomial, random_structure, random_ucq, random_valuation,
    sample_structures, FlagReq, GenConfig, GenError, QueryGenOpts,
};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("unknown lemma id `{0}`")]
    UnknownLemma(String),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Xform(#[from] XformError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Sig(#[from] SigError),
}

/// Outcome of one lemma check over generated inputs.
#[derive(Debug, Clone)]
pub struct LemmaReport {
    pub lemma: String,
    pub cases_run: usize,
    pub cases_passed: usize,
    pub first_counterexample: Option<String>,
    pub elapsed: Duration,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.cases_passed == self.cases_run
    }
}

/// The registered identity checks.
pub const LEMMA_IDS: &[&str] = &[
    "obs1",
    "obs2",
    "lem4",
    "lem8",
    "lem9",
    "lem5",
    "lem6",
    "lem10",
    "lem13",
    "lem16",
    "lem19",
    "lem17",
    "lem18",
    "lem21",
    "lem22-split",
    "lem23",
    "lem24",
    "appE-closed-form",
    "appA-identity",
    "appB-padding",
    "cor5-claims",
    "thm1-neg",
    "thm2-neg",
    "thm3-neg",
];

struct Cases {
    run: usize,
    passed: usize,
    cex: Option<String>,
}

impl Cases {
    fn new() -> Cases {
        Cases { run: 0, passed: 0, cex: None }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.run += 1;
        if ok {
            self.passed += 1;
        } else if self.cex.is_none() {
            self.cex = Some(describe());
        }
    }
}

fn salt(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x1000_0000_01b3)
    })
}

fn rng_for(cfg: &GenConfig, name: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ salt(name))
}

/// Runs one registered lemma check under the given budget.
pub fn check_lemma(name: &str, cfg: &GenConfig) -> Result<LemmaReport, HarnessError> {
    let start = Instant::now();
    let mut cases = Cases::new();
    match name {
        "obs1" => check_obs1(cfg, &mut cases)?,
        "obs2" => check_obs2(cfg, &mut cases)?,
        "lem4" => check_lem4(cfg, &mut cases)?,
        "lem8" => check_lem8(cfg, &mut cases)?,
        "lem9" => check_lem9(cfg, &mut cases)?,
        "lem5" => check_lem5(cfg, &mut cases)?,
        "lem6" => check_lem6(cfg, &mut cases)?,
        "lem10" => check_lem10(cfg, &mut cases)?,
        "lem13" => check_lem13(cfg, &mut cases)?,
        "lem16" => check_lem16(cfg, &mut cases)?,
        "lem19" => check_lem19(cfg, &mut cases)?,
        "lem17" => check_lem17(cfg, &mut cases)?,
        "lem18" => check_lem18(cfg, &mut cases)?,
        "lem21" => check_lem21(cfg, &mut cases)?,
        "lem22-split" => check_lem22_split(cfg, &mut cases)?,
        "lem23" => check_trip_combinatorics(cfg, TripCheck::PerTripCounts, &mut cases)?,
        "lem24" => check_trip_combinatorics(cfg, TripCheck::ScaledGroupSizes, &mut cases)?,
        "appE-closed-form" => {
            check_trip_combinatorics(cfg, TripCheck::ClosedForm, &mut cases)?
        }
        "appA-identity" => check_appa(cfg, &mut cases)?,
        "appB-padding" => check_appb(cfg, &mut cases)?,
        "cor5-claims" => check_cor5(cfg, &mut cases)?,
        "thm1-neg" => check_thm1_neg(cfg, &mut cases)?,
        "thm2-neg" => check_thm2_neg(cfg, &mut cases)?,
        "thm3-neg" => check_thm3_neg(cfg, &mut cases)?,
        other => return Err(HarnessError::UnknownLemma(other.to_string())),
    }
    Ok(LemmaReport {
        lemma: name.to_string(),
        cases_run: cases.run,
        cases_passed: cases.passed,
        first_counterexample: cases.cex,
        elapsed: start.elapsed(),
    })
}

fn n1() -> Count {
    Count::one()
}

fn rat(c: &Count) -> Rational {
    Rational::from_integer(BigInt::from(c.clone()))
}

fn show_case(parts: &[(&str, String)]) -> String {
    parts
        .iter()
        .map(|(k, v)| format!("{k}: {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Disconnected conjuncts multiply:
/// `count(q) = prod over components of count`.
fn check_obs1(cfg: &GenConfig, cases: &mut Cases) -> Result<(), HarnessError> {
    let mut rng = rng_for(cfg, "obs1");
    let opts = QueryGenOpts { pleasant: false, ..QueryGenOpts::default() };
    for _ in 0..cfg.samples {
        let sig = random_base_sig(&mut rng, true);
        let q = random_cq(&mut rng, &sig, &opts);
        let d = random_structure(&mut rng, &sig, cfg.max_vertices, false);
        let whole = count_homs(&q, &d)?;
        let mut product = n1();
        for part in bagcq_core::eval::component_split(&q)? {
            product *= count_homs(&part, &d)?;
        }
        cases.check(whole == product, || {
            show_case(&[
                ("query", q.to_string()),
                ("structure", crate::text::structure_to_text(&d)),
                ("whole", whole.to_string()),
                ("product", product.to_string()),
            ])
        });
    }
    Ok(())
}

/// Single-alien CQ-ization sums relativized counts over the planets.
fn check_obs2(cfg: &GenConfig, cases: &mut Cases) -> Result<(), HarnessError> {
    let mut rng = rng_for(cfg, "obs2");
    for _ in 0..cfg.samples {
        let sig = random_base_sig(&mut rng, true);
        let psi = random_cq(&mut rng, &sig, &QueryGenOpts::default());
        let ext = sig.extend()?;
        let d = random_structure(&mut rng, &ext, cfg.max_vertices, false);
        let lhs = count_homs(&cqize(&Ucq::from_cq(psi.clone()))?, &d)?;
        let mut rhs = Count::zero();
        for p in planets(&d)? {
            rhs += count_homs(&relativize(&Term::Vertex(p), &psi)?, &d)?;
        }
        cases.check(lhs == rhs, || {
            show_case(&[
                ("query", psi.to_string()),
                ("structure", crate::text::structure_to_text(&d)),
                ("cqized", lhs.to_string()),
                ("sum over planets", rhs.to_string()),
            ])
        });
    }
    Ok(())
}

/// Pleasant queries are satisfiable on good structures.
fn check_lem4(cfg: &GenConfig, cases: &mut Cases) -> Result<(), HarnessError> {
    let mut rng = rng_for(cfg, "lem4");
    for _ in 0..cfg.samples {
        let sig = random_base_sig(&mut rng, true);
        let ext = sig.extend()?;
        let d = random_flagged_structure(
            &mut rng,
            &ext,
            cfg.max_vertices,
            FlagReq { good: true, ..FlagReq::default() },
        );
        let phi = random_cq(&mut rng, &sig, &QueryGenOpts::default());
        let count = count_homs(&phi, &d)?;
        cases.check(count >= n1(), || {
            show_case(&[
                ("query", phi.to_string()),
                ("structure", crate::text::structure_to_text(&d)),
                ("count", count.to_string()),
            ])
        });
    }
    Ok(())
}

/// Relativized counts equal counts over the seen substructure.
fn check_lem8(cfg: &GenConfig, cases: &mut Cases) -> Result<(), HarnessError> {
    let mut rng = rng_for(cfg, "lem8");
    for _ in 0..cfg.samples {
        let sig = random_base_sig(&mut rng, false);
        let ext = sig.extend()?;
        let d = random_flagged_structure(
            &mut rng,
            &ext,
            cfg.max_vertices,
            FlagReq { good: true, ..FlagReq::default() },
        );
        let phi = random_cq(&mut rng, &sig, &QueryGenOpts { allow_constants: false, ..QueryGenOpts::default() });
        let mut ok = true;
        let mut detail = String::new();
        for p in planets(&d)? {
            let lhs = count_homs(&relativize(&Term::Vertex(p.clone()), &phi)?, &d)?;
            let rhs = count_homs(&phi, &seen(&p, &d)?)?;
            if lhs != rhs {
                ok = false;
                detail = format!("planet {p}: relativized {lhs}, seen-side {rhs}");
                break;
            }
        }
        cases.check(ok, || {
            show_case(&[
                ("query", phi.to_string()),
                ("structure", crate::text::structure_to_text(&d)),
                ("mismatch", detail.clone()),
            ])
        });
    }
    Ok(())
}

/// On foggy structures the Venus-relativized count of a pleasant query is 1.
fn check_lem9(cfg: &GenConfig, cases: &mut Cases) -> Result<(), HarnessError> {
    let mut rng = rng_for(cfg, "lem9");
    for _ in 0..cfg.samples {
        let sig = random_base_sig(&mut rng, false);
        let ext = sig.extend()?;
        let d = random_flagged_structure(
            &mut rng,
            &ext,
            cfg.max_vertices,
            FlagReq { good: true, foggy: true, ..FlagReq::default() },
        );
        let phi = random_cq(&mut rng, &sig, &QueryGenOpts { allow_constants: false, ..QueryGenOpts::default() });
        let count = count_homs(&relativize(&Term::constant(VENUS), &phi)?, &d)?;
        cases.check(count == n1(), || {
            show_case(&[
                ("query", phi.to_string()),
                ("structure", crate::text::structure_to_text(&d)),
                ("count", count.to_string()),
            ])
        });
    }
    Ok(())
}

fn trip_inputs(
    rng: &mut ChaCha8Rng,
    cfg: &GenConfig,
) -> Result<(Ucq, Structure), HarnessError> {
    let sig = random_base_sig(rng, false);
    let ext = sig.extend()?;
    let d = random_flagged_structure(
        rng,
        &ext,
        cfg.max_vertices,
        FlagReq { good: true, ..FlagReq::default() },
    );
    let q = random_ucq(rng, &sig, &QueryGenOpts { allow_constants: false, ..QueryGenOpts::default() });
    Ok((q, d))
}

/// Counting by trips: the direct count is the sum of per-trip counts.
fn check_lem5(cfg: &GenConfig, cases: &mut Cases) -> Result<(), HarnessError> {
    let mut rng = rng_for(cfg, "lem5");
    for _ in 0..cfg.samples {
        let (q, d) = trip_inputs(&mut rng, cfg)?;
        let cq = cqize(&q)?;
        let direct = count_homs(&cq, &d)?;
        let mut by_trips = Count::zero();
        for (trip, _) in enumerate_trips(q.disjuncts().len(), &d)? {
            by_trips += count_homs(&substitute(&cq, &trip.substitution())?, &d)?;
        }
        cases.check(direct == by_trips, || {
            show_case(&[
                ("query", q.to_string()),
                ("structure", crate::text::structure_to_text(&d)),
                ("direct", direct.to_string()),
                ("sum over trips", by_trips.to_string()),
            ])
        });
    }
    Ok(())
}

/// Per-trip counts factor into per-disjunct counts over seen substructures,
/// and the trip-wise operator agrees with direct counting.
fn check_lem6(cfg: &GenConfig, cases: &mut Cases) -> Result<(), HarnessError> {
    let mut rng = rng_for(cfg, "lem6");
    for _ in 0..cfg.samples {
        let (q, d) = trip_inputs(&mut rng, cfg)?;
        let cq = cqize(&q)?;
        let mut seen_cache: BTreeMap<String, Structure> = BTreeMap::new();
        for p in planets(&d)? {
            seen_cache.insert(p.clone(), seen(&p, &d)?);
        }
        let mut ok = true;
        let mut detail = String::new();
        for (trip, _) in enumerate_trips(q.disjuncts().len(), &d)? {
            let direct = count_homs(&substitute(&cq, &trip.substitution())?, &d)?;
            let mut product = n1();
            for (j, disjunct) in q.disjuncts().iter().enumerate() {
                product *= count_homs(disjunct, &seen_cache[&trip.images()[j]])?;
            }
            if direct != product {
                ok = false;
                detail = format!("trip {:?}: direct {direct}, product {product}", trip.images());
                break;
            }
        }
        let op_total = bagcq_core::transform::count_by_trips(&q, &d)?.total;
        let direct_total = count_homs(&cq, &d)?;
        if ok && op_total != direct_total {
            ok = false;
            detail = format!("operator total {op_total}, direct {direct_total}");
        }
        cases.check(ok, || {
            show_case(&[
                ("query", q.to_string()),
                ("structure", crate::text::structure_to_text(&d)),
                ("mismatch", detail.clone()),
            ])
        });
    }
    Ok(())
}

/// The plus-one law: CQ-izing and marsifying adds exactly one homomorphism.
fn check_lem10(cfg: &GenConfig, cases: &mut Cases) -> Result<(), HarnessError> {
    let mut rng = rng_for(cfg, "lem10");
    for _ in 0..cfg.samples {
        let sig = random_base_sig(&mut rng, true);
        let q = random_ucq(&mut rng, &sig, &QueryGenOpts::default());
        let d = random_structure(&mut rng, &sig, cfg.max_vertices, false);
        let m = bagcq_core::transform::marsify(&d)?;
        let lhs = count_homs(&cqize(&q)?, &m)?;
        let rhs = n1() + apply(&q, &d)?;
        cases.check(lhs == rhs, || {
            show_case(&[
                ("query", q.to_string()),
                ("structure", crate::text::structure_to_text(&d)),
                ("cqized on marsification", lhs.to_string()),
                ("1 + direct", rhs.to_string()),
            ])
        });
    }
    Ok(())
}

/// Monomials evaluate like their unary queries count.
fn check_lem13(cfg: &GenConfig, cases: &mut Cases) -> Result<(), HarnessError> {
    let mut rng = rng_for(cfg, "lem13");
    for _ in 0..cfg.samples {
        let nvars = rng.random_range(1..=3u32);
        let m = random_monomial(&mut rng, nvars, 3);
        let d = random_structure(&mut rng, &unary_sig(nvars), cfg.max_vertices, false);
        let xi = bagcq_core::poly::valuation_of_structure(&d)?;
        let lhs = m.eval(&xi)?;
        let rhs = count_homs(&mono_to_cq(&m, nvars)?, &d)?;
        cases.check(lhs == rhs, || {
            show_case(&[
                ("monomial", m.to_string()),
                ("structure", crate::text::structure_to_text(&d)),
                ("value", lhs.to_string()),
                ("count", rhs.to_string()),
            ])
        });
    }
    Ok(())
}

/// Polynomials evaluate like their unions count.
fn check_lem16(cfg: &GenConfig, cases: &mut Cases) -> Result<(), HarnessError> {
    let mut rng = rng_for(cfg, "lem16");
    for _ in 0..cfg.samples {
        let nvars = rng.random_range(1..=3u32);
        let p = random_polynomial(&mut rng, nvars, 4, 3);
        let d = random_structure(&mut rng, &unary_sig(nvars), cfg.max_vertices, false);
        let xi = bagcq_core::poly::valuation_of_structure(&d)?;
        let lhs = p.eval(&xi)?;
        let rhs = apply(&poly_to_ucq(&p)?, &d)?;
        cases.check(lhs == rhs, || {
            show_case(&[
                ("polynomial", p.to_string()),
                ("structure", crate::text::structure_to_text(&d)),
                ("value", lhs.to_string()),
                ("count", rhs.to_string()),
            ])
        });
    }
    Ok(())
}

/// Local valuations: monomials and polynomials evaluated at a planet's
/// valuation equal their relativized counts.
fn check_lem19(cfg: &GenConfig, cases: &mut Cases) -> Result<(), HarnessError> {
    let mut rng = rng_for(cfg, "lem19");
    for _ in 0..cfg.samples {
        let nvars = rng.random_range(1..=3u32);
        let ext = unary_sig(nvars).extend()?;
        let d = random_flagged_structure(
            &mut rng,
            &ext,
            cfg.max_vertices,
            FlagReq { good: true, ..FlagReq::default() },
        );
        let m = random_monomial(&mut rng, nvars, 3);
        let p = random_polynomial(&mut rng, nvars, 3, 2);
        let mut ok = true;
        let mut detail = String::new();
        for planet in planets(&d)? {
            let xi = bagcq_core::poly::local_valuation(&planet, &d)?;
            let mono_count =
                count_homs(&relativize(&Term::Vertex(planet.clone()), &mono_to_cq(&m, nvars)?)?, &d)?;
            if m.eval(&xi)? != mono_count {
                ok = false;
                detail = format!("monomial at {planet}");
                break;
            }
            let mut poly_count = Count::zero();
            for mk in p.monomials() {
                poly_count += count_homs(
                    &relativize(&Term::Vertex(planet.clone()), &mono_to_cq(mk, nvars)?)?,
                    &d,
                )?;
            }
            if p.eval(&xi)? != poly_count {
                ok = false;
                detail = format!("polynomial at {planet}");
                break;
            }
        }
        cases.check(ok, || {
            show_case(&[
                ("monomial", m.to_string()),
                ("polynomial", p.to_string()),
                ("structure", crate::text::structure_to_text(&d)),
                ("mismatch", detail.clone()),
            ])
        });
    }
    Ok(())
}

fn thm1_style_inputs(
    rng: &mut ChaCha8Rng,
    cfg: &GenConfig,
) -> Result<(Cq, Ucq, Structure), HarnessError> {
    let sig = random_base_sig(rng, false);
    let ext = sig.extend()?;
    let d = random_flagged_structure(
        rng,
        &ext,
        cfg.max_vertices,
        FlagReq { good: true, ..FlagReq::default() },
    );
    let opts = QueryGenOpts { allow_constants: false, ..QueryGenOpts::default() };
    let psi_b = random_ucq(rng, &sig, &opts);
    // half the time take a disjunct of the big query, making the premise
    // hold on every substructure
    let psi_s = if rng.random_bool(0.5) {
        psi_b.disjuncts()[rng.random_range(0..psi_b.disjuncts().len())].clone()
    } else {
        random_cq(rng, &sig, &opts)
    };
    Ok((psi_s, psi_b, d))
}

/// Non-Venus planets: relativized small-query counts are dominated by the
/// one-away trips of the big query's CQ-ization, given the containment
/// premise at each non-Venus planet's view.
fn check_lem17(cfg: &GenConfig, cases: &mut Cases) -> Result<(), HarnessError> {
    let mut rng = rng_for(cfg, "lem17");
    for _ in 0..cfg.samples {
        let (psi_s, psi_b, d) = thm1_style_inputs(&mut rng, cfg)?;
        let psi_s_u = Ucq::from_cq(psi_s.clone());
        let mut premise = true;
        for p in planets_beyond_venus(&d)? {
            let view = seen(&p, &d)?;
            if apply(&psi_s_u, &view)? > apply(&psi_b, &view)? {
                premise = false;
                break;
            }
        }
        if !premise {
            continue;
        }
        let mut lhs = Count::zero();
        for p in planets_beyond_venus(&d)? {
            lhs += count_homs(&relativize(&Term::Vertex(p), &psi_s)?, &d)?;
        }
        let cq_b = cqize(&psi_b)?;
        let mut rhs = Count::zero();
        for (trip, class) in enumerate_trips(psi_b.disjuncts().len(), &d)? {
            if matches!(class, TripClass::OneAway { .. }) {
                rhs += count_homs(&substitute(&cq_b, &trip.substitution())?, &d)?;
            }
        }
        cases.check(lhs <= rhs, || {
            show_case(&[
                ("small query", psi_s.to_string()),
                ("big query", psi_b.to_string()),
                ("structure", crate::text::structure_to_text(&d)),
                ("lhs", lhs.to_string()),
                ("rhs", rhs.to_string()),
            ])
        });
    }
    Ok(())
}

/// The Venus trip: the small query's Venus-relativized count is dominated
/// by the big side's all-Venus contribution once the eta bonus is included.
fn check_lem18(cfg: &GenConfig, cases: &mut Cases) -> Result<(), HarnessError> {
    let mut rng = rng_for(cfg, "lem18");
    for _ in 0..cfg.samples {
        let (psi_s, psi_b, d) = thm1_style_inputs(&mut rng, cfg)?;
        let venus_vertex = d.interpretation(VENUS).expect("extension").to_string();
        let view = seen(&venus_vertex, &d)?;
        if apply(&Ucq::from_cq(psi_s.clone()), &view)? > apply(&psi_b, &view)? {
            continue;
        }
        let m = psi_b.disjuncts().len();
        let gamma_b = eta0(m, psi_b.sig())?.conjoin(&cqize(&psi_b)?)?;
        let all_venus: BTreeMap<String, String> = (1..=m)
            .map(|i| (bagcq_core::transform::alien_name(i), venus_vertex.clone()))
            .collect();
        let lhs = count_homs(&relativize(&Term::constant(VENUS), &psi_s)?, &d)?;
        let rhs = count_homs(&substitute(&gamma_b, &all_venus)?, &d)?;
        cases.check(lhs <= rhs, || {
            show_case(&[
                ("small query", psi_s.to_string()),
                ("big query", psi_b.to_string()),
                ("structure", crate::text::structure_to_text(&d)),
                ("lhs", lhs.to_string()),
                ("rhs", rhs.to_string()),
            ])
        });
    }
    Ok(())
}

/// Coefficient-dominated polynomial pairs have dominated CQ-ization counts
/// on good structures.
fn check_lem21(cfg: &GenConfig, cases: &mut Cases) -> Result<(), HarnessError> {
    let mut rng = rng_for(cfg, "lem21");
    let cent = Rational::new(BigInt::from(3), BigInt::from(2));
    for _ in 0..cfg.samples {
        let nvars = rng.random_range(1..=2u32);
        let ps = random_polynomial(&mut rng, nvars, 3, 2);
        let mut monomials: Vec<Monomial> = ps.monomials().to_vec();
        monomials.extend(ps.monomials().iter().cloned());
        for _ in 0..rng.random_range(0..=2) {
            monomials.push(random_monomial(&mut rng, nvars, 2));
        }
        let pb = Polynomial::new(nvars, monomials)?;
        debug_assert!(coef_condition_holds(&cent, &ps, &pb));
        let ext = unary_sig(nvars).extend()?;
        let d = random_flagged_structure(
            &mut rng,
            &ext,
            cfg.max_vertices.min(4),
            FlagReq { good: true, ..FlagReq::default() },
        );
        let small = count_homs(&cqize(&poly_to_ucq(&ps)?)?, &d)?;
        let big = count_homs(&cqize(&poly_to_ucq(&pb)?)?, &d)?;
        cases.check(small <= big, || {
            show_case(&[
                ("small polynomial", ps.to_string()),
                ("big polynomial", pb.to_string()),
                ("structure", crate::text::structure_to_text(&d)),
                ("small count", small.to_string()),
                ("big count", big.to_string()),
            ])
        });
    }
    Ok(())
}

/// A padded pair, its scaling constants, and a very good structure.
type PaddedSetup = (Polynomial, Polynomial, Rational, Rational, Structure);

/// Draws inputs for the scaled-trip checks, resampling until the padded
/// arities stay enumerable.
fn padded_setup(
    rng: &mut ChaCha8Rng,
    cfg: &GenConfig,
    max_arity: usize,
    require_mars_planet: bool,
) -> Result<Option<PaddedSetup>, HarnessError> {
    for _ in 0..40 {
        let nvars = rng.random_range(1..=2u32);
        let ps0 = random_polynomial(rng, nvars, 2, 2);
        let mut pb_monomials = ps0.monomials().to_vec();
        for _ in 0..rng.random_range(0..=2) {
            pb_monomials.push(random_monomial(rng, nvars, 2));
        }
        // sometimes drop down to a genuinely padded pair
        if rng.random_bool(0.4) && pb_monomials.len() > 1 {
            pb_monomials.remove(0);
        }
        let pb0 = Polynomial::new(nvars, pb_monomials)?;
        let eps = if rng.random_bool(0.5) {
            Rational::one()
        } else {
            Rational::new(BigInt::from(1), BigInt::from(2))
        };
        let c = Rational::one() + eps;
        let cent = pick_cent(&c)?;
        let padded = pad_polynomials(&ps0, &pb0, &c, &cent)?;
        if padded.p_s.len() > max_arity || padded.p_b.len() > max_arity {
            continue;
        }
        let ext = unary_sig(padded.p_s.nvars()).extend()?;
        let d = random_flagged_structure(
            rng,
            &ext,
            cfg.max_vertices.clamp(3, 5),
            FlagReq { very_good: true, good: true, foggy: true, non_trivial: true },
        );
        let ps = planets_beyond_venus(&d)?;
        if ps.is_empty() || ps.len() > 3 {
            continue;
        }
        if require_mars_planet {
            let mars = d.interpretation(MARS).expect("extension").to_string();
            if !ps.contains(&mars) {
                continue;
            }
        }
        return Ok(Some((padded.p_s, padded.p_b, c, cent, d)));
    }
    Ok(None)
}

/// The two-sorted trip inequality on very good structures: both the
/// home/one-away block and the two-plus-away block scale.
fn check_lem22_split(cfg: &GenConfig, cases: &mut Cases) -> Result<(), HarnessError> {
    let mut rng = rng_for(cfg, "lem22-split");
    for _ in 0..cfg.samples {
        let Some((p_s, p_b, c, _cent, d)) = padded_setup(&mut rng, cfg, 24, true)? else {
            continue;
        };
        let rows_s = bagcq_core::transform::count_by_trips(&poly_to_ucq(&p_s)?, &d)?.rows;
        let rows_b = bagcq_core::transform::count_by_trips(&poly_to_ucq(&p_b)?, &d)?.rows;
        let block = |rows: &[bagcq_core::transform::TripRow], two_plus: bool| {
            let mut sum = Count::zero();
            for r in rows {
                if matches!(r.class, TripClass::TwoPlusAway { .. }) == two_plus {
                    sum += r.count.clone();
                }
            }
            sum
        };
        // part 1 needs the scaled comparison to hold at every non-Venus
        // planet's local valuation
        let mut premise1 = true;
        for p in planets_beyond_venus(&d)? {
            let xi = bagcq_core::poly::local_valuation(&p, &d)?;
            let s_val = rat(&p_s.eval(&xi)?) + Rational::one();
            let b_val = rat(&p_b.eval(&xi)?) + Rational::one();
            if c.clone() * s_val > b_val {
                premise1 = false;
                break;
            }
        }
        let mut ok = true;
        let mut which = "";
        // bridging identity on very good structures: the home/one-away
        // block of trips, plus the planet count less one, equals the sum of
        // 1 + P(local valuation) over the non-Venus planets
        for (p, rows) in [(&p_s, &rows_s), (&p_b, &rows_b)] {
            let beyond = planets_beyond_venus(&d)?;
            let mut rhs = Count::from(beyond.len() as u32);
            for planet in &beyond {
                rhs += p.eval(&bagcq_core::poly::local_valuation(planet, &d)?)?;
            }
            let lhs = Count::from(beyond.len() as u32) - n1() + block(rows, false);
            if lhs != rhs {
                ok = false;
                which = "home-block bridging identity";
            }
        }
        if ok && premise1 {
            let near_s = block(&rows_s, false);
            let near_b = block(&rows_b, false);
            if c.clone() * rat(&near_s) > rat(&near_b) {
                ok = false;
                which = "home/one-away block";
            }
        }
        if ok {
            let far_s = block(&rows_s, true);
            let far_b = block(&rows_b, true);
            if c.clone() * rat(&far_s) > rat(&far_b) {
                ok = false;
                which = "two-plus-away block";
            }
        }
        cases.check(ok, || {
            show_case(&[
                ("small polynomial", p_s.to_string()),
                ("big polynomial", p_b.to_string()),
                ("structure", crate::text::structure_to_text(&d)),
                ("violated", which.to_string()),
            ])
        });
    }
    Ok(())
}

enum TripCheck {
    /// Every trip of a destination-set/monomial-assignment group counts the
    /// same product of relativized monomial counts.
    PerTripCounts,
    /// Scaled group sizes: `c * t_s <= t_b` for every group with `|A| >= 2`.
    ScaledGroupSizes,
    /// Group sizes equal the falling-factorial closed form.
    ClosedForm,
}

type GroupKey = (BTreeSet<String>, BTreeMap<String, Monomial>);

/// Groups the two-plus-away trips of a CQ-ized polynomial by destination
/// set and by which monomial visits which planet.
fn group_trips(
    p: &Polynomial,
    d: &Structure,
) -> Result<BTreeMap<GroupKey, Vec<Trip>>, HarnessError> {
    let mut groups: BTreeMap<GroupKey, Vec<Trip>> = BTreeMap::new();
    for (trip, class) in enumerate_trips(p.len(), d)? {
        let TripClass::TwoPlusAway { destinations } = class else {
            continue;
        };
        let mut tau: BTreeMap<String, Monomial> = BTreeMap::new();
        for planet in &destinations {
            let mut visitors = trip
                .images()
                .iter()
                .enumerate()
                .filter(|(_, q)| *q == planet)
                .map(|(j, _)| j);
            let j = visitors.next().expect("destination has a visitor");
            // on a very good structure each planet hosts exactly one alien
            assert!(visitors.next().is_none(), "two aliens share a planet on a very good structure");
            tau.insert(planet.clone(), p.monomials()[j].clone());
        }
        groups.entry((destinations, tau)).or_default().push(trip);
    }
    Ok(groups)
}

fn falling_factorial(n: &Count, k: usize) -> Count {
    let mut out = n1();
    for i in 0..k {
        let step = Count::from(i);
        if *n <= step {
            return Count::zero();
        }
        out *= n - step;
    }
    out
}

fn closed_form(p: &Polynomial, key: &GroupKey) -> Count {
    let (dest, tau) = key;
    let mut by_monomial: BTreeMap<&Monomial, usize> = BTreeMap::new();
    for planet in dest {
        *by_monomial.entry(&tau[planet]).or_default() += 1;
    }
    let mut out = n1();
    for (m, k) in by_monomial {
        out *= falling_factorial(&coef(m, p), k);
    }
    out
}

/// All monomial assignments A -> support for the closed-form sweep.
fn all_taus(dest: &BTreeSet<String>, support: &[Monomial]) -> Vec<BTreeMap<String, Monomial>> {
    let planets: Vec<&String> = dest.iter().collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; planets.len()];
    if support.is_empty() {
        return out;
    }
    loop {
        out.push(
            planets
                .iter()
                .zip(&idx)
                .map(|(p, &i)| ((*p).clone(), support[i].clone()))
                .collect(),
        );
        let mut pos = planets.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < support.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn check_trip_combinatorics(
    cfg: &GenConfig,
    which: TripCheck,
    cases: &mut Cases,
) -> Result<(), HarnessError> {
    let name = match which {
        TripCheck::PerTripCounts => "lem23",
        TripCheck::ScaledGroupSizes => "lem24",
        TripCheck::ClosedForm => "appE-closed-form",
    };
    let mut rng = rng_for(cfg, name);
    for _ in 0..cfg.samples {
        let Some((p_s, p_b, c, _cent, d)) = padded_setup(&mut rng, cfg, 16, false)? else {
            continue;
        };
        let groups_s = group_trips(&p_s, &d)?;
        let groups_b = group_trips(&p_b, &d)?;
        let mut ok = true;
        let mut detail = String::new();
        match which {
            TripCheck::PerTripCounts => {
                let cq_s = cqize(&poly_to_ucq(&p_s)?)?;
                let cq_b = cqize(&poly_to_ucq(&p_b)?)?;
                'groups: for (side, groups, cq) in
                    [("s", &groups_s, &cq_s), ("b", &groups_b, &cq_b)]
                {
                    for (key, trips) in groups.iter() {
                        let mut r = n1();
                        for (planet, m) in &key.1 {
                            r *= count_homs(
                                &relativize(
                                    &Term::Vertex(planet.clone()),
                                    &mono_to_cq(m, p_s.nvars())?,
                                )?,
                                &d,
                            )?;
                        }
                        for trip in trips {
                            let got = count_homs(&substitute(cq, &trip.substitution())?, &d)?;
                            if got != r {
                                ok = false;
                                detail = format!(
                                    "side {side}, group {:?}: trip {:?} counts {got}, r = {r}",
                                    key.0,
                                    trip.images()
                                );
                                break 'groups;
                            }
                        }
                    }
                }
            }
            TripCheck::ScaledGroupSizes => {
                let mut keys: BTreeSet<&GroupKey> = groups_s.keys().collect();
                keys.extend(groups_b.keys());
                for key in keys {
                    let t_s = groups_s.get(key).map_or(0, Vec::len);
                    let t_b = groups_b.get(key).map_or(0, Vec::len);
                    if c.clone() * rat(&Count::from(t_s)) > rat(&Count::from(t_b)) {
                        ok = false;
                        detail = format!("group {:?}: t_s = {t_s}, t_b = {t_b}", key.0);
                        break;
                    }
                }
            }
            TripCheck::ClosedForm => {
                // sweep every destination set and assignment, comparing the
                // enumerated sizes (0 when absent) to the closed form
                let mut support = p_s.support();
                support.extend(p_b.support());
                let support: Vec<Monomial> = support.into_iter().collect();
                let achieved: BTreeSet<BTreeSet<String>> = groups_s
                    .keys()
                    .chain(groups_b.keys())
                    .map(|(a, _)| a.clone())
                    .collect();
                'sets: for dest in &achieved {
                    for tau in all_taus(dest, &support) {
                        let key = (dest.clone(), tau);
                        for (groups, p) in [(&groups_s, &p_s), (&groups_b, &p_b)] {
                            let enumerated = Count::from(groups.get(&key).map_or(0, Vec::len));
                            let formula = closed_form(p, &key);
                            if enumerated != formula {
                                ok = false;
                                detail = format!(
                                    "group {:?}: enumerated {enumerated}, closed form {formula}",
                                    key.0
                                );
                                break 'sets;
                            }
                        }
                    }
                }
            }
        }
        cases.check(ok, || {
            show_case(&[
                ("small polynomial", p_s.to_string()),
                ("big polynomial", p_b.to_string()),
                ("structure", crate::text::structure_to_text(&d)),
                ("mismatch", detail.clone()),
            ])
        });
    }
    Ok(())
}

/// The believer identity: the lifted query counts the believer-indexed sum.
fn check_appa(cfg: &GenConfig, cases: &mut Cases) -> Result<(), HarnessError> {
    let mut rng = rng_for(cfg, "appA-identity");
    for _ in 0..cfg.samples {
        let sig = random_base_sig(&mut rng, true);
        let phi = random_cq(&mut rng, &sig, &QueryGenOpts { pleasant: false, ..QueryGenOpts::default() });
        let lifted = pleasantize(&Ucq::from_cq(phi.clone()))?;
        let d = random_structure(
            &mut rng,
            lifted.sig(),
            cfg.max_vertices,
            false,
        );
        let lhs = apply(&lifted, &d)?;
        let mut rhs = Count::zero();
        for c in d.vertices() {
            rhs += count_homs(&phi, &believer_slice(&d, c)?)?;
        }
        cases.check(lhs == rhs, || {
            show_case(&[
                ("query", phi.to_string()),
                ("structure", crate::text::structure_to_text(&d)),
                ("lifted count", lhs.to_string()),
                ("believer sum", rhs.to_string()),
            ])
        });
    }
    Ok(())
}

/// Padding soundness: the coefficient condition holds exhaustively, the
/// valuation equivalence holds on sampled valuations, and the chosen
/// padding multiplicity stays valid when bumped.
fn check_appb(cfg: &GenConfig, cases: &mut Cases) -> Result<(), HarnessError> {
    let mut rng = rng_for(cfg, "appB-padding");
    let epsilons = [
        Rational::one(),
        Rational::new(BigInt::from(1), BigInt::from(2)),
        Rational::new(BigInt::from(1), BigInt::from(10)),
    ];
    for i in 0..cfg.samples {
        let nvars = rng.random_range(1..=3u32);
        let ps0 = random_polynomial(&mut rng, nvars, 4, 3);
        let pb0 = random_polynomial(&mut rng, nvars, 4, 3);
        let eps = &epsilons[i % epsilons.len()];
        let c = Rational::one() + eps;
        let cent = pick_cent(&c)?;
        let padded = pad_polynomials(&ps0, &pb0, &c, &cent)?;

        let mut ok = coef_condition_holds(&cent, &padded.p_s, &padded.p_b);
        let mut detail = if ok { String::new() } else { "coefficient condition".to_string() };
        if ok {
            for _ in 0..20 {
                let xi = random_valuation(&mut rng, nvars, 5);
                let small = ps0.eval(&xi)? <= pb0.eval(&xi)?;
                let s = rat(&padded.p_s.eval(&xi)?) + Rational::one();
                let b = rat(&padded.p_b.eval(&xi)?) + Rational::one();
                let big = c.clone() * s <= b;
                if small != big {
                    ok = false;
                    detail = format!("valuation {xi}: inputs {small}, padded {big}");
                    break;
                }
            }
        }
        if ok {
            // any multiplicity above the chosen one also satisfies the
            // ratio condition over the (constant-augmented) inputs
            let bumped = rat(&padded.u) + Rational::one();
            let mut support = ps0.support();
            support.insert(Monomial::constant());
            for m in &support {
                let extra = if m.degree() == 0 { n1() } else { Count::zero() };
                let ys = rat(&(coef(m, &ps0) + extra.clone()));
                let xb = rat(&(coef(m, &pb0) + extra));
                if cent.clone() * (ys + bumped.clone()) > c.clone() * (xb + bumped.clone()) {
                    ok = false;
                    detail = format!("bumped multiplicity fails at {m}");
                    break;
                }
            }
        }
        cases.check(ok, || {
            show_case(&[
                ("small input", ps0.to_string()),
                ("big input", pb0.to_string()),
                ("epsilon", crate::text::rational_to_text(eps)),
                ("failure", detail.clone()),
            ])
        });
    }
    Ok(())
}

/// The inequality gadgets: the 2x domination holds exhaustively on small
/// structures and the witness achieves equality.
fn check_cor5(cfg: &GenConfig, cases: &mut Cases) -> Result<(), HarnessError> {
    let (alpha_s, alpha_b) = cor5_gadgets();
    // the gadgets never mention V or R: rebase them onto the minimal
    // signature so the exhaustive sweep covers exactly {P/1} + constants
    let minimal = bagcq_core::sig::Signature::of(&[("P", 1)], &[MARS, VENUS])?;
    let alpha_s = Cq::new(minimal.clone(), alpha_s.atoms().to_vec())?;
    let alpha_b = Cq::new(minimal.clone(), alpha_b.atoms().to_vec())?;
    let two = Rational::from_integer(BigInt::from(2));
    let cfg_enum = GenConfig::new(minimal)
        .max_vertices(cfg.max_vertices.min(3))
        .seed(cfg.seed);
    for d in enumerate_structures(&cfg_enum)? {
        let s = count_homs(&alpha_s, &d)?;
        let b = count_homs(&alpha_b, &d)?;
        cases.check(rat(&s) <= two.clone() * rat(&b), || {
            show_case(&[
                ("structure", crate::text::structure_to_text(&d)),
                ("alpha_s", s.to_string()),
                ("alpha_b", b.to_string()),
            ])
        });
    }
    // the equality witness: P facts exactly at distinct Mars and Venus
    let witness =
        crate::text::parse_structure("sig P/1 ; const mars=m, venus=v ;\nP(m)\nP(v)")
            .expect("witness structure parses");
    let s = count_homs(&alpha_s, &witness)?;
    let b = count_homs(&alpha_b, &witness)?;
    cases.check(
        s == Count::from(4u32) && b == Count::from(2u32),
        || show_case(&[("witness alpha_s", s.to_string()), ("witness alpha_b", b.to_string())]),
    );
    Ok(())
}

/// Transport of counterexamples through the CQ-vs-UCQ construction.
fn check_thm1_neg(cfg: &GenConfig, cases: &mut Cases) -> Result<(), HarnessError> {
    let mut rng = rng_for(cfg, "thm1-neg");
    for _ in 0..cfg.samples {
        let sig = random_base_sig(&mut rng, true);
        let opts = QueryGenOpts::default();
        let psi_s = random_cq(&mut rng, &sig, &opts);
        let psi_b = random_ucq(&mut rng, &sig, &opts);
        let mut violating = None;
        for _ in 0..40 {
            let d = random_structure(&mut rng, &sig, cfg.max_vertices, false);
            if apply(&Ucq::from_cq(psi_s.clone()), &d)? > apply(&psi_b, &d)? {
                violating = Some(d);
                break;
            }
        }
        let Some(d) = violating else { continue };
        let inst = build_thm1(&psi_s, &psi_b)?;
        let m = bagcq_core::transform::marsify(&d)?;
        let small = apply(&inst.qs, &m)?;
        let big = apply(&inst.qb, &m)?;
        cases.check(small > big, || {
            show_case(&[
                ("small query", psi_s.to_string()),
                ("big query", psi_b.to_string()),
                ("violating base structure", crate::text::structure_to_text(&d)),
                ("gamma_s on marsification", small.to_string()),
                ("gamma_b on marsification", big.to_string()),
            ])
        });
    }
    Ok(())
}

/// The polynomial-comparison instance is violated at the marsified
/// valuation structure, with the predicted counts.
fn check_thm2_neg(cfg: &GenConfig, cases: &mut Cases) -> Result<(), HarnessError> {
    let mut rng = rng_for(cfg, "thm2-neg");
    for _ in 0..cfg.samples {
        let nvars = rng.random_range(1..=3u32);
        let ps = random_polynomial(&mut rng, nvars, 4, 2);
        let pb = random_polynomial(&mut rng, nvars, 2, 2);
        let mut planted = None;
        for _ in 0..30 {
            let xi = random_valuation(&mut rng, nvars, 4);
            if ps.eval(&xi)? > n1() + pb.eval(&xi)? {
                planted = Some(xi);
                break;
            }
        }
        let Some(xi) = planted else { continue };
        let inst = build_thm2(&ps, &pb)?;
        let d = bagcq_core::transform::marsify(&bagcq_core::poly::structure_of_valuation(&xi)?)?;
        debug_assert!(instance_applies_to(&inst, &d));
        let small = apply(&inst.qs, &d)?;
        let big = apply(&inst.qb, &d)?;
        let ok = small == ps.eval(&xi)? && big == n1() + pb.eval(&xi)? && small > big;
        cases.check(ok, || {
            show_case(&[
                ("small polynomial", ps.to_string()),
                ("big polynomial", pb.to_string()),
                ("valuation", xi.to_string()),
                ("small count", small.to_string()),
                ("big count", big.to_string()),
            ])
        });
    }
    Ok(())
}

/// The scaled instance is violated at the marsified valuation structure;
/// counts match 1 + the padded polynomials' values. Big CQ-izations are
/// counted trip-wise; small ones are cross-checked against the engine.
fn check_thm3_neg(cfg: &GenConfig, cases: &mut Cases) -> Result<(), HarnessError> {
    let mut rng = rng_for(cfg, "thm3-neg");
    for i in 0..cfg.samples {
        let nvars = rng.random_range(1..=2u32);
        let ps0 = random_polynomial(&mut rng, nvars, 2, 2);
        let pb0 = random_polynomial(&mut rng, nvars, 2, 2);
        let mut planted = None;
        for _ in 0..30 {
            let xi = random_valuation(&mut rng, nvars, 4);
            if ps0.eval(&xi)? > pb0.eval(&xi)? {
                planted = Some(xi);
                break;
            }
        }
        let Some(xi) = planted else { continue };
        let eps = if i % 2 == 0 {
            Rational::one()
        } else {
            Rational::new(BigInt::from(1), BigInt::from(2))
        };
        let inst = build_thm3(&ps0, &pb0, &eps)?;
        let bagcq_core::reduce::Provenance::Theorem3 { c, cent, .. } = &inst.provenance else {
            unreachable!("theorem-3 provenance")
        };
        // reconstruct the padded pair exactly as the builder did
        let padded = pad_polynomials(&ps0, &pb0, c, cent)?;
        let (p_s, p_b) = (padded.p_s, padded.p_b);
        if p_b.len() > 120 {
            continue;
        }
        let d = bagcq_core::transform::marsify(&bagcq_core::poly::structure_of_valuation(&xi)?)?;
        let small = bagcq_core::transform::count_by_trips(&poly_to_ucq(&p_s)?, &d)?.total;
        let big = bagcq_core::transform::count_by_trips(&poly_to_ucq(&p_b)?, &d)?.total;
        let mut ok = small == n1() + p_s.eval(&xi)?
            && big == n1() + p_b.eval(&xi)?
            && c.clone() * rat(&small) > rat(&big);
        // cross-check the engine on manageable sizes
        if ok && p_b.len() <= 12 {
            ok = apply(&inst.qs, &d)? == small && apply(&inst.qb, &d)? == big;
        }
        cases.check(ok, || {
            show_case(&[
                ("small input", ps0.to_string()),
                ("big input", pb0.to_string()),
                ("valuation", xi.to_string()),
                ("epsilon", crate::text::rational_to_text(&eps)),
                ("small count", small.to_string()),
                ("big count", big.to_string()),
            ])
        });
    }
    Ok(())
}

/// A structure violating a containment instance, with the two counts.
#[derive(Debug, Clone)]
pub struct SearchHit {
    pub structure: Structure,
    pub small_count: Count,
    pub big_count: Count,
}

/// Scans the enumeration stream (or, when the fact space is too big, the
/// sample stream) for a structure where the scaled small count exceeds the
/// big count. Trivial structures are skipped for non-trivial-only
/// instances. Finding nothing proves nothing.
pub fn search_counterexample(
    inst: &ReductionInstance,
    cfg: &GenConfig,
) -> Result<Option<SearchHit>, HarnessError> {
    let sig = inst.qs.sig().clone();
    let gen_cfg = GenConfig {
        sig,
        ..cfg.clone()
    };
    let stream: Box<dyn Iterator<Item = Structure>> = match enumerate_structures(&gen_cfg) {
        Ok(e) => Box::new(e),
        Err(GenError::FactSpaceExceeded { .. }) => Box::new(sample_structures(&gen_cfg)?),
        Err(e) => return Err(e.into()),
    };
    for d in stream {
        if inst.mode == Mode::NonTrivialOnly && !instance_applies_to(inst, &d) {
            continue;
        }
        let outcome = check_scaled_containment_at(&inst.scale, &inst.qs, &inst.qb, &d)?;
        if !outcome.holds {
            // re-verify with the oracle when the enumeration is feasible
            let naive_feasible = inst
                .qs
                .disjuncts()
                .iter()
                .chain(inst.qb.disjuncts())
                .all(|q| q.var_set().len() <= 10);
            if naive_feasible {
                let mut s = Count::zero();
                for q in inst.qs.disjuncts() {
                    s += count_homs_naive(q, &d)?;
                }
                let mut b = Count::zero();
                for q in inst.qb.disjuncts() {
                    b += count_homs_naive(q, &d)?;
                }
                assert_eq!(s, outcome.small_count, "oracle disagrees on the small count");
                assert_eq!(b, outcome.big_count, "oracle disagrees on the big count");
            }
            return Ok(Some(SearchHit {
                structure: d,
                small_count: outcome.small_count,
                big_count: outcome.big_count,
            }));
        }
    }
    Ok(None)
}
