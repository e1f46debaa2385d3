//! Monomials, polynomials (multisets of unit-coefficient monomials),
//! valuations, and their encodings as unary queries and structures.
//!
//! A monomial of degree d over numerical variables becomes a CQ of d unary
//! atoms on fresh variables; a polynomial becomes the union over its
//! monomial occurrences; a valuation becomes a structure with the prescribed
//! relation cardinalities. The padding reduction rewrites a polynomial pair
//! so that a fixed coefficient ratio holds while preserving, for every
//! valuation, which side is larger.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::eval::{seen, Count, EvalError, Rational};
use crate::query::{Atom, Cq, QueryError, Term, Ucq};
use crate::sig::{SigError, Signature};
use crate::structure::{Fact, Structure, StructureError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("monomial variable indices must be >= 1")]
    ZeroIndex,
    #[error("variable index {index} out of range (nvars = {nvars})")]
    IndexOutOfRange { index: u32, nvars: u32 },
    #[error("polynomial must be nonempty")]
    EmptyPolynomial,
    #[error("structure is not over a unary X1..Xn signature")]
    NotUnarySignature,
    #[error("padding requires 1 < cent < c <= 2 and cent^2 >= c")]
    BadScalingConstants,
    #[error("padding blow-up exceeds cap ({0} occurrences)")]
    PadTooLarge(String),
    #[error(transparent)]
    Sig(#[from] SigError),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A coefficient-1 monomial: a multiset of variable indices, canonically
/// sorted. The empty multiset is the constant 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(mut indices: Vec<u32>) -> Result<Monomial, PolyError> {
        if indices.contains(&0) {
            return Err(PolyError::ZeroIndex);
        }
        indices.sort_unstable();
        Ok(Monomial(indices))
    }

    /// The degree-0 monomial (the constant 1).
    pub fn constant() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    pub fn max_index(&self) -> u32 {
        self.0.last().copied().unwrap_or(0)
    }

    /// `M(Ξ)`: the product of the valuation's values over the multiset.
    pub fn eval(&self, xi: &Valuation) -> Result<Count, PolyError> {
        let mut out = Count::one();
        for &i in &self.0 {
            out *= xi.value(i)?;
        }
        Ok(out)
    }
}

impl core::fmt::Display for Monomial {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            write!(f, "x{i}")?;
        }
        Ok(())
    }
}

/// A sum of monomials; duplicate occurrences are kept and meaningful.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    nvars: u32,
    monomials: Vec<Monomial>,
}

impl Polynomial {
    /// `nvars` must cover every index used.
    pub fn new(nvars: u32, monomials: Vec<Monomial>) -> Result<Polynomial, PolyError> {
        for m in &monomials {
            if m.max_index() > nvars {
                return Err(PolyError::IndexOutOfRange { index: m.max_index(), nvars });
            }
        }
        Ok(Polynomial { nvars, monomials })
    }

    pub fn nvars(&self) -> u32 {
        self.nvars
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Same polynomial re-declared over at least as many variables.
    pub fn widen(&self, nvars: u32) -> Result<Polynomial, PolyError> {
        Polynomial::new(nvars.max(self.nvars), self.monomials.clone())
    }

    /// The distinct monomials occurring here.
    pub fn support(&self) -> BTreeSet<Monomial> {
        self.monomials.iter().cloned().collect()
    }

    /// `P(Ξ)`: the sum over monomial occurrences.
    pub fn eval(&self, xi: &Valuation) -> Result<Count, PolyError> {
        let mut out = Count::zero();
        for m in &self.monomials {
            out += m.eval(xi)?;
        }
        Ok(out)
    }
}

impl core::fmt::Display for Polynomial {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.monomials.is_empty() {
            return write!(f, "0");
        }
        for (k, m) in self.monomials.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

/// The number of occurrences of `m` in `p`.
pub fn coef(m: &Monomial, p: &Polynomial) -> Count {
    Count::from(p.monomials.iter().filter(|x| *x == m).count())
}

/// A total valuation of the numerical variables `x1..xn`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation(Vec<Count>);

impl Valuation {
    pub fn new(values: Vec<Count>) -> Valuation {
        Valuation(values)
    }

    pub fn from_u32(values: &[u32]) -> Valuation {
        Valuation(values.iter().map(|&v| Count::from(v)).collect())
    }

    pub fn nvars(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn values(&self) -> &[Count] {
        &self.0
    }

    pub fn value(&self, index: u32) -> Result<&Count, PolyError> {
        if index == 0 {
            return Err(PolyError::ZeroIndex);
        }
        self.0
            .get((index - 1) as usize)
            .ok_or(PolyError::IndexOutOfRange { index, nvars: self.nvars() })
    }
}

impl core::fmt::Display for Valuation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "x{}={}", i + 1, v)?;
        }
        Ok(())
    }
}

/// The unary signature `{X1/1, .., Xn/1}` with no constants.
pub fn unary_sig(nvars: u32) -> Signature {
    Signature::new(
        (1..=nvars).map(|i| (format!("X{i}"), 1usize)),
        core::iter::empty(),
    )
    .expect("unary signature is well-formed")
}

/// `μ(M)`: one unary atom per occurrence, each on a fresh variable; the
/// degree-0 monomial yields the empty CQ.
pub fn mono_to_cq(m: &Monomial, nvars: u32) -> Result<Cq, PolyError> {
    if m.max_index() > nvars {
        return Err(PolyError::IndexOutOfRange { index: m.max_index(), nvars });
    }
    let sig = unary_sig(nvars);
    let atoms = m
        .indices()
        .iter()
        .enumerate()
        .map(|(k, i)| Atom::rel(&format!("X{i}"), alloc::vec![Term::var(&format!("_w{}", k + 1))]))
        .collect();
    Ok(Cq::new(sig, atoms)?)
}

/// `ucq(P)`: one disjunct per monomial occurrence.
pub fn poly_to_ucq(p: &Polynomial) -> Result<Ucq, PolyError> {
    if p.is_empty() {
        return Err(PolyError::EmptyPolynomial);
    }
    let disjuncts = p
        .monomials
        .iter()
        .map(|m| mono_to_cq(m, p.nvars))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Ucq::new(disjuncts)?)
}

/// `D_Ξ`: for each variable, exactly its value's worth of fresh witness
/// vertices, pairwise disjoint across variables.
pub fn structure_of_valuation(xi: &Valuation) -> Result<Structure, PolyError> {
    let sig = unary_sig(xi.nvars());
    let mut facts = Vec::new();
    for (i, v) in xi.values().iter().enumerate() {
        let n = i as u32 + 1;
        let mut k = Count::zero();
        let mut ordinal = 1u64;
        while &k < v {
            facts.push(Fact {
                rel: format!("X{n}"),
                args: alloc::vec![format!("x{n}_{ordinal}")],
            });
            k += Count::one();
            ordinal += 1;
        }
    }
    Ok(Structure::new(sig, Vec::new(), facts, BTreeMap::new())?)
}

/// `Ξ_D`: reads the relation cardinalities of a structure over a unary
/// `X1..Xn` signature.
pub fn valuation_of_structure(d: &Structure) -> Result<Valuation, PolyError> {
    let n = d.sig().relations().count() as u32;
    let expected = unary_sig(n);
    if *d.sig() != expected {
        return Err(PolyError::NotUnarySignature);
    }
    let mut values = Vec::with_capacity(n as usize);
    for i in 1..=n {
        let rel = format!("X{i}");
        values.push(Count::from(d.facts_of(&rel).count()));
    }
    Ok(Valuation(values))
}

/// `Ξ^p`: the valuation read off the part of the universe seen from planet
/// `p` of a structure over the extended unary signature.
pub fn local_valuation(p: &str, d: &Structure) -> Result<Valuation, PolyError> {
    let view = seen(p, d)?;
    valuation_of_structure(&view)
}

/// Result of the coefficient-padding reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaddedPair {
    pub p_s: Polynomial,
    pub p_b: Polynomial,
    /// The padding multiplicity chosen (minimal valid).
    pub u: Count,
}

/// Checks `cent * Coef(M, ps) <= Coef(M, pb)` for every monomial.
pub fn coef_condition_holds(cent: &Rational, ps: &Polynomial, pb: &Polynomial) -> bool {
    let mut support = ps.support();
    support.extend(pb.support());
    support.iter().all(|m| {
        let cs = Rational::from_integer(BigInt::from(coef(m, ps)));
        let cb = Rational::from_integer(BigInt::from(coef(m, pb)));
        cent * cs <= cb
    })
}

const PAD_OCCURRENCE_CAP: u64 = 2_000_000;

/// The coefficient-padding reduction. Given input polynomials and rationals
/// `1 < cent < c <= 2` with `cent² >= c`, produces `(P_s, P_b)` such that
///
/// * `cent · Coef(M, P_s) <= Coef(M, P_b)` for every monomial `M`, and
/// * for every valuation `Ξ`:
///   `ps0(Ξ) <= pb0(Ξ)  ⟺  c · (1 + P_s(Ξ)) <= 1 + P_b(Ξ)`.
///
/// Construction: add one degree-0 occurrence to both inputs (preserving the
/// comparison), pad both sides with the minimal multiplicity `u` of the
/// s-side's monomials making every coefficient ratio at least `cent/c`,
/// scale the s-side by c's denominator and the b-side by c's numerator, and
/// finally drop one degree-0 occurrence from each side.
pub fn pad_polynomials(
    ps0: &Polynomial,
    pb0: &Polynomial,
    c: &Rational,
    cent: &Rational,
) -> Result<PaddedPair, PolyError> {
    let one = Rational::one();
    let two = Rational::from_integer(BigInt::from(2));
    if !(cent > &one && cent < c && c <= &two && &(cent * cent) >= c) {
        return Err(PolyError::BadScalingConstants);
    }
    let nvars = ps0.nvars.max(pb0.nvars);
    let mut ws = ps0.monomials.clone();
    ws.push(Monomial::constant());
    let mut wb = pb0.monomials.clone();
    wb.push(Monomial::constant());

    let occurrences = |m: &Monomial, v: &[Monomial]| -> BigInt {
        BigInt::from(v.iter().filter(|x| *x == m).count())
    };

    // minimal u with cent * (Coef(M, ws) + u) <= c * (Coef(M, wb) + u)
    // for every monomial M of ws
    let support: BTreeSet<Monomial> = ws.iter().cloned().collect();
    let mut u = BigInt::zero();
    for m in &support {
        let ys = occurrences(m, &ws);
        let xb = occurrences(m, &wb);
        let num = cent * Rational::from_integer(ys) - c * Rational::from_integer(xb);
        if num.is_positive() {
            let need = num / (c - cent);
            let candidate = need.numer().div_ceil(need.denom());
            if candidate > u {
                u = candidate;
            }
        }
    }
    let u_small = u
        .to_u64()
        .filter(|&v| v <= PAD_OCCURRENCE_CAP)
        .ok_or_else(|| PolyError::PadTooLarge(u.to_string()))? as usize;

    let mut p1s = ws;
    let mut p1b = wb;
    for m in &support {
        for _ in 0..u_small {
            p1s.push(m.clone());
            p1b.push(m.clone());
        }
    }

    let scale = |v: &[Monomial], by: &BigInt| -> Result<Vec<Monomial>, PolyError> {
        let by = by
            .to_u64()
            .filter(|&b| b > 0 && b.saturating_mul(v.len() as u64) <= PAD_OCCURRENCE_CAP)
            .ok_or_else(|| PolyError::PadTooLarge(by.to_string()))?;
        let mut out = Vec::with_capacity(v.len() * by as usize);
        for _ in 0..by {
            out.extend(v.iter().cloned());
        }
        Ok(out)
    };
    // c = cN / cD reduced; the s-side scales by cD, the b-side by cN, so
    // c * P2s(Ξ) <= P2b(Ξ) iff P1s(Ξ) <= P1b(Ξ) and every coefficient ratio
    // gains a factor of c, lifting cent/c to cent.
    let mut p2s = scale(&p1s, c.denom())?;
    let mut p2b = scale(&p1b, c.numer())?;

    let drop_constant = |v: &mut Vec<Monomial>| {
        let pos = v
            .iter()
            .position(|m| m.degree() == 0)
            .expect("a degree-0 occurrence was added up front");
        v.remove(pos);
    };
    drop_constant(&mut p2s);
    drop_constant(&mut p2b);

    let p_s = Polynomial::new(nvars, p2s)?;
    let p_b = Polynomial::new(nvars, p2b)?;
    debug_assert!(coef_condition_holds(cent, &p_s, &p_b));
    Ok(PaddedPair {
        p_s,
        p_b,
        u: u.to_biguint().expect("u is nonnegative"),
    })
}

/// Smallest-denominator rational in `[√c, c)` via a Stern–Brocot mediant
/// walk; membership tests are exact (`q ≥ √c ⟺ q² ≥ c` for positive `q`).
pub fn pick_cent(c: &Rational) -> Result<Rational, PolyError> {
    let one = Rational::one();
    if c <= &one {
        return Err(PolyError::BadScalingConstants);
    }
    let mut lo = (BigInt::zero(), BigInt::one());
    let mut hi = (BigInt::one(), BigInt::zero());
    loop {
        let med = (&lo.0 + &hi.0, &lo.1 + &hi.1);
        let q = Rational::new(med.0.clone(), med.1.clone());
        if &(&q * &q) < c {
            lo = med; // too small: below √c
        } else if &q >= c {
            hi = med; // too large
        } else {
            return Ok(q);
        }
    }
}
