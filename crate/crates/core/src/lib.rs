//! Exact bag-semantics evaluation of conjunctive queries (CQs) and unions
//! thereof (UCQs), together with the Venus/Mars transformation toolkit:
//! relativization, CQ-ization, marsification, polynomial encodings and the
//! reduction constructors built on top of them.
//!
//! A Boolean CQ applied to a finite structure returns the number of
//! homomorphisms from its canonical structure into the target; a UCQ returns
//! the sum over its disjuncts. All counting is exact (arbitrary precision),
//! all comparisons are exact rationals; there is no floating point anywhere.
//!
//! The crate is `no_std` + `alloc`: every value is immutable after
//! construction and freely shareable across threads.

#![no_std]

extern crate alloc;

pub mod eval;
pub mod poly;
pub mod query;
pub mod reduce;
pub mod sig;
pub mod structure;
pub mod transform;

pub use eval::{apply, count_homs, count_homs_naive, Count, Rational};
pub use query::{Atom, Cq, Term, Ucq};
pub use sig::Signature;
pub use structure::{Structure, StructureFlags};
