//! Exact computation with solid rings and the schemes they glue into.
//!
//! A commutative ring is *solid* when it admits at most one homomorphism
//! into any other commutative ring. Up to isomorphism these are the zero
//! ring, the cyclic rings Z/n, the localizations Z[J⁻¹] of the integers
//! at a set of primes J, products Z[J⁻¹] × Z/n with every prime of n
//! invertible on the left factor, and colimits of towers
//! Z[J_n⁻¹] × ∏_{q ∈ K_n} Z/q^{e_q} over growing finite K_n ⊆ K.
//! Their spectra are exactly the subterminal schemes: at most one point
//! per prime, each with stalk Q, Z_(p), or Z/p^e, plus an optional
//! generic point.
//!
//! The crate keeps everything symbolic and exact. Sets of primes live in
//! the finite/cofinite Boolean algebra ([`PrimeSet`]), spectra and their
//! topologies are decided from classification data ([`ClassificationData`]:
//! an exponent function, a generic-point flag, and an initial point
//! collection up to finite difference), and every derived decision
//! procedure is backed by a brute-force oracle over explicit finite ring
//! tables ([`FiniteRingTable`]) that counts homomorphisms by exhaustion.

pub mod primes;
pub mod solid;
pub mod spectrum;
pub mod scheme;
pub mod finring;
pub mod textio;
pub mod sample;
pub mod cli;

use std::fmt;

pub use primes::{factor, is_prime, Factorization, Prime, PrimeSet, SetKind};
pub use solid::{
    canonicalize, ring_hom_exists, tower_stage, RawSolidRing, SolidRing, TorsionExponents,
    TorsionFamily, TorsionMap,
};
pub use spectrum::{
    ascii_diagram, is_open_affine, spectrum_of, stalk_at, PointSet, SpecPoint, Spectrum, Stalk,
};
pub use scheme::{
    affine_union, scheme_hom_exists, symdiff_points, ClassificationData, Exponent, ExponentMap,
};
pub use finring::{
    count_homs, ft_cyclic, ft_polyquot, ft_product, hom_count_to_table, hom_exists_to_table,
    solidity_audit, AuditReport, AuditRow, FiniteRingTable, ORDER_BOUND,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("constraint violation: {0}")]
    Constraint(String),
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: u32, col: u32, msg: String },
    #[error("not a point of this spectrum: {0}")]
    NotAPoint(String),
    #[error("not a subset of the point set: {0}")]
    NotASubset(String),
    #[error("incompatible charts: prime {0} carries two different stalks")]
    IncompatibleCharts(u64),
    #[error("symmetric difference of the two charts is infinite")]
    LemmaViolation,
    #[error("ring axiom violated: {0}")]
    Axiom(String),
    #[error("ring order {0} exceeds the bound {1}")]
    SizeBound(usize, usize),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn constraint(msg: impl fmt::Display) -> Error {
        Error::Constraint(msg.to_string())
    }
}
