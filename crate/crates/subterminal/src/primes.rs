//! Primes, factorizations, and the finite/cofinite algebra of prime sets.
//!
//! Every set of primes handled by this crate is either finite or cofinite,
//! stored as a kind tag plus a strictly increasing basis vector (the members
//! for a finite set, the non-members for a cofinite one). This fragment is a
//! Boolean subalgebra: all five set operations stay inside it, so equality,
//! membership, finiteness, and "equal up to a finite set" are all decidable
//! by basis merges. Arbitrary sets of primes are not representable; the
//! cofinite half is what the tower constructions and line-point sets need.

use std::collections::BTreeMap;
use std::fmt;

use crate::{Error, Result};

/// A checked prime number.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u64);

impl Prime {
    pub fn new(n: u64) -> Result<Prime> {
        if is_prime(n) {
            Ok(Prime(n))
        } else {
            Err(Error::NotPrime(n))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Deterministic trial division; inputs here are desk-scale.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    if n % 3 == 0 {
        return n == 3;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// Ascending iterator over all primes, starting at 2.
pub fn primes() -> impl Iterator<Item = Prime> {
    (2u64..).filter(|&n| is_prime(n)).map(Prime)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum SetKind {
    Finite,
    Cofinite,
}

/// A finite or cofinite set of primes.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PrimeSet {
    kind: SetKind,
    basis: Vec<Prime>,
}

impl fmt::Debug for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.kind == SetKind::Cofinite {
            f.write_str("P")?;
            if self.basis.is_empty() {
                return Ok(());
            }
            f.write_str("\\")?;
        }
        f.write_str("{")?;
        for (i, p) in self.basis.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

impl PrimeSet {
    pub fn empty() -> PrimeSet {
        PrimeSet { kind: SetKind::Finite, basis: Vec::new() }
    }

    /// The set of all primes.
    pub fn all() -> PrimeSet {
        PrimeSet { kind: SetKind::Cofinite, basis: Vec::new() }
    }

    pub fn finite(members: impl IntoIterator<Item = Prime>) -> PrimeSet {
        PrimeSet { kind: SetKind::Finite, basis: sorted_basis(members) }
    }

    pub fn cofinite(non_members: impl IntoIterator<Item = Prime>) -> PrimeSet {
        PrimeSet { kind: SetKind::Cofinite, basis: sorted_basis(non_members) }
    }

    pub fn kind(&self) -> SetKind {
        self.kind
    }

    /// Members for a finite set, non-members for a cofinite one.
    pub fn basis(&self) -> &[Prime] {
        &self.basis
    }

    pub fn is_finite(&self) -> bool {
        self.kind == SetKind::Finite
    }

    pub fn is_empty(&self) -> bool {
        self.kind == SetKind::Finite && self.basis.is_empty()
    }

    pub fn is_all(&self) -> bool {
        self.kind == SetKind::Cofinite && self.basis.is_empty()
    }

    pub fn len_if_finite(&self) -> Option<usize> {
        match self.kind {
            SetKind::Finite => Some(self.basis.len()),
            SetKind::Cofinite => None,
        }
    }

    pub fn contains(&self, p: Prime) -> bool {
        let in_basis = self.basis.binary_search(&p).is_ok();
        match self.kind {
            SetKind::Finite => in_basis,
            SetKind::Cofinite => !in_basis,
        }
    }

    pub fn complement(&self) -> PrimeSet {
        PrimeSet {
            kind: match self.kind {
                SetKind::Finite => SetKind::Cofinite,
                SetKind::Cofinite => SetKind::Finite,
            },
            basis: self.basis.clone(),
        }
    }

    pub fn union(&self, other: &PrimeSet) -> PrimeSet {
        use SetKind::*;
        match (self.kind, other.kind) {
            (Finite, Finite) => PrimeSet { kind: Finite, basis: merge_union(&self.basis, &other.basis) },
            (Finite, Cofinite) => PrimeSet { kind: Cofinite, basis: merge_diff(&other.basis, &self.basis) },
            (Cofinite, Finite) => PrimeSet { kind: Cofinite, basis: merge_diff(&self.basis, &other.basis) },
            (Cofinite, Cofinite) => PrimeSet { kind: Cofinite, basis: merge_intersect(&self.basis, &other.basis) },
        }
    }

    pub fn intersect(&self, other: &PrimeSet) -> PrimeSet {
        use SetKind::*;
        match (self.kind, other.kind) {
            (Finite, Finite) => PrimeSet { kind: Finite, basis: merge_intersect(&self.basis, &other.basis) },
            (Finite, Cofinite) => PrimeSet { kind: Finite, basis: merge_diff(&self.basis, &other.basis) },
            (Cofinite, Finite) => PrimeSet { kind: Finite, basis: merge_diff(&other.basis, &self.basis) },
            (Cofinite, Cofinite) => PrimeSet { kind: Cofinite, basis: merge_union(&self.basis, &other.basis) },
        }
    }

    pub fn difference(&self, other: &PrimeSet) -> PrimeSet {
        self.intersect(&other.complement())
    }

    pub fn symmetric_difference(&self, other: &PrimeSet) -> PrimeSet {
        self.difference(other).union(&other.difference(self))
    }

    /// Exact containment: self \ other is empty.
    pub fn is_subset_of(&self, other: &PrimeSet) -> bool {
        self.difference(other).is_empty()
    }

    /// self \ other is finite.
    pub fn almost_subset(&self, other: &PrimeSet) -> bool {
        self.difference(other).is_finite()
    }

    /// The symmetric difference is finite.
    pub fn almost_equal(&self, other: &PrimeSet) -> bool {
        self.symmetric_difference(other).is_finite()
    }

    /// Ascending members; infinite for a cofinite set, so take what you need.
    pub fn iter_members(&self) -> Members<'_> {
        Members { set: self, finite_pos: 0, next_candidate: 2 }
    }

    pub fn members_below(&self, bound: u64) -> Vec<Prime> {
        self.iter_members().take_while(|p| p.get() < bound).collect()
    }

    pub fn smallest(&self) -> Option<Prime> {
        self.iter_members().next()
    }
}

pub struct Members<'a> {
    set: &'a PrimeSet,
    finite_pos: usize,
    next_candidate: u64,
}

impl Iterator for Members<'_> {
    type Item = Prime;

    fn next(&mut self) -> Option<Prime> {
        match self.set.kind {
            SetKind::Finite => {
                let p = self.set.basis.get(self.finite_pos).copied();
                self.finite_pos += 1;
                p
            }
            SetKind::Cofinite => loop {
                let n = self.next_candidate;
                self.next_candidate += 1;
                if is_prime(n) {
                    let p = Prime(n);
                    if self.set.contains(p) {
                        return Some(p);
                    }
                }
            },
        }
    }
}

fn sorted_basis(iter: impl IntoIterator<Item = Prime>) -> Vec<Prime> {
    let mut v: Vec<Prime> = iter.into_iter().collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn merge_union(a: &[Prime], b: &[Prime]) -> Vec<Prime> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn merge_intersect(a: &[Prime], b: &[Prime]) -> Vec<Prime> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn merge_diff(a: &[Prime], b: &[Prime]) -> Vec<Prime> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() {
        if j >= b.len() || a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else if a[i] == b[j] {
            i += 1;
            j += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// Prime factorization with positive exponents.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Factorization(BTreeMap<Prime, u32>);

impl Factorization {
    pub fn new(entries: impl IntoIterator<Item = (Prime, u32)>) -> Result<Factorization> {
        let mut map = BTreeMap::new();
        for (p, e) in entries {
            if e == 0 {
                return Err(Error::constraint(format!("exponent of {p} must be positive")));
            }
            if map.insert(p, e).is_some() {
                return Err(Error::constraint(format!("prime {p} listed twice")));
            }
        }
        Ok(Factorization(map))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Prime, u32)> + '_ {
        self.0.iter().map(|(&p, &e)| (p, e))
    }

    pub fn exponent(&self, p: Prime) -> Option<u32> {
        self.0.get(&p).copied()
    }

    pub fn support(&self) -> PrimeSet {
        PrimeSet::finite(self.0.keys().copied())
    }

    /// The factored integer; errors if it does not fit in u64.
    pub fn value(&self) -> Result<u64> {
        let mut n: u64 = 1;
        for (&p, &e) in &self.0 {
            for _ in 0..e {
                n = n
                    .checked_mul(p.get())
                    .ok_or_else(|| Error::constraint("modulus does not fit in 64 bits"))?;
            }
        }
        Ok(n)
    }

    pub(crate) fn remove_primes(&self, t: &PrimeSet) -> Factorization {
        Factorization(
            self.0
                .iter()
                .filter(|(p, _)| !t.contains(**p))
                .map(|(&p, &e)| (p, e))
                .collect(),
        )
    }
}

/// Factor a positive integer. 1 factors as the empty product.
pub fn factor(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::constraint("cannot factor 0"));
    }
    let mut map = BTreeMap::new();
    let mut m = n;
    let mut d = 2u64;
    while d.saturating_mul(d) <= m {
        if m % d == 0 {
            let mut e = 0u32;
            while m % d == 0 {
                m /= d;
                e += 1;
            }
            map.insert(Prime(d), e);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        map.insert(Prime(m), 1);
    }
    Ok(Factorization(map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    /// Independent universe: primes below a bound by sieve, with naive set
    /// semantics evaluated straight off the (kind, basis) data.
    fn sieve_below(bound: u64) -> Vec<u64> {
        let mut is_p = vec![true; bound as usize];
        for n in (2..bound).map(|n| n as usize) {
            if is_p[n] {
                let mut m = n * n;
                while m < bound as usize {
                    is_p[m] = false;
                    m += n;
                }
            }
        }
        (2..bound).filter(|&n| is_p[n as usize]).collect()
    }

    fn naive_members(s: &PrimeSet, universe: &[u64]) -> BTreeSet<u64> {
        universe
            .iter()
            .copied()
            .filter(|&n| {
                let in_basis = s.basis().iter().any(|q| q.get() == n);
                match s.kind() {
                    SetKind::Finite => in_basis,
                    SetKind::Cofinite => !in_basis,
                }
            })
            .collect()
    }

    #[test]
    fn primality_small() {
        let sieved = sieve_below(200);
        for n in 0..200u64 {
            assert_eq!(is_prime(n), sieved.contains(&n), "n = {n}");
        }
        assert!(Prime::new(4).is_err());
        assert!(Prime::new(1).is_err());
        assert!(Prime::new(97).is_ok());
    }

    #[test]
    fn factor_examples() {
        let f = factor(12).unwrap();
        assert_eq!(f.exponent(p(2)), Some(2));
        assert_eq!(f.exponent(p(3)), Some(1));
        assert_eq!(f.value().unwrap(), 12);
        assert!(factor(1).unwrap().is_empty());
        assert!(factor(0).is_err());
        let f = factor(360).unwrap();
        assert_eq!(
            f.iter().map(|(q, e)| (q.get(), e)).collect::<Vec<_>>(),
            vec![(2, 3), (3, 2), (5, 1)]
        );
    }

    #[test]
    fn symmetric_difference_of_cofinite_sets_is_finite() {
        // Expected value fixed by enumerating all primes below 100:
        // membership in C{2,3} xor C{3,5} holds exactly at 2 and 5.
        let s = PrimeSet::cofinite([p(2), p(3)]);
        let t = PrimeSet::cofinite([p(3), p(5)]);
        let universe = sieve_below(100);
        let expected: BTreeSet<u64> = naive_members(&s, &universe)
            .symmetric_difference(&naive_members(&t, &universe))
            .copied()
            .collect();
        assert_eq!(expected, BTreeSet::from([2, 5]));

        let d = s.symmetric_difference(&t);
        assert_eq!(d, PrimeSet::finite([p(2), p(5)]));
        assert!(d.is_finite());
    }

    #[test]
    fn almost_subset_cases() {
        let s = PrimeSet::cofinite([p(2)]);
        let t = PrimeSet::cofinite([p(3), p(5)]);
        // s \ t = {3,5} \ {2}, finite; checked against the enumerated universe.
        let universe = sieve_below(100);
        let diff: BTreeSet<u64> = naive_members(&s, &universe)
            .difference(&naive_members(&t, &universe))
            .copied()
            .collect();
        assert_eq!(diff, BTreeSet::from([3, 5]));
        assert!(s.almost_subset(&t));

        // A cofinite set is never almost inside a finite one.
        assert!(!PrimeSet::all().almost_subset(&PrimeSet::finite([p(2)])));
        // Finite sets are almost inside anything.
        assert!(PrimeSet::finite([p(2), p(7)]).almost_subset(&PrimeSet::empty()));
    }

    #[test]
    fn membership_iteration() {
        let s = PrimeSet::cofinite([p(3)]);
        let first: Vec<u64> = s.iter_members().take(4).map(Prime::get).collect();
        assert_eq!(first, vec![2, 5, 7, 11]);
        assert_eq!(s.smallest(), Some(p(2)));
        assert_eq!(PrimeSet::empty().smallest(), None);
        assert_eq!(
            PrimeSet::finite([p(5), p(2)]).members_below(4),
            vec![p(2)]
        );
    }

    prop_compose! {
        fn arb_primeset()(cof in any::<bool>(), picks in proptest::collection::vec(0usize..15, 0..5)) -> PrimeSet {
            const POOL: [u64; 15] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];
            let basis = picks.iter().map(|&i| Prime::new(POOL[i]).unwrap());
            if cof { PrimeSet::cofinite(basis) } else { PrimeSet::finite(basis) }
        }
    }

    proptest! {
        // Every operation agrees with naive element-wise evaluation over all
        // primes below 1000; the basis pool sits well inside the bound.
        #[test]
        fn ops_agree_with_enumeration(s in arb_primeset(), t in arb_primeset()) {
            let universe = sieve_below(1000);
            let ns = naive_members(&s, &universe);
            let nt = naive_members(&t, &universe);
            let pairs: [(PrimeSet, BTreeSet<u64>); 5] = [
                (s.union(&t), ns.union(&nt).copied().collect()),
                (s.intersect(&t), ns.intersection(&nt).copied().collect()),
                (s.complement(), universe.iter().copied().filter(|n| !ns.contains(n)).collect()),
                (s.difference(&t), ns.difference(&nt).copied().collect()),
                (s.symmetric_difference(&t), ns.symmetric_difference(&nt).copied().collect()),
            ];
            for (got, expected) in pairs {
                prop_assert_eq!(naive_members(&got, &universe), expected);
            }
        }

        #[test]
        fn algebra_laws(s in arb_primeset(), t in arb_primeset()) {
            prop_assert!(s.symmetric_difference(&s).is_empty());
            prop_assert_eq!(s.complement().complement(), s.clone());
            prop_assert_eq!(s.union(&t), t.union(&s));
            prop_assert_eq!(s.intersect(&t), t.intersect(&s));
            prop_assert_eq!(s.is_finite(), s.kind() == SetKind::Finite);
            // De Morgan inside the fragment.
            prop_assert_eq!(s.union(&t).complement(), s.complement().intersect(&t.complement()));
        }

        #[test]
        fn almost_equal_is_an_equivalence(s in arb_primeset(), t in arb_primeset(), u in arb_primeset()) {
            prop_assert!(s.almost_equal(&s));
            prop_assert_eq!(s.almost_equal(&t), t.almost_equal(&s));
            if s.almost_equal(&t) && t.almost_equal(&u) {
                prop_assert!(s.almost_equal(&u));
            }
            // Adding or removing finitely many primes never changes the class.
            let tweaked = s.union(&PrimeSet::finite([Prime::new(53).unwrap()]));
            prop_assert!(s.almost_equal(&tweaked));
        }

        #[test]
        fn basis_is_strictly_increasing(s in arb_primeset()) {
            prop_assert!(s.basis().windows(2).all(|w| w[0] < w[1]));
        }
    }
}
