//! Seeded random generators for every domain value, used by property tests
//! and the solidity audit. All sampling is deterministic in the seed.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

use crate::primes::{Factorization, Prime, PrimeSet};
use crate::scheme::{ClassificationData, ExponentMap};
use crate::solid::{canonicalize, RawSolidRing, SolidRing};
use crate::spectrum::PointSet;

/// The primes sampling draws from.
pub const SMALL_PRIMES: [u64; 15] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn pick_primes<R: Rng>(rng: &mut R, max: usize) -> Vec<Prime> {
    let count = rng.gen_range(0..=max);
    SMALL_PRIMES
        .choose_multiple(rng, count)
        .map(|&n| Prime::new(n).unwrap())
        .collect()
}

pub fn prime_set<R: Rng>(rng: &mut R) -> PrimeSet {
    let basis = pick_primes(rng, 5);
    if rng.gen_bool(0.5) {
        PrimeSet::finite(basis)
    } else {
        PrimeSet::cofinite(basis)
    }
}

/// A random subset of `s`, finite or cofinite.
pub fn subset_of<R: Rng>(rng: &mut R, s: &PrimeSet) -> PrimeSet {
    s.intersect(&prime_set(rng))
}

fn factorization<R: Rng>(rng: &mut R, max_primes: usize) -> Factorization {
    let primes = pick_primes(rng, max_primes);
    Factorization::new(primes.into_iter().map(|p| (p, rng.gen_range(1..=3)))).unwrap()
}

/// A random solid ring of any of the five canonical shapes.
pub fn solid_ring<R: Rng>(rng: &mut R) -> SolidRing {
    match rng.gen_range(0..5) {
        0 => SolidRing::Zero,
        1 => {
            let f = factorization(rng, 3);
            if f.is_empty() {
                SolidRing::Zero
            } else {
                SolidRing::Cyclic(f)
            }
        }
        _ => symbolic_ring(rng),
    }
}

/// A random infinite solid ring: a localization, a product, or a tower.
pub fn symbolic_ring<R: Rng>(rng: &mut R) -> SolidRing {
    let raw = match rng.gen_range(0..3) {
        0 => RawSolidRing::Localized(prime_set(rng)),
        1 => {
            let inverted = prime_set(rng);
            let available: Vec<Prime> = inverted.iter_members().take(6).collect();
            let count = rng.gen_range(0..=available.len().min(3));
            let torsion = available
                .choose_multiple(rng, count)
                .map(|p| (p.get(), rng.gen_range(1..=3)))
                .collect();
            RawSolidRing::Product { inverted, torsion }
        }
        _ => {
            let inverted = PrimeSet::cofinite(pick_primes(rng, 3));
            // Drop a few members so K can sit strictly inside J.
            let dropped: Vec<Prime> = inverted
                .iter_members()
                .take(4)
                .filter(|_| rng.gen_bool(0.5))
                .collect();
            let support = inverted.difference(&PrimeSet::finite(dropped));
            let candidates: Vec<Prime> = support.iter_members().take(6).collect();
            let count = rng.gen_range(0..=2);
            let overrides = candidates
                .choose_multiple(rng, count)
                .map(|p| (p.get(), rng.gen_range(1..=4)))
                .collect();
            RawSolidRing::Tower {
                inverted,
                support,
                default_exp: rng.gen_range(1..=3),
                overrides,
            }
        }
    };
    canonicalize(raw).expect("sampled data satisfies the constraints")
}

/// Random classification data, affine or not.
pub fn classification_data<R: Rng>(rng: &mut R) -> ClassificationData {
    let inf = prime_set(rng);
    let has_generic = !inf.is_empty() || rng.gen_bool(0.5);
    let fin = prime_set(rng).difference(&inf);
    let candidates: Vec<Prime> = fin.iter_members().take(8).collect();
    let count = rng.gen_range(0..=candidates.len().min(3));
    let overrides: Vec<(Prime, u32)> = candidates
        .choose_multiple(rng, count)
        .map(|&p| (p, rng.gen_range(1..=3)))
        .collect();
    let exponents = ExponentMap::new(inf, fin, rng.gen_range(1..=3), overrides).unwrap();
    let closure = match rng.gen_range(0..3) {
        0 => exponents.support(),
        1 => subset_of(rng, &exponents.support()),
        _ => {
            // Almost all of the support: drop a few members.
            let dropped: Vec<Prime> = exponents
                .support()
                .iter_members()
                .take(3)
                .filter(|_| rng.gen_bool(0.5))
                .collect();
            exponents.support().difference(&PrimeSet::finite(dropped))
        }
    };
    ClassificationData::new(exponents, has_generic, closure).unwrap()
}

/// A random subset of the points of `d`, with no openness guarantee.
pub fn point_subset<R: Rng>(rng: &mut R, d: &ClassificationData) -> PointSet {
    let points = d.points();
    PointSet::new(
        points.generic() && rng.gen_bool(0.5),
        subset_of(rng, points.line()),
        subset_of(rng, points.torsion()),
    )
}

/// A random open subset of the points of `d`.
pub fn open_set<R: Rng>(rng: &mut R, d: &ClassificationData) -> PointSet {
    let points = d.points();
    if d.has_generic() && rng.gen_bool(0.6) {
        // Keep almost all of the closure set, then pad freely.
        let dropped: Vec<Prime> = d
            .closure()
            .iter_members()
            .take(3)
            .filter(|_| rng.gen_bool(0.4))
            .collect();
        let kept = d.closure().difference(&PrimeSet::finite(dropped));
        PointSet::new(
            true,
            kept.intersect(points.line()).union(&subset_of(rng, points.line())),
            kept.intersect(points.torsion()).union(&subset_of(rng, points.torsion())),
        )
    } else {
        PointSet::new(false, PrimeSet::empty(), subset_of(rng, points.torsion()))
    }
}

/// A random point set, unconstrained.
pub fn point_set<R: Rng>(rng: &mut R) -> PointSet {
    PointSet::new(rng.gen_bool(0.5), prime_set(rng), prime_set(rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_deterministic_in_the_seed() {
        let a: Vec<SolidRing> = {
            let mut r = rng(42);
            (0..20).map(|_| solid_ring(&mut r)).collect()
        };
        let b: Vec<SolidRing> = {
            let mut r = rng(42);
            (0..20).map(|_| solid_ring(&mut r)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn sampled_values_hit_every_ring_type() {
        let mut r = rng(1);
        let mut seen = [false; 5];
        for _ in 0..200 {
            let idx = match solid_ring(&mut r) {
                SolidRing::Zero => 0,
                SolidRing::Cyclic(_) => 1,
                SolidRing::Localized(_) => 2,
                SolidRing::Product { .. } => 3,
                SolidRing::Tower { .. } => 4,
            };
            seen[idx] = true;
        }
        assert_eq!(seen, [true; 5]);
    }

    #[test]
    fn sampled_open_sets_are_open() {
        let mut r = rng(9);
        for _ in 0..300 {
            let d = classification_data(&mut r);
            let u = open_set(&mut r, &d);
            assert!(d.is_open(&u).unwrap(), "{u:?} not open in {d:?}");
        }
    }

    #[test]
    fn sampled_subsets_are_subsets() {
        let mut r = rng(11);
        for _ in 0..300 {
            let d = classification_data(&mut r);
            let u = point_subset(&mut r, &d);
            assert!(u.is_subset_of(&d.points()));
        }
    }
}
