//! Classification data for subterminal schemes.
//!
//! A subterminal scheme is determined up to isomorphism by three pieces of
//! data: an exponent function on primes recording the stalk over each prime
//! (none, Z/p^k, or Z_(p)), a flag for the presence of a generic point with
//! stalk Q, and a closure set C telling which opens contain the generic
//! point (an open U with the generic point is one with C \ U finite). C is
//! only meaningful up to almost-equality, so values here carry one
//! representative and [`ClassificationData::iso`] compares classifications.

use std::collections::BTreeMap;

use crate::primes::{Prime, PrimeSet};
use crate::solid::{ring_with_spectrum, SolidRing, TorsionExponents, TorsionFamily, TorsionMap};
use crate::spectrum::{PointSet, SpecPoint, Stalk};
use crate::{Error, Result};

/// The stalk exponent over one prime: no point, a torsion point Z/p^k,
/// or a line point Z_(p). Ordered by divisibility of the stalks.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Exponent {
    Zero,
    Finite(u32),
    Infinite,
}

/// An eventually constant map from primes to exponents: Infinite on `inf`,
/// finite positive values on `fin`, Zero elsewhere. `inf` and `fin` are
/// disjoint, so at most one of them is cofinite and the map has a definite
/// tail value. The stored form is canonical, making equality pointwise:
/// with `fin` finite every exponent is an explicit entry, with `fin`
/// cofinite only deviations from the default are stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExponentMap {
    inf: PrimeSet,
    fin: PrimeSet,
    default_exp: u32,
    overrides: BTreeMap<Prime, u32>,
}

impl ExponentMap {
    pub fn new(
        inf: PrimeSet,
        fin: PrimeSet,
        default_exp: u32,
        overrides: impl IntoIterator<Item = (Prime, u32)>,
    ) -> Result<ExponentMap> {
        if let Some(p) = inf.intersect(&fin).smallest() {
            return Err(Error::constraint(format!("prime {p} has two different stalks")));
        }
        if default_exp == 0 {
            return Err(Error::constraint("the default exponent must be positive"));
        }
        let mut map = BTreeMap::new();
        for (p, e) in overrides {
            if e == 0 {
                return Err(Error::constraint(format!("exponent of {p} must be positive")));
            }
            if !fin.contains(p) {
                return Err(Error::constraint(format!(
                    "prime {p} has an exponent but no torsion point"
                )));
            }
            if map.insert(p, e).is_some() {
                return Err(Error::constraint(format!("prime {p} listed twice")));
            }
        }
        if fin.is_finite() {
            let map: BTreeMap<Prime, u32> = fin
                .iter_members()
                .map(|p| (p, map.get(&p).copied().unwrap_or(default_exp)))
                .collect();
            Ok(ExponentMap { inf, fin, default_exp: 1, overrides: map })
        } else {
            map.retain(|_, e| *e != default_exp);
            Ok(ExponentMap { inf, fin, default_exp, overrides: map })
        }
    }

    pub(crate) fn from_parts(line: PrimeSet, torsion: &TorsionExponents) -> Result<ExponentMap> {
        match torsion {
            TorsionExponents::Finite(m) => ExponentMap::new(line, m.support(), 1, m.iter()),
            TorsionExponents::Family(f) => {
                ExponentMap::new(line, f.support().clone(), f.default_exp(), f.overrides())
            }
        }
    }

    /// Primes with an infinite exponent (stalk Z_(p)).
    pub fn inf(&self) -> &PrimeSet {
        &self.inf
    }

    /// Primes with a finite positive exponent (stalk Z/p^e).
    pub fn fin(&self) -> &PrimeSet {
        &self.fin
    }

    pub fn default_exp(&self) -> u32 {
        self.default_exp
    }

    pub fn overrides(&self) -> impl Iterator<Item = (Prime, u32)> + '_ {
        self.overrides.iter().map(|(&p, &e)| (p, e))
    }

    pub fn exponent(&self, p: Prime) -> Exponent {
        if self.inf.contains(p) {
            Exponent::Infinite
        } else if self.fin.contains(p) {
            Exponent::Finite(self.overrides.get(&p).copied().unwrap_or(self.default_exp))
        } else {
            Exponent::Zero
        }
    }

    /// Primes with any point at all.
    pub fn support(&self) -> PrimeSet {
        self.inf.union(&self.fin)
    }

    /// The value at every sufficiently large prime.
    pub(crate) fn tail(&self) -> Exponent {
        if !self.inf.is_finite() {
            Exponent::Infinite
        } else if !self.fin.is_finite() {
            Exponent::Finite(self.default_exp)
        } else {
            Exponent::Zero
        }
    }

    /// Primes where the value can deviate from the tail.
    pub(crate) fn specials(&self) -> Vec<Prime> {
        let mut v: Vec<Prime> = self.overrides.keys().copied().collect();
        v.extend(self.inf.basis().iter().copied());
        v.extend(self.fin.basis().iter().copied());
        v.sort_unstable();
        v.dedup();
        v
    }

    pub(crate) fn to_torsion(&self) -> TorsionExponents {
        if self.fin.is_finite() {
            TorsionExponents::Finite(TorsionMap::new(self.overrides()).expect("canonical entries"))
        } else {
            TorsionExponents::Family(
                TorsionFamily::new(self.fin.clone(), self.default_exp, self.overrides())
                    .expect("canonical entries"),
            )
        }
    }

    /// First prime of `region` where the two maps disagree.
    fn mismatch_on(&self, other: &ExponentMap, region: &PrimeSet) -> Option<Prime> {
        let mut candidates = self.specials();
        candidates.extend(other.specials());
        candidates.extend(region.basis().iter().copied());
        candidates.sort_unstable();
        candidates.dedup();
        for p in candidates.iter().copied().filter(|&p| region.contains(p)) {
            if self.exponent(p) != other.exponent(p) {
                return Some(p);
            }
        }
        if !region.is_finite() && self.tail() != other.tail() {
            let bound = candidates.last().map(|p| p.get()).unwrap_or(1);
            return region.iter_members().find(|p| p.get() > bound);
        }
        None
    }
}

/// The full classification of a subterminal scheme. Structural equality
/// compares stored representatives; use [`ClassificationData::iso`] for
/// isomorphism of the schemes described.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClassificationData {
    exponents: ExponentMap,
    has_generic: bool,
    closure: PrimeSet,
}

impl ClassificationData {
    /// Validate and normalize. Without a generic point there can be no line
    /// points and the closure set is empty; with one, the closure set is cut
    /// down to the support.
    pub fn new(exponents: ExponentMap, has_generic: bool, closure: PrimeSet) -> Result<ClassificationData> {
        if !has_generic {
            if let Some(p) = exponents.inf.smallest() {
                return Err(Error::constraint(format!(
                    "a line point over {p} requires a generic point"
                )));
            }
            return Ok(ClassificationData { exponents, has_generic, closure: PrimeSet::empty() });
        }
        let closure = closure.intersect(&exponents.support());
        Ok(ClassificationData { exponents, has_generic, closure })
    }

    pub fn exponents(&self) -> &ExponentMap {
        &self.exponents
    }

    pub fn has_generic(&self) -> bool {
        self.has_generic
    }

    pub fn closure(&self) -> &PrimeSet {
        &self.closure
    }

    pub fn support(&self) -> PrimeSet {
        self.exponents.support()
    }

    /// All points of the scheme.
    pub fn points(&self) -> PointSet {
        PointSet::new(
            self.has_generic,
            self.exponents.inf.clone(),
            self.exponents.fin.clone(),
        )
    }

    pub fn stalk_at(&self, point: &SpecPoint) -> Result<Stalk> {
        let missing = || Error::NotAPoint(point.to_string());
        match *point {
            SpecPoint::Generic => {
                if self.has_generic {
                    Ok(Stalk::Rationals)
                } else {
                    Err(missing())
                }
            }
            SpecPoint::Line(p) => match self.exponents.exponent(p) {
                Exponent::Infinite => Ok(Stalk::LocalizedAt(p)),
                _ => Err(missing()),
            },
            SpecPoint::Torsion(p) => match self.exponents.exponent(p) {
                Exponent::Finite(e) => Ok(Stalk::Truncation(p, e)),
                _ => Err(missing()),
            },
        }
    }

    /// Whether `u`, a subset of the points, is open. Opens without the
    /// generic point are the torsion subsets; an open containing the generic
    /// point is one missing only finitely many closure primes.
    pub fn is_open(&self, u: &PointSet) -> Result<bool> {
        if let Some(witness) = u.subset_failure(&self.points()) {
            return Err(Error::NotASubset(witness));
        }
        if u.generic() {
            Ok(self.closure.difference(&u.primes()).is_finite())
        } else {
            Ok(u.line().is_empty())
        }
    }

    /// Isomorphism of the described schemes: equal exponents and generic
    /// flag, almost-equal closure sets.
    pub fn iso(&self, other: &ClassificationData) -> bool {
        self.exponents == other.exponents
            && self.has_generic == other.has_generic
            && self.closure.almost_equal(&other.closure)
    }

    /// The solid ring whose spectrum this is, when the scheme is affine:
    /// without a generic point that needs finitely many points, with one it
    /// needs the closure set to be almost all of the support.
    pub fn affine_ring(&self) -> Result<Option<SolidRing>> {
        let affine = if self.has_generic {
            self.closure.almost_equal(&self.support())
        } else {
            self.exponents.fin.is_finite()
        };
        if !affine {
            return Ok(None);
        }
        ring_with_spectrum(
            self.has_generic,
            &self.exponents.inf,
            &self.exponents.to_torsion(),
        )
        .map(Some)
    }

    /// The affine chart on an open subset `u`, or None when the chart is
    /// not affine.
    pub fn chart_ring(&self, u: &PointSet) -> Result<Option<SolidRing>> {
        if !self.is_open(u)? {
            return Err(Error::constraint("the chart set is not open"));
        }
        let affine = if u.generic() {
            // The chart's closure set is C ∩ u up to finitely many points,
            // so it is affine exactly when u \ C is finite.
            u.primes().difference(&self.closure).is_finite()
        } else {
            u.torsion().is_finite()
        };
        if !affine {
            return Ok(None);
        }
        let torsion = self.exponents.to_torsion().restrict(u.torsion());
        ring_with_spectrum(u.generic(), u.line(), &torsion).map(Some)
    }

    /// An exhausting tower of affine open charts: stage 0 is the smallest
    /// natural affine open (the generic point with its closure set, or the
    /// first torsion point), and each later stage adds the next prime of the
    /// support. Stops early once every point is covered. Returns each
    /// stage's point set together with its chart ring.
    pub fn tower(&self, n: usize) -> Result<Vec<(PointSet, SolidRing)>> {
        let base = if self.has_generic {
            PointSet::new(
                true,
                self.exponents.inf.intersect(&self.closure),
                self.exponents.fin.intersect(&self.closure),
            )
        } else {
            match self.support().smallest() {
                None => PointSet::empty(),
                Some(p) => PointSet::new(false, PrimeSet::empty(), PrimeSet::finite([p])),
            }
        };
        let rest = self.support().difference(&base.primes());
        let mut stages = Vec::new();
        let mut added: Vec<Prime> = Vec::new();
        let mut pending = rest.iter_members();
        for _ in 0..=n {
            let extra = PrimeSet::finite(added.iter().copied());
            let points = PointSet::new(
                base.generic(),
                base.line().union(&extra.intersect(&self.exponents.inf)),
                base.torsion().union(&extra.intersect(&self.exponents.fin)),
            );
            let torsion = self.exponents.to_torsion().restrict(points.torsion());
            let ring = ring_with_spectrum(points.generic(), points.line(), &torsion)?;
            stages.push((points, ring));
            match pending.next() {
                Some(p) => added.push(p),
                None => break,
            }
        }
        Ok(stages)
    }
}

/// Whether a (necessarily unique) scheme morphism `x -> s` exists:
/// a generic point must land on a generic point, line points need line
/// points over the same primes, torsion points need at least their exponent
/// on the target side, and continuity at the generic point needs the target
/// closure set to cover almost all of the source one.
pub fn scheme_hom_exists(x: &ClassificationData, s: &ClassificationData) -> bool {
    if x.has_generic && !s.has_generic {
        return false;
    }
    if !x.exponents.inf.is_subset_of(&s.exponents.inf) {
        return false;
    }
    let torsion_ok = {
        let xe = &x.exponents;
        let se = &s.exponents;
        if xe.fin.is_finite() {
            xe.fin
                .iter_members()
                .all(|p| se.exponent(p) >= xe.exponent(p))
        } else {
            let mut candidates = xe.specials();
            candidates.extend(se.specials());
            candidates.sort_unstable();
            candidates.dedup();
            candidates
                .into_iter()
                .filter(|&p| xe.fin.contains(p))
                .all(|p| se.exponent(p) >= xe.exponent(p))
                && se.tail() >= Exponent::Finite(xe.default_exp)
        }
    };
    if !torsion_ok {
        return false;
    }
    if x.has_generic && !x.closure.difference(&s.closure).is_finite() {
        return false;
    }
    true
}

/// The set of points where the two charts differ, assuming they sit in a
/// common scheme. Shared primes must carry identical stalks. When both
/// charts contain the generic point, their difference must be finite:
/// every affine open around the generic point is the generic point plus
/// almost exactly the closure set.
pub fn symdiff_points(a: &ClassificationData, b: &ClassificationData) -> Result<PointSet> {
    let shared = a.support().intersect(&b.support());
    if let Some(p) = a.exponents.mismatch_on(&b.exponents, &shared) {
        return Err(Error::IncompatibleCharts(p.get()));
    }
    let line = a.exponents.inf.symmetric_difference(&b.exponents.inf);
    let torsion = a.exponents.fin.symmetric_difference(&b.exponents.fin);
    if a.has_generic && b.has_generic && !(line.is_finite() && torsion.is_finite()) {
        return Err(Error::LemmaViolation);
    }
    Ok(PointSet::new(a.has_generic != b.has_generic, line, torsion))
}

/// The union of two affine charts of a common scheme, which is affine
/// again: the line parts and torsion exponents merge, and the result's
/// closure set is its whole support.
pub fn affine_union(a: &SolidRing, b: &SolidRing) -> Result<SolidRing> {
    let da = a.classification_data();
    let db = b.classification_data();
    symdiff_points(&da, &db)?;
    let line = da.exponents.inf.union(&db.exponents.inf);
    let torsion = da.exponents.to_torsion().merge_union(&db.exponents.to_torsion());
    ring_with_spectrum(da.has_generic || db.has_generic, &line, &torsion)
}
