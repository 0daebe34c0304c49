//! Canonical descriptions of solid rings.
//!
//! A solid ring admits at most one homomorphism into any commutative ring.
//! The canonical forms are: the zero ring, Z/n for n >= 2 (stored factored),
//! localizations Z[J^-1], products Z[J^-1] x Z/n whose torsion primes all lie
//! in J, and tower colimits over an infinite J with an infinite torsion
//! support K inside J and eventually constant exponents. [`canonicalize`]
//! folds raw descriptions (including products of descriptions) onto these
//! five shapes or reports why none fits.

use std::collections::BTreeMap;

use crate::primes::{Factorization, Prime, PrimeSet};
use crate::scheme::{scheme_hom_exists, ClassificationData, ExponentMap};
use crate::{factor, Error, Result};

/// Torsion exponents with finite support, one entry per prime.
pub type TorsionMap = Factorization;

/// Torsion exponents on an infinite (cofinite) support: a default exponent
/// plus finitely many overrides, so the family is eventually constant.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TorsionFamily {
    support: PrimeSet,
    default_exp: u32,
    overrides: BTreeMap<Prime, u32>,
}

impl TorsionFamily {
    pub fn new(
        support: PrimeSet,
        default_exp: u32,
        overrides: impl IntoIterator<Item = (Prime, u32)>,
    ) -> Result<TorsionFamily> {
        if support.is_finite() {
            return Err(Error::constraint("a torsion family needs an infinite support"));
        }
        if default_exp == 0 {
            return Err(Error::constraint("the default exponent must be positive"));
        }
        let mut map = BTreeMap::new();
        for (p, e) in overrides {
            if e == 0 {
                return Err(Error::constraint(format!("exponent of {p} must be positive")));
            }
            if !support.contains(p) {
                return Err(Error::constraint(format!(
                    "override prime {p} is outside the torsion support"
                )));
            }
            if map.insert(p, e).is_some() {
                return Err(Error::constraint(format!("prime {p} listed twice")));
            }
        }
        map.retain(|_, e| *e != default_exp);
        Ok(TorsionFamily { support, default_exp, overrides: map })
    }

    pub fn support(&self) -> &PrimeSet {
        &self.support
    }

    pub fn default_exp(&self) -> u32 {
        self.default_exp
    }

    pub fn overrides(&self) -> impl Iterator<Item = (Prime, u32)> + '_ {
        self.overrides.iter().map(|(&p, &e)| (p, e))
    }

    pub fn exponent(&self, p: Prime) -> Option<u32> {
        if !self.support.contains(p) {
            return None;
        }
        Some(self.overrides.get(&p).copied().unwrap_or(self.default_exp))
    }
}

/// Uniform view of a ring's torsion part, finite or eventually constant.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TorsionExponents {
    Finite(TorsionMap),
    Family(TorsionFamily),
}

impl TorsionExponents {
    pub fn none() -> TorsionExponents {
        TorsionExponents::Finite(TorsionMap::default())
    }

    pub fn support(&self) -> PrimeSet {
        match self {
            TorsionExponents::Finite(m) => m.support(),
            TorsionExponents::Family(f) => f.support.clone(),
        }
    }

    pub fn exponent(&self, p: Prime) -> Option<u32> {
        match self {
            TorsionExponents::Finite(m) => m.exponent(p),
            TorsionExponents::Family(f) => f.exponent(p),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, TorsionExponents::Finite(m) if m.is_empty())
    }

    /// Primes where the exponent can deviate from the tail behavior:
    /// explicit entries plus the support's basis.
    pub(crate) fn specials(&self) -> Vec<Prime> {
        let mut v: Vec<Prime> = match self {
            TorsionExponents::Finite(m) => m.iter().map(|(p, _)| p).collect(),
            TorsionExponents::Family(f) => f.overrides.keys().copied().collect(),
        };
        v.extend(self.support().basis().iter().copied());
        v.sort_unstable();
        v.dedup();
        v
    }

    /// The exponent at every sufficiently large prime (None when the support
    /// is finite, i.e. large primes carry no torsion point).
    pub(crate) fn tail_exponent(&self) -> Option<u32> {
        match self {
            TorsionExponents::Finite(_) => None,
            TorsionExponents::Family(f) => Some(f.default_exp),
        }
    }

    /// Restrict to `region`; the result's support is `support ∩ region`.
    pub(crate) fn restrict(&self, region: &PrimeSet) -> TorsionExponents {
        let support = self.support().intersect(region);
        if support.is_finite() {
            let entries: Vec<(Prime, u32)> = support
                .iter_members()
                .map(|p| (p, self.exponent(p).expect("member of restricted support")))
                .collect();
            TorsionExponents::Finite(
                TorsionMap::new(entries).expect("restriction keeps positive exponents"),
            )
        } else {
            let fam = match self {
                TorsionExponents::Family(f) => f,
                TorsionExponents::Finite(_) => unreachable!("finite support has no cofinite subset"),
            };
            TorsionExponents::Family(
                TorsionFamily::new(
                    support.clone(),
                    fam.default_exp,
                    fam.overrides
                        .iter()
                        .filter(|(p, _)| support.contains(**p))
                        .map(|(&p, &e)| (p, e)),
                )
                .expect("restriction of a valid family is valid"),
            )
        }
    }

    /// Merge two stalk-compatible torsion parts over the union of supports.
    pub(crate) fn merge_union(&self, other: &TorsionExponents) -> TorsionExponents {
        let support = self.support().union(&other.support());
        if support.is_finite() {
            let entries: Vec<(Prime, u32)> = support
                .iter_members()
                .map(|p| (p, self.exponent(p).or_else(|| other.exponent(p)).unwrap()))
                .collect();
            return TorsionExponents::Finite(TorsionMap::new(entries).unwrap());
        }
        let default_exp = self
            .tail_exponent()
            .or_else(|| other.tail_exponent())
            .expect("an infinite union has an infinite side");
        let mut candidates: Vec<Prime> = self.specials();
        candidates.extend(other.specials());
        candidates.sort_unstable();
        candidates.dedup();
        let overrides: Vec<(Prime, u32)> = candidates
            .into_iter()
            .filter(|&p| support.contains(p))
            .filter_map(|p| {
                let e = self.exponent(p).or_else(|| other.exponent(p)).unwrap();
                (e != default_exp).then_some((p, e))
            })
            .collect();
        TorsionExponents::Family(TorsionFamily::new(support, default_exp, overrides).unwrap())
    }
}

/// A solid ring in canonical form. Structural equality is ring isomorphism.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SolidRing {
    Zero,
    Cyclic(Factorization),
    Localized(PrimeSet),
    Product { inverted: PrimeSet, torsion: TorsionMap },
    Tower { inverted: PrimeSet, family: TorsionFamily },
}

/// An unnormalized description, as produced by parsing or by hand.
/// `PrimePower(p, e)` is the cyclic ring Z/p^e with the modulus kept in
/// factored form, for moduli too large to write as one integer.
#[derive(Clone, Debug)]
pub enum RawSolidRing {
    Zero,
    Cyclic(u64),
    PrimePower(u64, u32),
    Localized(PrimeSet),
    Product { inverted: PrimeSet, torsion: Vec<(u64, u32)> },
    Tower { inverted: PrimeSet, support: PrimeSet, default_exp: u32, overrides: Vec<(u64, u32)> },
    Times(Box<RawSolidRing>, Box<RawSolidRing>),
}

impl From<&SolidRing> for RawSolidRing {
    fn from(s: &SolidRing) -> RawSolidRing {
        match s {
            SolidRing::Zero => RawSolidRing::Zero,
            SolidRing::Cyclic(f) => match f.value() {
                Ok(n) => RawSolidRing::Cyclic(n),
                Err(_) => f
                    .iter()
                    .map(|(p, e)| RawSolidRing::PrimePower(p.get(), e))
                    .reduce(|a, b| RawSolidRing::Times(Box::new(a), Box::new(b)))
                    .expect("a modulus that overflows has factors"),
            },
            SolidRing::Localized(j) => RawSolidRing::Localized(j.clone()),
            SolidRing::Product { inverted, torsion } => RawSolidRing::Product {
                inverted: inverted.clone(),
                torsion: torsion.iter().map(|(p, e)| (p.get(), e)).collect(),
            },
            SolidRing::Tower { inverted, family } => RawSolidRing::Tower {
                inverted: inverted.clone(),
                support: family.support.clone(),
                default_exp: family.default_exp,
                overrides: family.overrides.iter().map(|(p, e)| (p.get(), *e)).collect(),
            },
        }
    }
}

/// Normalize a raw description to canonical form.
pub fn canonicalize(raw: RawSolidRing) -> Result<SolidRing> {
    match raw {
        RawSolidRing::Zero => Ok(SolidRing::Zero),
        RawSolidRing::Cyclic(0) => Err(Error::constraint("Z/0 is not a cyclic ring here; use Z")),
        RawSolidRing::Cyclic(1) => Ok(SolidRing::Zero),
        RawSolidRing::Cyclic(n) => Ok(SolidRing::Cyclic(factor(n)?)),
        RawSolidRing::PrimePower(p, e) => {
            let p = Prime::new(p)?;
            Ok(SolidRing::Cyclic(TorsionMap::new([(p, e)])?))
        }
        RawSolidRing::Localized(j) => Ok(SolidRing::Localized(j)),
        RawSolidRing::Product { inverted, torsion } => {
            let map = checked_torsion(torsion)?;
            make_product(inverted, map)
        }
        RawSolidRing::Tower { inverted, support, default_exp, overrides } => {
            if inverted.is_finite() {
                return Err(Error::constraint("a tower's inverted set must be infinite"));
            }
            let ov: Result<Vec<(Prime, u32)>> = overrides
                .into_iter()
                .map(|(p, e)| Prime::new(p).map(|p| (p, e)))
                .collect();
            let family = TorsionFamily::new(support, default_exp, ov?)?;
            make_tower(inverted, family)
        }
        RawSolidRing::Times(a, b) => merge_factors(canonicalize(*a)?, canonicalize(*b)?),
    }
}

fn checked_torsion(entries: Vec<(u64, u32)>) -> Result<TorsionMap> {
    let checked: Result<Vec<(Prime, u32)>> = entries
        .into_iter()
        .map(|(p, e)| Prime::new(p).map(|p| (p, e)))
        .collect();
    TorsionMap::new(checked?)
}

fn make_product(inverted: PrimeSet, torsion: TorsionMap) -> Result<SolidRing> {
    if torsion.is_empty() {
        return Ok(SolidRing::Localized(inverted));
    }
    if let Some(p) = torsion.iter().map(|(p, _)| p).find(|&p| !inverted.contains(p)) {
        return Err(Error::constraint(format!(
            "torsion prime {p} is not in the inverted set"
        )));
    }
    Ok(SolidRing::Product { inverted, torsion })
}

fn make_tower(inverted: PrimeSet, family: TorsionFamily) -> Result<SolidRing> {
    if inverted.is_finite() {
        return Err(Error::constraint("a tower's inverted set must be infinite"));
    }
    if !family.support.is_subset_of(&inverted) {
        let witness = family
            .support
            .difference(&inverted)
            .smallest()
            .expect("nonempty difference");
        return Err(Error::constraint(format!(
            "torsion prime {witness} is not in the inverted set"
        )));
    }
    Ok(SolidRing::Tower { inverted, family })
}

/// Product of two canonical descriptions, renormalized. The zero ring is
/// absorbed; cyclic factors combine by coprimality; at most one factor may
/// carry a generic point.
fn merge_factors(a: SolidRing, b: SolidRing) -> Result<SolidRing> {
    use SolidRing::*;
    match (a, b) {
        (Zero, x) | (x, Zero) => Ok(x),
        (Cyclic(f), Cyclic(g)) => Ok(Cyclic(merge_torsion(&f, &g)?)),
        (Cyclic(f), Localized(j)) | (Localized(j), Cyclic(f)) => make_product(j, f),
        (Cyclic(f), Product { inverted, torsion }) | (Product { inverted, torsion }, Cyclic(f)) => {
            make_product(inverted, merge_torsion(&torsion, &f)?)
        }
        (Cyclic(f), Tower { inverted, family }) | (Tower { inverted, family }, Cyclic(f)) => {
            let mut support = family.support.clone();
            let mut overrides: Vec<(Prime, u32)> =
                family.overrides.iter().map(|(&p, &e)| (p, e)).collect();
            for (p, e) in f.iter() {
                if support.contains(p) {
                    return Err(Error::constraint(format!("prime {p} occurs in two factors")));
                }
                support = support.union(&PrimeSet::finite([p]));
                overrides.push((p, e));
            }
            make_tower(inverted, TorsionFamily::new(support, family.default_exp, overrides)?)
        }
        _ => Err(Error::constraint(
            "two factors carry a generic point; the product is not solid",
        )),
    }
}

fn merge_torsion(f: &TorsionMap, g: &TorsionMap) -> Result<TorsionMap> {
    if let Some((p, _)) = g.iter().find(|(p, _)| f.exponent(*p).is_some()) {
        return Err(Error::constraint(format!("prime {p} occurs in two factors")));
    }
    TorsionMap::new(f.iter().chain(g.iter()))
}

impl SolidRing {
    pub fn has_generic_point(&self) -> bool {
        matches!(
            self,
            SolidRing::Localized(_) | SolidRing::Product { .. } | SolidRing::Tower { .. }
        )
    }

    /// The set inverted in the line part, when there is one.
    pub fn inverted(&self) -> Option<&PrimeSet> {
        match self {
            SolidRing::Localized(j) => Some(j),
            SolidRing::Product { inverted, .. } | SolidRing::Tower { inverted, .. } => Some(inverted),
            _ => None,
        }
    }

    /// Primes carrying a point with stalk Z_(p).
    pub fn line_set(&self) -> PrimeSet {
        match self.inverted() {
            Some(j) => j.complement(),
            None => PrimeSet::empty(),
        }
    }

    pub fn torsion_exponents(&self) -> TorsionExponents {
        match self {
            SolidRing::Zero | SolidRing::Localized(_) => TorsionExponents::none(),
            SolidRing::Cyclic(f) => TorsionExponents::Finite(f.clone()),
            SolidRing::Product { torsion, .. } => TorsionExponents::Finite(torsion.clone()),
            SolidRing::Tower { family, .. } => TorsionExponents::Family(family.clone()),
        }
    }

    /// 1 for the zero ring, n for Z/n, 0 otherwise; errors when a cyclic
    /// modulus does not fit in 64 bits.
    pub fn characteristic(&self) -> Result<u64> {
        match self {
            SolidRing::Zero => Ok(1),
            SolidRing::Cyclic(f) => f.value(),
            _ => Ok(0),
        }
    }

    /// Invert every prime of `t`. Solid rings are closed under localization,
    /// so the result is canonical again.
    pub fn localize(&self, t: &PrimeSet) -> SolidRing {
        match self {
            SolidRing::Zero => SolidRing::Zero,
            SolidRing::Cyclic(f) => {
                let kept = f.remove_primes(t);
                if kept.is_empty() {
                    SolidRing::Zero
                } else {
                    SolidRing::Cyclic(kept)
                }
            }
            SolidRing::Localized(j) => SolidRing::Localized(j.union(t)),
            SolidRing::Product { inverted, torsion } => {
                let kept = torsion.remove_primes(t);
                make_product(inverted.union(t), kept).expect("localization keeps torsion inside J")
            }
            SolidRing::Tower { inverted, family } => {
                let inverted = inverted.union(t);
                let kept = TorsionExponents::Family(family.clone()).restrict(&t.complement());
                match kept {
                    TorsionExponents::Family(family) => {
                        make_tower(inverted, family).expect("localization keeps K inside J")
                    }
                    TorsionExponents::Finite(map) => {
                        make_product(inverted, map).expect("localization keeps torsion inside J")
                    }
                }
            }
        }
    }

    /// The classification data of this ring's spectrum.
    pub fn classification_data(&self) -> ClassificationData {
        let line = self.line_set();
        let torsion = self.torsion_exponents();
        let exponents = ExponentMap::from_parts(line.clone(), &torsion)
            .expect("canonical ring data is valid");
        let has_generic = self.has_generic_point();
        let initial = if has_generic {
            line.union(&torsion.support())
        } else {
            PrimeSet::empty()
        };
        ClassificationData::new(exponents, has_generic, initial)
            .expect("canonical ring data is valid")
    }
}

/// Build the canonical ring whose spectrum has the given point data:
/// an optional generic point, line points at `line`, and torsion points
/// with the given exponents.
pub(crate) fn ring_with_spectrum(
    has_generic: bool,
    line: &PrimeSet,
    torsion: &TorsionExponents,
) -> Result<SolidRing> {
    if !line.intersect(&torsion.support()).is_empty() {
        let p = line.intersect(&torsion.support()).smallest().unwrap();
        return Err(Error::constraint(format!("prime {p} carries two points")));
    }
    if !has_generic {
        if !line.is_empty() {
            return Err(Error::constraint("line points require a generic point"));
        }
        return match torsion {
            TorsionExponents::Finite(map) if map.is_empty() => Ok(SolidRing::Zero),
            TorsionExponents::Finite(map) => Ok(SolidRing::Cyclic(map.clone())),
            TorsionExponents::Family(_) => Err(Error::constraint(
                "infinitely many torsion points require a generic point",
            )),
        };
    }
    let inverted = line.complement();
    match torsion {
        TorsionExponents::Finite(map) if map.is_empty() => Ok(SolidRing::Localized(inverted)),
        TorsionExponents::Finite(map) => make_product(inverted, map.clone()),
        TorsionExponents::Family(family) => make_tower(inverted, family.clone()),
    }
}

/// Stage n of a tower: Z[J_n^-1] x ∏_{q in K_n} Z/q^{e_q}, where K_n is the
/// n smallest members of K and J_n = (J \ K) ∪ K_n.
pub fn tower_stage(inverted: &PrimeSet, family: &TorsionFamily, n: usize) -> SolidRing {
    let k_n: Vec<Prime> = family.support.iter_members().take(n).collect();
    let j_n = inverted
        .difference(&family.support)
        .union(&PrimeSet::finite(k_n.iter().copied()));
    if k_n.is_empty() {
        return SolidRing::Localized(j_n);
    }
    let torsion = TorsionMap::new(
        k_n.iter()
            .map(|&q| (q, family.exponent(q).expect("member of K"))),
    )
    .expect("stage torsion is valid");
    make_product(j_n, torsion).expect("stage torsion lies inside J_n")
}

/// Whether a (necessarily unique) ring homomorphism `source -> target`
/// exists. Decided on spectra: a ring map corresponds contravariantly to a
/// scheme map Spec(target) -> Spec(source).
pub fn ring_hom_exists(source: &SolidRing, target: &SolidRing) -> bool {
    scheme_hom_exists(&target.classification_data(), &source.classification_data())
}
