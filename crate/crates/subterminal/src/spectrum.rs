//! Prime spectra of solid rings as concrete point sets.
//!
//! The spectrum of a solid ring has at most one point over each prime p
//! (with stalk Z/p^k or Z_(p)) plus possibly a generic point with stalk Q.
//! [`is_open_affine`] decides openness by per-type rules, a deliberately
//! separate route from the closure-set rule in [`crate::scheme`], so the two
//! can be checked against each other.

use std::fmt;

use crate::primes::{Prime, PrimeSet};
use crate::solid::{SolidRing, TorsionExponents};
use crate::{Error, Result};

/// A point of a spectrum, named by what sits under it.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum SpecPoint {
    Generic,
    Line(Prime),
    Torsion(Prime),
}

impl fmt::Display for SpecPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecPoint::Generic => write!(f, "Q"),
            SpecPoint::Line(p) => write!(f, "line({p})"),
            SpecPoint::Torsion(p) => write!(f, "torsion({p})"),
        }
    }
}

/// The local ring at a point.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Stalk {
    Rationals,
    LocalizedAt(Prime),
    Truncation(Prime, u32),
}

impl fmt::Display for Stalk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Stalk::Rationals => write!(f, "Q"),
            Stalk::LocalizedAt(p) => write!(f, "Z_({p})"),
            Stalk::Truncation(p, e) => match p.get().checked_pow(e) {
                Some(n) => write!(f, "Z/{n}"),
                None => write!(f, "Z/{p}^{e}"),
            },
        }
    }
}

/// A set of spectrum points: an optional generic point, line points over
/// `line`, torsion points over `torsion`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PointSet {
    generic: bool,
    line: PrimeSet,
    torsion: PrimeSet,
}

impl PointSet {
    pub fn new(generic: bool, line: PrimeSet, torsion: PrimeSet) -> PointSet {
        PointSet { generic, line, torsion }
    }

    pub fn empty() -> PointSet {
        PointSet::new(false, PrimeSet::empty(), PrimeSet::empty())
    }

    pub fn generic(&self) -> bool {
        self.generic
    }

    pub fn line(&self) -> &PrimeSet {
        &self.line
    }

    pub fn torsion(&self) -> &PrimeSet {
        &self.torsion
    }

    /// All primes carrying a point of this set.
    pub fn primes(&self) -> PrimeSet {
        self.line.union(&self.torsion)
    }

    pub fn is_empty(&self) -> bool {
        !self.generic && self.line.is_empty() && self.torsion.is_empty()
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        PointSet::new(
            self.generic || other.generic,
            self.line.union(&other.line),
            self.torsion.union(&other.torsion),
        )
    }

    pub fn contains_point(&self, point: &SpecPoint) -> bool {
        match *point {
            SpecPoint::Generic => self.generic,
            SpecPoint::Line(p) => self.line.contains(p),
            SpecPoint::Torsion(p) => self.torsion.contains(p),
        }
    }

    /// A point of `self` missing from `other`, rendered for error messages.
    pub(crate) fn subset_failure(&self, other: &PointSet) -> Option<String> {
        if self.generic && !other.generic {
            return Some(SpecPoint::Generic.to_string());
        }
        if let Some(p) = self.line.difference(&other.line).smallest() {
            return Some(SpecPoint::Line(p).to_string());
        }
        if let Some(p) = self.torsion.difference(&other.torsion).smallest() {
            return Some(SpecPoint::Torsion(p).to_string());
        }
        None
    }

    pub fn is_subset_of(&self, other: &PointSet) -> bool {
        self.subset_failure(other).is_none()
    }
}

/// The spectrum of a solid ring: its points with their stalks.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Spectrum {
    has_generic: bool,
    line: PrimeSet,
    torsion: TorsionExponents,
}

impl Spectrum {
    pub fn has_generic(&self) -> bool {
        self.has_generic
    }

    pub fn line(&self) -> &PrimeSet {
        &self.line
    }

    pub fn torsion(&self) -> &TorsionExponents {
        &self.torsion
    }

    pub fn points(&self) -> PointSet {
        PointSet::new(self.has_generic, self.line.clone(), self.torsion.support())
    }

    pub fn stalk(&self, point: &SpecPoint) -> Result<Stalk> {
        let missing = || Error::NotAPoint(point.to_string());
        match *point {
            SpecPoint::Generic => {
                if self.has_generic {
                    Ok(Stalk::Rationals)
                } else {
                    Err(missing())
                }
            }
            SpecPoint::Line(p) => {
                if self.line.contains(p) {
                    Ok(Stalk::LocalizedAt(p))
                } else {
                    Err(missing())
                }
            }
            SpecPoint::Torsion(p) => match self.torsion.exponent(p) {
                Some(e) => Ok(Stalk::Truncation(p, e)),
                None => Err(missing()),
            },
        }
    }
}

pub fn spectrum_of(s: &SolidRing) -> Spectrum {
    Spectrum {
        has_generic: s.has_generic_point(),
        line: s.line_set(),
        torsion: s.torsion_exponents(),
    }
}

pub fn stalk_at(s: &SolidRing, point: &SpecPoint) -> Result<Stalk> {
    spectrum_of(s).stalk(point)
}

/// Openness of a point subset in an affine spectrum, by per-type rules:
/// in Spec Z/n every subset is open; in Spec Z[J^-1] the opens are the empty
/// set and the cofinite sets of line points together with the generic point;
/// in a product spectrum the torsion points are free and a set with the
/// generic point needs cofinitely many line points; in a tower spectrum a
/// set with the generic point needs all but finitely many of all special
/// points.
pub fn is_open_affine(s: &SolidRing, u: &PointSet) -> Result<bool> {
    let spec = spectrum_of(s);
    if let Some(witness) = u.subset_failure(&spec.points()) {
        return Err(Error::NotASubset(witness));
    }
    Ok(match s {
        SolidRing::Zero | SolidRing::Cyclic(_) => true,
        SolidRing::Localized(_) => {
            if u.generic() {
                s.line_set().difference(u.line()).is_finite()
            } else {
                u.is_empty()
            }
        }
        SolidRing::Product { .. } => {
            if u.generic() {
                // The finitely many torsion points impose nothing.
                s.line_set().difference(u.line()).is_finite()
            } else {
                u.line().is_empty()
            }
        }
        SolidRing::Tower { .. } => {
            if u.generic() {
                spec.points().primes().difference(&u.primes()).is_finite()
            } else {
                u.line().is_empty()
            }
        }
    })
}

/// A small text picture of a spectrum: torsion points starred above the
/// line, line points marked below it, the generic point labelling the line
/// itself. Cofinite families show their first five members and an ellipsis.
pub fn ascii_diagram(s: &SolidRing) -> String {
    let spec = spectrum_of(s);
    if !spec.has_generic && spec.torsion.is_empty() {
        return "(empty)".into();
    }

    const SHOWN: usize = 5;
    enum Col {
        Torsion(Prime, u32),
        Line(Prime),
        TorsionMore,
        LineMore,
    }

    let torsion_support = spec.torsion.support();
    let torsion_shown: Vec<Prime> = torsion_support.iter_members().take(SHOWN).collect();
    let torsion_more = !torsion_support.is_finite();
    let line_shown: Vec<Prime> = spec.line.iter_members().take(SHOWN).collect();
    let line_more = !spec.line.is_finite();

    let mut cols: Vec<Col> = torsion_shown
        .iter()
        .map(|&p| Col::Torsion(p, spec.torsion.exponent(p).unwrap()))
        .chain(line_shown.iter().map(|&p| Col::Line(p)))
        .collect();
    cols.sort_by_key(|c| match *c {
        Col::Torsion(p, _) | Col::Line(p) => p.get(),
        _ => u64::MAX,
    });
    if torsion_more {
        cols.push(Col::TorsionMore);
    }
    if line_more {
        cols.push(Col::LineMore);
    }

    let width = |c: &Col| -> usize {
        match *c {
            Col::Torsion(p, e) => {
                let stalk = Stalk::Truncation(p, e).to_string();
                stalk.len().max(p.to_string().len()).max(4) + 2
            }
            Col::Line(p) => p.to_string().len().max(4) + 2,
            Col::TorsionMore | Col::LineMore => 5,
        }
    };
    let offsets: Vec<usize> = cols
        .iter()
        .scan(2usize, |x, c| {
            let here = *x;
            *x += width(c);
            Some(here)
        })
        .collect();
    let total = offsets.last().map_or(2, |&x| x) + cols.last().map_or(0, width);

    let put = |row: &mut String, x: usize, text: &str| {
        if row.len() < x {
            row.push_str(&" ".repeat(x - row.len()));
        }
        row.push_str(text);
    };

    let mut rows: Vec<String> = Vec::new();
    let any_torsion = cols.iter().any(|c| matches!(c, Col::Torsion(..) | Col::TorsionMore));
    if any_torsion {
        let mut labels = String::new();
        let mut dots = String::new();
        for (c, &x) in cols.iter().zip(&offsets) {
            match *c {
                Col::Torsion(p, e) => {
                    put(&mut labels, x, &Stalk::Truncation(p, e).to_string());
                    put(&mut dots, x, "*");
                }
                Col::TorsionMore => put(&mut dots, x, "..."),
                _ => {}
            }
        }
        rows.push(labels);
        rows.push(dots);
    }
    if spec.has_generic {
        rows.push(format!("{} Q", "-".repeat(total.max(18))));
        if cols.iter().any(|c| matches!(c, Col::Line(_) | Col::LineMore)) {
            let mut dots = String::new();
            for (c, &x) in cols.iter().zip(&offsets) {
                match *c {
                    Col::Line(_) => put(&mut dots, x, "o"),
                    Col::LineMore => put(&mut dots, x, "..."),
                    _ => {}
                }
            }
            rows.push(dots);
        }
    }
    let mut primes_row = String::new();
    for (c, &x) in cols.iter().zip(&offsets) {
        match *c {
            Col::Torsion(p, _) | Col::Line(p) => put(&mut primes_row, x, &p.to_string()),
            _ => {}
        }
    }
    if !primes_row.is_empty() {
        rows.push(primes_row);
    }
    for row in &mut rows {
        while row.ends_with(' ') {
            row.pop();
        }
    }
    rows.join("\n")
}
