//! Finite commutative rings as explicit operation tables, with a brute-force
//! unital homomorphism counter.
//!
//! This is the ground truth the symbolic criteria are checked against: a
//! [`FiniteRingTable`] is verified against the ring axioms element by
//! element on construction, and [`count_homs`] counts ring maps by
//! backtracking over images, using only the tables. [`solidity_audit`] runs
//! the defining property of solid rings (at most one map into anything) over
//! a whole corpus.

use std::fmt::Write as _;

use crate::primes::{Factorization, PrimeSet};
use crate::sample;
use crate::solid::{canonicalize, tower_stage, RawSolidRing, SolidRing};
use crate::{factor, Error, Result};

/// Largest order a table is allowed to have. Keeps axiom checks and hom
/// searches instant.
pub const ORDER_BOUND: usize = 64;

/// A finite commutative unital ring on the elements 0..n-1, with 0 the
/// additive identity, given by full addition and multiplication tables.
/// Construction checks every axiom.
#[derive(Clone, Debug)]
pub struct FiniteRingTable {
    name: String,
    order: usize,
    add: Vec<usize>,
    mul: Vec<usize>,
    neg: Vec<usize>,
    one: usize,
}

impl FiniteRingTable {
    pub fn new(name: &str, order: usize, add: Vec<usize>, mul: Vec<usize>) -> Result<FiniteRingTable> {
        if order == 0 {
            return Err(Error::Axiom("a ring has at least one element".into()));
        }
        if order > ORDER_BOUND {
            return Err(Error::SizeBound(order, ORDER_BOUND));
        }
        if add.len() != order * order || mul.len() != order * order {
            return Err(Error::Axiom("table size does not match the order".into()));
        }
        if add.iter().chain(&mul).any(|&x| x >= order) {
            return Err(Error::Axiom("table entry out of range".into()));
        }
        let at = |t: &Vec<usize>, i: usize, j: usize| t[i * order + j];
        for i in 0..order {
            if at(&add, 0, i) != i {
                return Err(Error::Axiom("0 is not the additive identity".into()));
            }
            for j in 0..order {
                if at(&add, i, j) != at(&add, j, i) {
                    return Err(Error::Axiom("addition is not commutative".into()));
                }
                if at(&mul, i, j) != at(&mul, j, i) {
                    return Err(Error::Axiom("multiplication is not commutative".into()));
                }
            }
        }
        let mut neg = vec![usize::MAX; order];
        for i in 0..order {
            match (0..order).find(|&j| at(&add, i, j) == 0) {
                Some(j) => neg[i] = j,
                None => return Err(Error::Axiom(format!("{i} has no additive inverse"))),
            }
        }
        for i in 0..order {
            for j in 0..order {
                for k in 0..order {
                    if at(&add, at(&add, i, j), k) != at(&add, i, at(&add, j, k)) {
                        return Err(Error::Axiom("addition is not associative".into()));
                    }
                    if at(&mul, at(&mul, i, j), k) != at(&mul, i, at(&mul, j, k)) {
                        return Err(Error::Axiom("multiplication is not associative".into()));
                    }
                    if at(&mul, i, at(&add, j, k)) != at(&add, at(&mul, i, j), at(&mul, i, k)) {
                        return Err(Error::Axiom("multiplication does not distribute".into()));
                    }
                }
            }
        }
        let one = (0..order)
            .find(|&e| (0..order).all(|x| at(&mul, e, x) == x))
            .ok_or_else(|| Error::Axiom("no multiplicative identity".into()))?;
        Ok(FiniteRingTable { name: name.into(), order, add, mul, neg, one })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: &str) -> FiniteRingTable {
        self.name = name.into();
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn add(&self, i: usize, j: usize) -> usize {
        self.add[i * self.order + j]
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.mul[i * self.order + j]
    }

    pub fn neg(&self, i: usize) -> usize {
        self.neg[i]
    }

    pub fn sub(&self, i: usize, j: usize) -> usize {
        self.add(i, self.neg(j))
    }

    pub fn one(&self) -> usize {
        self.one
    }

    /// Additive order of 1.
    pub fn characteristic(&self) -> u64 {
        let mut x = self.one;
        let mut c = 1;
        while x != 0 {
            x = self.add(x, self.one);
            c += 1;
        }
        c
    }

    /// The element k·1.
    pub fn int(&self, k: u64) -> usize {
        let r = k % self.characteristic();
        let mut x = 0;
        for _ in 0..r {
            x = self.add(x, self.one);
        }
        x
    }

    pub fn is_unit(&self, x: usize) -> bool {
        (0..self.order).any(|y| self.mul(x, y) == self.one)
    }

    pub fn idempotents(&self) -> Vec<usize> {
        (0..self.order).filter(|&x| self.mul(x, x) == x).collect()
    }

    /// The ring e·R for an idempotent e, with identity e.
    pub fn corner(&self, e: usize) -> Result<FiniteRingTable> {
        if self.mul(e, e) != e {
            return Err(Error::constraint(format!("{e} is not idempotent")));
        }
        let elements: Vec<usize> = (0..self.order).filter(|&x| self.mul(e, x) == x).collect();
        let index = |x: usize| elements.binary_search(&x).expect("corner is closed");
        let n = elements.len();
        let mut add = vec![0; n * n];
        let mut mul = vec![0; n * n];
        for (i, &x) in elements.iter().enumerate() {
            for (j, &y) in elements.iter().enumerate() {
                add[i * n + j] = index(self.add(x, y));
                mul[i * n + j] = index(self.mul(x, y));
            }
        }
        FiniteRingTable::new(&format!("{}[e={}]", self.name, e), n, add, mul)
    }
}

/// The ring Z/n (the zero ring for n = 1).
pub fn ft_cyclic(n: u64) -> Result<FiniteRingTable> {
    if n == 0 {
        return Err(Error::constraint("Z/0 is not finite"));
    }
    if n as usize > ORDER_BOUND {
        return Err(Error::SizeBound(n as usize, ORDER_BOUND));
    }
    let n = n as usize;
    let mut add = vec![0; n * n];
    let mut mul = vec![0; n * n];
    for i in 0..n {
        for j in 0..n {
            add[i * n + j] = (i + j) % n;
            mul[i * n + j] = (i * j) % n;
        }
    }
    FiniteRingTable::new(&format!("Z/{n}"), n, add, mul)
}

/// The product ring, elements indexed as a·|B| + b.
pub fn ft_product(a: &FiniteRingTable, b: &FiniteRingTable) -> Result<FiniteRingTable> {
    let n = a.order * b.order;
    if n > ORDER_BOUND {
        return Err(Error::SizeBound(n, ORDER_BOUND));
    }
    let mut add = vec![0; n * n];
    let mut mul = vec![0; n * n];
    for x1 in 0..a.order {
        for y1 in 0..b.order {
            for x2 in 0..a.order {
                for y2 in 0..b.order {
                    let i = x1 * b.order + y1;
                    let j = x2 * b.order + y2;
                    add[i * n + j] = a.add(x1, x2) * b.order + b.add(y1, y2);
                    mul[i * n + j] = a.mul(x1, x2) * b.order + b.mul(y1, y2);
                }
            }
        }
    }
    FiniteRingTable::new(&format!("{} x {}", a.name, b.name), n, add, mul)
}

/// The ring Z/m[x]/(x^d - r) where r is the polynomial with the given
/// coefficients (constant first, length d). Elements are base-m digit
/// strings, least significant digit the constant term.
pub fn ft_polyquot(name: &str, m: u64, rel: &[u64]) -> Result<FiniteRingTable> {
    let d = rel.len();
    if m < 2 || d == 0 {
        return Err(Error::constraint("need a modulus >= 2 and a degree >= 1"));
    }
    let order = (m as usize).checked_pow(d as u32).filter(|&n| n <= ORDER_BOUND);
    let n = order.ok_or(Error::SizeBound(usize::MAX, ORDER_BOUND))?;
    let m = m as usize;
    let rel: Vec<usize> = rel.iter().map(|&c| c as usize % m).collect();
    let digits = |mut x: usize| -> Vec<usize> {
        (0..d)
            .map(|_| {
                let r = x % m;
                x /= m;
                r
            })
            .collect()
    };
    let pack = |v: &[usize]| -> usize { v.iter().rev().fold(0, |acc, &c| acc * m + c) };
    let mut add = vec![0; n * n];
    let mut mul = vec![0; n * n];
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (digits(i), digits(j));
            let sum: Vec<usize> = (0..d).map(|k| (a[k] + b[k]) % m).collect();
            add[i * n + j] = pack(&sum);
            let mut prod = vec![0usize; 2 * d - 1];
            for (k1, &c1) in a.iter().enumerate() {
                for (k2, &c2) in b.iter().enumerate() {
                    prod[k1 + k2] = (prod[k1 + k2] + c1 * c2) % m;
                }
            }
            for k in (d..2 * d - 1).rev() {
                let c = prod[k];
                prod[k] = 0;
                for (off, &rc) in rel.iter().enumerate() {
                    prod[k - d + off] = (prod[k - d + off] + c * rc) % m;
                }
            }
            mul[i * n + j] = pack(&prod[..d]);
        }
    }
    FiniteRingTable::new(name, n, add, mul)
}

#[derive(Clone)]
struct Search<'t> {
    source: &'t FiniteRingTable,
    target: &'t FiniteRingTable,
    img: Vec<Option<usize>>,
    defined: Vec<usize>,
    closed: usize,
}

impl Search<'_> {
    /// Force φ(g) = y. The defined set stays an additive subgroup on which
    /// φ is a group homomorphism; adjoining g fills in the new cosets.
    fn adjoin(&mut self, g: usize, y: usize) -> bool {
        if let Some(v) = self.img[g] {
            return v == y;
        }
        let mut dg = g;
        let mut d = 1usize;
        while self.img[dg].is_none() {
            dg = self.source.add(dg, g);
            d += 1;
        }
        let mut dy = y;
        for _ in 1..d {
            dy = self.target.add(dy, y);
        }
        if self.img[dg] != Some(dy) {
            return false;
        }
        let old_len = self.defined.len();
        let mut ig = g;
        let mut iy = y;
        for _ in 1..d {
            for k in 0..old_len {
                let s = self.defined[k];
                let elem = self.source.add(ig, s);
                self.img[elem] = Some(self.target.add(iy, self.img[s].unwrap()));
                self.defined.push(elem);
            }
            ig = self.source.add(ig, g);
            iy = self.target.add(iy, y);
        }
        true
    }

    /// Propagate multiplicativity over all defined pairs, defining further
    /// elements as forced, until stable or contradictory.
    fn close(&mut self) -> bool {
        while self.closed < self.defined.len() {
            let x = self.defined[self.closed];
            self.closed += 1;
            let mut j = 0;
            while j < self.defined.len() {
                let y = self.defined[j];
                j += 1;
                let (fx, fy) = (self.img[x].unwrap(), self.img[y].unwrap());
                if !self.adjoin(self.source.mul(x, y), self.target.mul(fx, fy)) {
                    return false;
                }
            }
        }
        true
    }

    fn count(mut self) -> usize {
        if !self.close() {
            return 0;
        }
        match (0..self.source.order).find(|&g| self.img[g].is_none()) {
            None => 1,
            Some(g) => (0..self.target.order)
                .map(|y| {
                    let mut branch = self.clone();
                    if branch.adjoin(g, y) {
                        branch.count()
                    } else {
                        0
                    }
                })
                .sum(),
        }
    }
}

/// Count unital ring homomorphisms `source -> target` by exhaustive search.
pub fn count_homs(source: &FiniteRingTable, target: &FiniteRingTable) -> usize {
    let mut s = Search {
        source,
        target,
        img: vec![None; source.order],
        defined: vec![0],
        closed: 0,
    };
    s.img[0] = Some(0);
    if !s.adjoin(source.one, target.one) {
        return 0;
    }
    s.count()
}

/// A finite model of a solid ring: Some for the zero ring and Z/n, None for
/// the infinite types, an error when the order exceeds [`ORDER_BOUND`].
pub fn table_of(s: &SolidRing) -> Result<Option<FiniteRingTable>> {
    match s {
        SolidRing::Zero => ft_cyclic(1).map(Some),
        SolidRing::Cyclic(f) => {
            let n = f.value().map_err(|_| Error::SizeBound(usize::MAX, ORDER_BOUND))?;
            ft_cyclic(n).map(Some)
        }
        _ => Ok(None),
    }
}

/// Whether the factored integer is divisible by `m`, without materializing
/// the (possibly enormous) factored value.
fn divisible_by(f: &Factorization, m: u64) -> bool {
    factor(m)
        .expect("positive divisor")
        .iter()
        .all(|(p, e)| f.exponent(p).unwrap_or(0) >= e)
}

/// How many homomorphisms a solid ring admits into a finite ring. For the
/// finite types this is divisibility of the characteristic; a localization
/// needs its inverted primes coprime to the characteristic; a product
/// splits over the idempotents of the target; a tower is counted at the
/// stage where the answer stabilizes (a torsion prime not dividing the
/// target's characteristic forces its component to map to 0, so later
/// stages restrict bijectively).
pub fn hom_count_to_table(b: &SolidRing, a: &FiniteRingTable) -> usize {
    match b {
        SolidRing::Zero => usize::from(a.order == 1),
        SolidRing::Cyclic(f) => usize::from(divisible_by(f, a.characteristic())),
        SolidRing::Localized(j) => usize::from(localization_maps_into(j, a)),
        SolidRing::Product { inverted, torsion } => a
            .idempotents()
            .into_iter()
            .filter(|&e| {
                let line_part = a.corner(e).expect("idempotent corner");
                let torsion_part = a.corner(a.sub(a.one, e)).expect("idempotent corner");
                localization_maps_into(inverted, &line_part)
                    && divisible_by(torsion, torsion_part.characteristic())
            })
            .count(),
        SolidRing::Tower { inverted, family } => {
            let char_primes = factor(a.characteristic()).expect("finite characteristic");
            let in_tower: Vec<_> = char_primes
                .support()
                .iter_members()
                .filter(|&p| family.support().contains(p))
                .collect();
            let stage = match in_tower.iter().max() {
                None => 0,
                Some(&pmax) => {
                    1 + family
                        .support()
                        .iter_members()
                        .position(|q| q == pmax)
                        .expect("member of the support")
                }
            };
            hom_count_to_table(&tower_stage(inverted, family, stage), a)
        }
    }
}

/// Whether Z[J^-1] maps into the finite ring: every prime of J must stay
/// invertible, i.e. avoid the characteristic.
fn localization_maps_into(j: &PrimeSet, a: &FiniteRingTable) -> bool {
    factor(a.characteristic())
        .expect("finite characteristic")
        .support()
        .iter_members()
        .all(|p| !j.contains(p))
}

pub fn hom_exists_to_table(b: &SolidRing, a: &FiniteRingTable) -> bool {
    hom_count_to_table(b, a) > 0
}

/// A corpus of finite commutative rings up to the given order: cyclic
/// rings, products, and a few quotient rings that are not products of
/// cyclics.
pub fn table_corpus(max_order: usize) -> Result<Vec<FiniteRingTable>> {
    if max_order > ORDER_BOUND {
        return Err(Error::SizeBound(max_order, ORDER_BOUND));
    }
    let mut v = Vec::new();
    for n in 1..=max_order as u64 {
        v.push(ft_cyclic(n)?);
    }
    for a in 2..=max_order {
        for b in a..=max_order {
            if a * b <= max_order {
                v.push(ft_product(&ft_cyclic(a as u64)?, &ft_cyclic(b as u64)?)?);
            }
        }
    }
    if max_order >= 4 {
        v.push(ft_polyquot("F4", 2, &[1, 1])?);
        v.push(ft_polyquot("Z/2[x]/(x^2)", 2, &[0, 0])?);
    }
    if max_order >= 8 {
        v.push(ft_polyquot("Z/2[x]/(x^3)", 2, &[0, 0, 0])?);
        v.push(ft_polyquot("F8", 2, &[1, 1, 0])?);
        let z2 = ft_cyclic(2)?;
        v.push(ft_product(&ft_product(&z2, &z2)?, &z2)?);
    }
    if max_order >= 9 {
        v.push(ft_polyquot("F9", 3, &[2, 0])?);
        v.push(ft_polyquot("Z/3[x]/(x^2)", 3, &[0, 0])?);
    }
    if max_order >= 16 {
        v.push(ft_polyquot("Z/4[x]/(x^2-2)", 4, &[2, 0])?);
        v.push(ft_polyquot("Z/2[x]/(x^4)", 2, &[0, 0, 0, 0])?);
    }
    Ok(v)
}

/// The standard non-solid control ring Z/2[x]/(x^2), which admits two maps
/// into itself.
pub fn control_table() -> FiniteRingTable {
    ft_polyquot("Z/2[x]/(x^2)", 2, &[0, 0]).expect("control ring is valid")
}

#[derive(Clone, Debug)]
pub struct AuditRow {
    pub source: String,
    pub target: String,
    pub count: usize,
    pub control: bool,
}

#[derive(Clone, Debug)]
pub struct AuditReport {
    rows: Vec<AuditRow>,
}

impl AuditReport {
    pub fn rows(&self) -> &[AuditRow] {
        &self.rows
    }

    /// Rows breaking solidity: more than one map from a claimed solid ring.
    pub fn violations(&self) -> Vec<&AuditRow> {
        self.rows.iter().filter(|r| !r.control && r.count > 1).collect()
    }

    /// Control rows failing to show multiple maps (the audit would be
    /// toothless if the counter never reported more than one).
    pub fn control_failures(&self) -> Vec<&AuditRow> {
        self.rows.iter().filter(|r| r.control && r.count <= 1).collect()
    }

    pub fn passed(&self) -> bool {
        self.violations().is_empty() && self.control_failures().is_empty()
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let checked = self.rows.iter().filter(|r| !r.control).count();
        writeln!(out, "checked {checked} source/target pairs").unwrap();
        let violations = self.violations();
        if violations.is_empty() {
            writeln!(out, "violations: none").unwrap();
        } else {
            writeln!(out, "violations: {}", violations.len()).unwrap();
            for r in violations {
                writeln!(out, "  {} -> {}: {} homomorphisms", r.source, r.target, r.count).unwrap();
            }
        }
        for r in self.rows.iter().filter(|r| r.control) {
            let status = if r.count > 1 { "ok" } else { "FAILED" };
            writeln!(
                out,
                "control {} -> {}: {} homomorphisms ({})",
                r.source, r.target, r.count, status
            )
            .unwrap();
        }
        let verdict = if self.passed() { "passed" } else { "FAILED" };
        writeln!(out, "audit {verdict}").unwrap();
        out
    }
}

/// Check the defining property of solid rings over a corpus: the zero ring,
/// Z/n for n up to 30, and `symbolic_samples` sampled infinite solid rings,
/// against every table of order at most `max_order`. Finite sources are
/// counted by brute force, symbolic ones through the splitting rules above.
/// A non-solid control ring is counted alongside to confirm the counter can
/// see multiple maps.
pub fn solidity_audit(max_order: usize, symbolic_samples: usize, seed: u64) -> Result<AuditReport> {
    let targets = table_corpus(max_order)?;
    let mut sources = vec![SolidRing::Zero];
    for n in 2..=30 {
        sources.push(canonicalize(RawSolidRing::Cyclic(n))?);
    }
    let mut rng = sample::rng(seed);
    for _ in 0..symbolic_samples {
        sources.push(sample::symbolic_ring(&mut rng));
    }
    let mut rows = Vec::new();
    for src in &sources {
        let table = table_of(src)?;
        for t in &targets {
            let count = match &table {
                Some(bt) => count_homs(bt, t),
                None => hom_count_to_table(src, t),
            };
            rows.push(AuditRow {
                source: src.to_string(),
                target: t.name.clone(),
                count,
                control: false,
            });
        }
    }
    let ctrl = control_table();
    rows.push(AuditRow {
        source: format!("{} (control)", ctrl.name),
        target: ctrl.name.clone(),
        count: count_homs(&ctrl, &ctrl),
        control: true,
    });
    Ok(AuditReport { rows })
}
