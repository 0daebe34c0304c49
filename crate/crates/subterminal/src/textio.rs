//! The textual grammar for every domain value, both directions.
//!
//! Printing always emits the canonical spelling; parsing is whitespace
//! insensitive around punctuation and accepts a few redundant spellings
//! (such as `Z[1/P]` for `Q`). Parse errors carry line and column. Prime
//! lists must be strictly increasing, so unsorted or duplicated bases are
//! rejected at parse time rather than silently normalized.
//!
//! ```text
//! primeset := "{" "}" | "{" p ("," p)* "}" | "P" | "P" "\" "{" p ("," p)* "}"
//! ring     := "0" | "Z" | "Q" | "Z" "/" nat | "Z" "/" p "^" nat
//!           | "Z" "[" "1" "/" primeset "]"
//!           | ring "x" ring
//!           | "tower" "(" "inv" "=" primeset ","
//!                         "tors" "=" "{" "K" "=" primeset
//!                                     ("," "default" "=" nat)?
//!                                     ("," p ":" nat)* "}" ")"
//! expspec  := "{" "}" | "{" p ":" nat ("," p ":" nat)* "}"
//!           | "{" "S" "=" primeset ("," "default" "=" nat)? ("," p ":" nat)* "}"
//! scheme   := "scheme" "(" "q" "=" flag "," "inf" "=" primeset ","
//!                          "fin" "=" expspec "," "C" "=" primeset ")"
//! pointset := "pts" "(" "Q" "=" flag "," "line" "=" primeset ","
//!                       "tors" "=" primeset ")"
//! ```

use std::fmt;

use serde_json::{json, Value};

use crate::finring::AuditReport;
use crate::primes::{is_prime, Prime, PrimeSet, SetKind};
use crate::scheme::{ClassificationData, ExponentMap};
use crate::solid::{canonicalize, RawSolidRing, SolidRing, TorsionExponents, TorsionMap};
use crate::spectrum::{PointSet, SpecPoint, Spectrum, Stalk};
use crate::{Error, Result};

struct P<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> P<'a> {
    fn new(src: &'a str) -> P<'a> {
        P { bytes: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn err_at(&self, line: u32, col: u32, msg: impl Into<String>) -> Error {
        Error::Parse { line, col, msg: msg.into() }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        self.err_at(self.line, self.col, msg)
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) {
        if let Some(b) = self.peek() {
            self.pos += 1;
            if b == b'\n' {
                self.line += 1;
                self.col = 1;
            } else {
                self.col += 1;
            }
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.bump();
        }
    }

    fn eat(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", c as char)))
        }
    }

    fn try_eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let mut s = String::new();
        while let Some(b) = self.peek() {
            if b.is_ascii_alphabetic() {
                s.push(b as char);
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    fn expect_ident(&mut self, kw: &str) -> Result<()> {
        self.skip_ws();
        let (line, col) = (self.line, self.col);
        if self.ident() == kw {
            Ok(())
        } else {
            Err(self.err_at(line, col, format!("expected '{kw}'")))
        }
    }

    fn nat(&mut self) -> Result<u64> {
        self.skip_ws();
        if !matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
            return Err(self.err("expected a number"));
        }
        let mut v: u64 = 0;
        while let Some(b) = self.peek() {
            if !b.is_ascii_digit() {
                break;
            }
            v = v
                .checked_mul(10)
                .and_then(|v| v.checked_add((b - b'0') as u64))
                .ok_or_else(|| self.err("number too large"))?;
            self.bump();
        }
        Ok(v)
    }

    fn exponent(&mut self) -> Result<u32> {
        self.skip_ws();
        let (line, col) = (self.line, self.col);
        let n = self.nat()?;
        if n == 0 {
            return Err(self.err_at(line, col, "exponent must be positive"));
        }
        u32::try_from(n).map_err(|_| self.err_at(line, col, "exponent too large"))
    }

    fn flag(&mut self) -> Result<bool> {
        self.skip_ws();
        let (line, col) = (self.line, self.col);
        match self.nat()? {
            0 => Ok(false),
            1 => Ok(true),
            _ => Err(self.err_at(line, col, "expected 0 or 1")),
        }
    }

    fn prime(&mut self, last: &mut Option<u64>) -> Result<Prime> {
        self.skip_ws();
        let (line, col) = (self.line, self.col);
        let n = self.nat()?;
        if !is_prime(n) {
            return Err(self.err_at(line, col, format!("{n} is not a prime")));
        }
        if let Some(prev) = *last {
            if n == prev {
                return Err(self.err_at(line, col, format!("duplicate prime {n}")));
            }
            if n < prev {
                return Err(self.err_at(line, col, "primes must be listed in increasing order"));
            }
        }
        *last = Some(n);
        Ok(Prime::new(n).expect("checked above"))
    }

    /// `{p, p, ...}` with strictly increasing primes.
    fn prime_list(&mut self) -> Result<Vec<Prime>> {
        self.eat(b'{')?;
        let mut v = Vec::new();
        let mut last = None;
        self.skip_ws();
        if self.try_eat(b'}') {
            return Ok(v);
        }
        loop {
            v.push(self.prime(&mut last)?);
            if self.try_eat(b',') {
                continue;
            }
            self.eat(b'}')?;
            return Ok(v);
        }
    }

    fn primeset(&mut self) -> Result<PrimeSet> {
        self.skip_ws();
        match self.peek() {
            Some(b'P') => {
                self.bump();
                self.skip_ws();
                if self.try_eat(b'\\') {
                    Ok(PrimeSet::cofinite(self.prime_list()?))
                } else {
                    Ok(PrimeSet::all())
                }
            }
            Some(b'{') => Ok(PrimeSet::finite(self.prime_list()?)),
            _ => Err(self.err("expected a prime set")),
        }
    }

    /// The body of an exponent list after `S`/`K` was consumed: the support
    /// set plus optional default and overrides, up to the closing brace.
    fn keyed_exponents(&mut self) -> Result<(PrimeSet, u32, Vec<(Prime, u32)>)> {
        self.eat(b'=')?;
        let support = self.primeset()?;
        let mut default_exp: Option<u32> = None;
        let mut overrides = Vec::new();
        let mut last = None;
        loop {
            if self.try_eat(b'}') {
                return Ok((support, default_exp.unwrap_or(1), overrides));
            }
            self.eat(b',')?;
            self.skip_ws();
            if matches!(self.peek(), Some(b) if b.is_ascii_alphabetic()) {
                let (line, col) = (self.line, self.col);
                self.expect_ident("default")?;
                if default_exp.is_some() {
                    return Err(self.err_at(line, col, "default given twice"));
                }
                self.eat(b'=')?;
                default_exp = Some(self.exponent()?);
            } else {
                let p = self.prime(&mut last)?;
                self.eat(b':')?;
                overrides.push((p, self.exponent()?));
            }
        }
    }

    /// `{}`, `{p:e,...}`, or `{S=primeset, default=e, p:e,...}`.
    fn expspec(&mut self) -> Result<(PrimeSet, u32, Vec<(Prime, u32)>)> {
        self.eat(b'{')?;
        self.skip_ws();
        match self.peek() {
            Some(b'}') => {
                self.bump();
                Ok((PrimeSet::empty(), 1, Vec::new()))
            }
            Some(b'S') => {
                self.bump();
                self.keyed_exponents()
            }
            _ => {
                let mut entries = Vec::new();
                let mut last = None;
                loop {
                    let p = self.prime(&mut last)?;
                    self.eat(b':')?;
                    entries.push((p, self.exponent()?));
                    if self.try_eat(b',') {
                        continue;
                    }
                    self.eat(b'}')?;
                    let support = PrimeSet::finite(entries.iter().map(|&(p, _)| p));
                    return Ok((support, 1, entries));
                }
            }
        }
    }

    fn ring_atom(&mut self) -> Result<RawSolidRing> {
        self.skip_ws();
        match self.peek() {
            Some(b'0') => {
                self.bump();
                Ok(RawSolidRing::Zero)
            }
            Some(b) if b.is_ascii_alphabetic() => {
                let (line, col) = (self.line, self.col);
                match self.ident().as_str() {
                    "Z" => {
                        self.skip_ws();
                        match self.peek() {
                            Some(b'/') => {
                                self.bump();
                                self.skip_ws();
                                let (l1, c1) = (self.line, self.col);
                                let n = self.nat()?;
                                if self.try_eat(b'^') {
                                    if !is_prime(n) {
                                        return Err(self.err_at(l1, c1, format!("{n} is not a prime")));
                                    }
                                    let e = self.exponent()?;
                                    return Ok(RawSolidRing::PrimePower(n, e));
                                }
                                Ok(RawSolidRing::Cyclic(n))
                            }
                            Some(b'[') => {
                                self.bump();
                                self.skip_ws();
                                let (l1, c1) = (self.line, self.col);
                                if self.nat()? != 1 {
                                    return Err(self.err_at(l1, c1, "expected '1'"));
                                }
                                self.eat(b'/')?;
                                let j = self.primeset()?;
                                self.eat(b']')?;
                                Ok(RawSolidRing::Localized(j))
                            }
                            _ => Ok(RawSolidRing::Localized(PrimeSet::empty())),
                        }
                    }
                    "Q" => Ok(RawSolidRing::Localized(PrimeSet::all())),
                    "tower" => {
                        self.eat(b'(')?;
                        self.expect_ident("inv")?;
                        self.eat(b'=')?;
                        let inverted = self.primeset()?;
                        self.eat(b',')?;
                        self.expect_ident("tors")?;
                        self.eat(b'=')?;
                        self.eat(b'{')?;
                        self.skip_ws();
                        if self.peek() != Some(b'K') {
                            return Err(self.err("expected 'K'"));
                        }
                        self.bump();
                        let (support, default_exp, overrides) = self.keyed_exponents()?;
                        self.eat(b')')?;
                        Ok(RawSolidRing::Tower {
                            inverted,
                            support,
                            default_exp,
                            overrides: overrides.into_iter().map(|(p, e)| (p.get(), e)).collect(),
                        })
                    }
                    other => Err(self.err_at(line, col, format!("unknown ring '{other}'"))),
                }
            }
            _ => Err(self.err("expected a ring")),
        }
    }

    fn ring(&mut self) -> Result<RawSolidRing> {
        let mut acc = self.ring_atom()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'x') {
                self.bump();
                let rhs = self.ring_atom()?;
                acc = RawSolidRing::Times(Box::new(acc), Box::new(rhs));
            } else {
                return Ok(acc);
            }
        }
    }

    fn finish(&mut self) -> Result<()> {
        self.skip_ws();
        if self.peek().is_some() {
            Err(self.err("unexpected trailing input"))
        } else {
            Ok(())
        }
    }
}

pub fn parse_primeset(src: &str) -> Result<PrimeSet> {
    let mut p = P::new(src);
    let v = p.primeset()?;
    p.finish()?;
    Ok(v)
}

/// Parse and canonicalize a ring expression.
pub fn parse_ring(src: &str) -> Result<SolidRing> {
    let mut p = P::new(src);
    let raw = p.ring()?;
    p.finish()?;
    canonicalize(raw)
}

/// Parse and validate classification data.
pub fn parse_scheme(src: &str) -> Result<ClassificationData> {
    let mut p = P::new(src);
    p.expect_ident("scheme")?;
    p.eat(b'(')?;
    p.expect_ident("q")?;
    p.eat(b'=')?;
    let q = p.flag()?;
    p.eat(b',')?;
    p.expect_ident("inf")?;
    p.eat(b'=')?;
    let inf = p.primeset()?;
    p.eat(b',')?;
    p.expect_ident("fin")?;
    p.eat(b'=')?;
    let (fin, default_exp, overrides) = p.expspec()?;
    p.eat(b',')?;
    p.expect_ident("C")?;
    p.eat(b'=')?;
    let closure = p.primeset()?;
    p.eat(b')')?;
    p.finish()?;
    let exponents = ExponentMap::new(inf, fin, default_exp, overrides)?;
    ClassificationData::new(exponents, q, closure)
}

pub fn parse_pointset(src: &str) -> Result<PointSet> {
    let mut p = P::new(src);
    p.expect_ident("pts")?;
    p.eat(b'(')?;
    p.expect_ident("Q")?;
    p.eat(b'=')?;
    let generic = p.flag()?;
    p.eat(b',')?;
    p.expect_ident("line")?;
    p.eat(b'=')?;
    let line = p.primeset()?;
    p.eat(b',')?;
    p.expect_ident("tors")?;
    p.eat(b'=')?;
    let torsion = p.primeset()?;
    p.eat(b')')?;
    p.finish()?;
    Ok(PointSet::new(generic, line, torsion))
}

/// Parse a single spectrum point: `Q`, `line(p)`, or `torsion(p)`.
pub fn parse_point(src: &str) -> Result<SpecPoint> {
    let mut p = P::new(src);
    p.skip_ws();
    let (line, col) = (p.line, p.col);
    let pt = match p.ident().as_str() {
        "Q" => SpecPoint::Generic,
        kw @ ("line" | "torsion") => {
            p.eat(b'(')?;
            let mut last = None;
            let q = p.prime(&mut last)?;
            p.eat(b')')?;
            if kw == "line" {
                SpecPoint::Line(q)
            } else {
                SpecPoint::Torsion(q)
            }
        }
        other => return Err(p.err_at(line, col, format!("unknown point '{other}'"))),
    };
    p.finish()?;
    Ok(pt)
}

pub fn print_primeset(s: &PrimeSet) -> String {
    let basis = || {
        s.basis()
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    match s.kind() {
        SetKind::Finite => format!("{{{}}}", basis()),
        SetKind::Cofinite => {
            if s.is_all() {
                "P".into()
            } else {
                format!("P\\{{{}}}", basis())
            }
        }
    }
}

fn print_localized(j: &PrimeSet) -> String {
    if j.is_all() {
        "Q".into()
    } else if j.is_empty() {
        "Z".into()
    } else {
        format!("Z[1/{}]", print_primeset(j))
    }
}

fn print_overrides(overrides: impl Iterator<Item = (Prime, u32)>) -> String {
    overrides.map(|(p, e)| format!(", {p}:{e}")).collect()
}

/// `Z/n` when the modulus fits in one integer, otherwise the factored
/// spelling `Z/p1^e1 x Z/p2^e2 x ...` with each prime power written plainly
/// when it fits.
fn modulus_text(f: &TorsionMap) -> String {
    if let Ok(n) = f.value() {
        return format!("Z/{n}");
    }
    let atoms: Vec<String> = f
        .iter()
        .map(|(p, e)| match p.get().checked_pow(e) {
            Some(n) => format!("Z/{n}"),
            None => format!("Z/{p}^{e}"),
        })
        .collect();
    atoms.join(" x ")
}

pub fn print_ring(s: &SolidRing) -> String {
    match s {
        SolidRing::Zero => "0".into(),
        SolidRing::Cyclic(f) => modulus_text(f),
        SolidRing::Localized(j) => print_localized(j),
        SolidRing::Product { inverted, torsion } => {
            format!("{} x {}", print_localized(inverted), modulus_text(torsion))
        }
        SolidRing::Tower { inverted, family } => format!(
            "tower(inv={}, tors={{K={}, default={}{}}})",
            print_primeset(inverted),
            print_primeset(family.support()),
            family.default_exp(),
            print_overrides(family.overrides())
        ),
    }
}

/// Render caps on torsion stalks: a finite map as `{p:e,...}`, an
/// eventually-constant family as `{S=..., default=e, ...}`.
pub fn print_torsion(t: &TorsionExponents) -> String {
    match t {
        TorsionExponents::Finite(m) => {
            let entries: Vec<String> = m.iter().map(|(p, e)| format!("{p}:{e}")).collect();
            format!("{{{}}}", entries.join(","))
        }
        TorsionExponents::Family(f) => format!(
            "{{S={}, default={}{}}}",
            print_primeset(f.support()),
            f.default_exp(),
            print_overrides(f.overrides())
        ),
    }
}

fn print_expmap(e: &ExponentMap) -> String {
    if e.fin().is_finite() {
        let entries: Vec<String> = e.overrides().map(|(p, x)| format!("{p}:{x}")).collect();
        format!("{{{}}}", entries.join(","))
    } else {
        format!(
            "{{S={}, default={}{}}}",
            print_primeset(e.fin()),
            e.default_exp(),
            print_overrides(e.overrides())
        )
    }
}

pub fn print_scheme(d: &ClassificationData) -> String {
    format!(
        "scheme(q={}, inf={}, fin={}, C={})",
        u8::from(d.has_generic()),
        print_primeset(d.exponents().inf()),
        print_expmap(d.exponents()),
        print_primeset(d.closure())
    )
}

pub fn print_pointset(u: &PointSet) -> String {
    format!(
        "pts(Q={}, line={}, tors={})",
        u8::from(u.generic()),
        print_primeset(u.line()),
        print_primeset(u.torsion())
    )
}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_primeset(self))
    }
}

impl fmt::Display for SolidRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_ring(self))
    }
}

impl fmt::Display for ClassificationData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_scheme(self))
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_pointset(self))
    }
}

/// Structured (JSON) rendering. Objects use sorted keys; prime-indexed maps
/// are emitted as `[prime, exponent]` pair arrays to keep numeric order.
pub trait ToStructured {
    fn to_structured(&self) -> Value;
}

fn pairs_json<I: Iterator<Item = (Prime, u32)>>(it: I) -> Value {
    Value::Array(it.map(|(p, e)| json!([p.get(), e])).collect())
}

impl ToStructured for PrimeSet {
    fn to_structured(&self) -> Value {
        let basis: Vec<u64> = self.basis().iter().map(|p| p.get()).collect();
        match self.kind() {
            SetKind::Finite => json!({"kind": "finite", "primes": basis}),
            SetKind::Cofinite => json!({"kind": "cofinite", "excluded": basis}),
        }
    }
}

impl ToStructured for SolidRing {
    fn to_structured(&self) -> Value {
        match self {
            SolidRing::Zero => json!({"kind": "zero"}),
            SolidRing::Cyclic(f) => json!({
                "kind": "cyclic",
                "n": f.value().ok(),
                "factors": pairs_json(f.iter()),
            }),
            SolidRing::Localized(j) => json!({
                "kind": "localized",
                "inverted": j.to_structured(),
            }),
            SolidRing::Product { inverted, torsion } => json!({
                "kind": "product",
                "inverted": inverted.to_structured(),
                "torsion": pairs_json(torsion.iter()),
            }),
            SolidRing::Tower { inverted, family } => json!({
                "kind": "tower",
                "inverted": inverted.to_structured(),
                "support": family.support().to_structured(),
                "default": family.default_exp(),
                "overrides": pairs_json(family.overrides()),
            }),
        }
    }
}

impl ToStructured for ClassificationData {
    fn to_structured(&self) -> Value {
        json!({
            "kind": "scheme",
            "generic": self.has_generic(),
            "inf": self.exponents().inf().to_structured(),
            "fin": self.exponents().fin().to_structured(),
            "default": self.exponents().default_exp(),
            "overrides": pairs_json(self.exponents().overrides()),
            "closure": self.closure().to_structured(),
        })
    }
}

impl ToStructured for PointSet {
    fn to_structured(&self) -> Value {
        json!({
            "kind": "pointset",
            "Q": self.generic(),
            "line": self.line().to_structured(),
            "tors": self.torsion().to_structured(),
        })
    }
}

impl ToStructured for Stalk {
    fn to_structured(&self) -> Value {
        match *self {
            Stalk::Rationals => json!({"kind": "stalk", "type": "rationals"}),
            Stalk::LocalizedAt(p) => json!({"kind": "stalk", "type": "line", "p": p.get()}),
            Stalk::Truncation(p, e) => {
                json!({"kind": "stalk", "type": "torsion", "p": p.get(), "e": e})
            }
        }
    }
}

impl ToStructured for Spectrum {
    fn to_structured(&self) -> Value {
        let torsion = match self.torsion() {
            TorsionExponents::Finite(m) => json!({
                "kind": "finite",
                "entries": pairs_json(m.iter()),
            }),
            TorsionExponents::Family(f) => json!({
                "kind": "family",
                "support": f.support().to_structured(),
                "default": f.default_exp(),
                "overrides": pairs_json(f.overrides()),
            }),
        };
        json!({
            "kind": "spectrum",
            "generic": self.has_generic(),
            "line": self.line().to_structured(),
            "torsion": torsion,
        })
    }
}

impl ToStructured for AuditReport {
    fn to_structured(&self) -> Value {
        let row = |r: &crate::finring::AuditRow| {
            json!({"source": r.source, "target": r.target, "count": r.count})
        };
        json!({
            "kind": "audit",
            "checked": self.rows().iter().filter(|r| !r.control).count(),
            "violations": Value::Array(self.violations().into_iter().map(row).collect()),
            "control": Value::Array(
                self.rows().iter().filter(|r| r.control).map(row).collect()
            ),
            "passed": self.passed(),
        })
    }
}
