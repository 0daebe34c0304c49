//! End-to-end checks of every advertised guarantee, one test per criterion.
//! Each prints a single PASS/FAIL line so a log shows the whole scorecard.

use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::time::Instant;

use subterminal::finring::{hom_count_to_table, table_corpus, table_of};
use subterminal::scheme::{affine_union, scheme_hom_exists, symdiff_points};
use subterminal::spectrum::{is_open_affine, spectrum_of};
use subterminal::textio::{
    parse_pointset, parse_primeset, parse_ring, parse_scheme, print_pointset, print_primeset,
    print_ring, print_scheme,
};
use subterminal::{
    canonicalize, count_homs, hom_exists_to_table, ring_hom_exists, sample, solidity_audit,
    ClassificationData, Exponent, ExponentMap, Factorization, PointSet, Prime, PrimeSet,
    RawSolidRing, SolidRing, SpecPoint, Stalk,
};

fn criterion(n: usize, name: &str, f: impl FnOnce() -> Result<(), String>) {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => println!("acceptance {n} ({name}): PASS"),
        Ok(Err(msg)) => {
            println!("acceptance {n} ({name}): FAIL");
            panic!("acceptance {n} ({name}): {msg}");
        }
        Err(payload) => {
            println!("acceptance {n} ({name}): FAIL");
            resume_unwind(payload);
        }
    }
}

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err(format!($($arg)+));
        }
    };
}

fn s(e: subterminal::Error) -> String {
    e.to_string()
}

fn p(n: u64) -> Prime {
    Prime::new(n).unwrap()
}

fn cyclic(n: u64) -> SolidRing {
    canonicalize(RawSolidRing::Cyclic(n)).unwrap()
}

#[test]
fn c1_every_claimed_solid_ring_admits_at_most_one_map() {
    criterion(1, "solidity audit", || {
        let start = Instant::now();
        let report = solidity_audit(16, 200, 2024).map_err(s)?;
        let elapsed = start.elapsed();
        ensure!(report.passed(), "audit failed:\n{}", report.render_text());
        let checked = report.rows().iter().filter(|r| !r.control).count();
        ensure!(checked >= 8000, "only {checked} pairs were checked");
        let control: Vec<_> = report.rows().iter().filter(|r| r.control).collect();
        ensure!(
            control.len() == 1 && control[0].count == 2,
            "control row is wrong: {control:?}"
        );
        ensure!(elapsed.as_secs() < 60, "audit took {elapsed:?}");
        Ok(())
    });
}

#[test]
fn c2_symbolic_hom_counts_match_exhaustive_search() {
    criterion(2, "finite hom counts", || {
        let targets = table_corpus(16).map_err(s)?;
        let mut pairs = 0usize;
        for n in 1..=60u64 {
            let b = cyclic(n);
            let bt = table_of(&b).map_err(s)?.expect("cyclic rings are finite");
            for t in &targets {
                let brute = count_homs(&bt, t);
                ensure!(brute <= 1, "{b} -> {} has {brute} maps", t.name());
                ensure!(
                    hom_count_to_table(&b, t) == brute,
                    "count mismatch for {b} -> {}",
                    t.name()
                );
                ensure!(
                    hom_exists_to_table(&b, t) == (brute > 0),
                    "existence mismatch for {b} -> {}",
                    t.name()
                );
                pairs += 1;
            }
        }
        ensure!(pairs >= 2000, "only {pairs} pairs were checked");
        Ok(())
    });
}

#[test]
fn c3_ring_maps_are_scheme_maps_reversed() {
    criterion(3, "spectrum duality", || {
        let rings: Vec<SolidRing> = (1..=48).map(cyclic).collect();
        let tables: Vec<_> = rings
            .iter()
            .map(|r| table_of(r).unwrap().expect("cyclic rings are finite"))
            .collect();
        for (a, ta) in rings.iter().zip(&tables) {
            for (b, tb) in rings.iter().zip(&tables) {
                let scheme_map =
                    scheme_hom_exists(&a.classification_data(), &b.classification_data());
                let ring_map = count_homs(tb, ta) > 0;
                ensure!(
                    scheme_map == ring_map,
                    "Spec {a} -> Spec {b}: criterion {scheme_map}, tables {ring_map}"
                );
                ensure!(
                    ring_hom_exists(b, a) == ring_map,
                    "ring criterion disagrees on {b} -> {a}"
                );
            }
        }
        // Infinite sources against finite targets: the scheme criterion must
        // match the table-level decision there too.
        let mut rng = sample::rng(33);
        for _ in 0..200 {
            let b = sample::symbolic_ring(&mut rng);
            let db = b.classification_data();
            for (a, ta) in rings.iter().zip(&tables).take(30) {
                let via_scheme = scheme_hom_exists(&a.classification_data(), &db);
                ensure!(
                    via_scheme == hom_exists_to_table(&b, ta),
                    "Spec {a} -> Spec {b}: criterion and table decision disagree"
                );
                ensure!(
                    ring_hom_exists(&b, a) == via_scheme,
                    "ring criterion disagrees on {b} -> {a}"
                );
            }
        }
        Ok(())
    });
}

#[test]
fn c4_localization_is_lawful() {
    criterion(4, "localization", || {
        let mut rng = sample::rng(41);
        for i in 0..10_000 {
            let r = sample::solid_ring(&mut rng);
            let t1 = sample::prime_set(&mut rng);
            let t2 = sample::prime_set(&mut rng);
            ensure!(r.localize(&PrimeSet::empty()) == r, "identity failed at step {i}");
            ensure!(
                r.localize(&t1).localize(&t2) == r.localize(&t1.union(&t2)),
                "composition failed at step {i} for {r}"
            );
        }
        // Universal property, checked against tables: maps out of Z/12 with
        // 2 inverted are exactly the maps out of Z/12 landing where 2 is a
        // unit, and Z/12 localized at 2 is Z/3.
        let twelve = cyclic(12);
        let loc = twelve.localize(&PrimeSet::finite([p(2)]));
        ensure!(loc == cyclic(3), "Z/12 localized at 2 is {loc}");
        let lt = table_of(&loc).map_err(s)?.unwrap();
        let tt = table_of(&twelve).map_err(s)?.unwrap();
        for t in table_corpus(16).map_err(s)? {
            let direct = count_homs(&lt, &t);
            let expected = if t.is_unit(t.int(2)) { count_homs(&tt, &t) } else { 0 };
            ensure!(
                direct == expected,
                "universal property fails into {}: {direct} vs {expected}",
                t.name()
            );
        }
        Ok(())
    });
}

fn intersect_points(a: &PointSet, b: &PointSet) -> PointSet {
    PointSet::new(
        a.generic() && b.generic(),
        a.line().intersect(b.line()),
        a.torsion().intersect(b.torsion()),
    )
}

#[test]
fn c5_both_openness_routes_agree() {
    criterion(5, "topology", || {
        let mut rng = sample::rng(55);
        let mut per_type = [0usize; 5];
        let mut rounds = 0usize;
        while per_type.iter().any(|&c| c < 1000) {
            rounds += 1;
            ensure!(rounds < 200_000, "poor type coverage: {per_type:?}");
            let r = sample::solid_ring(&mut rng);
            let idx = match &r {
                SolidRing::Zero => 0,
                SolidRing::Cyclic(_) => 1,
                SolidRing::Localized(_) => 2,
                SolidRing::Product { .. } => 3,
                SolidRing::Tower { .. } => 4,
            };
            if per_type[idx] >= 1000 {
                continue;
            }
            per_type[idx] += 1;
            let d = r.classification_data();
            let both_open = |u: &PointSet| -> Result<bool, String> {
                let affine = is_open_affine(&r, u).map_err(s)?;
                let scheme = d.is_open(u).map_err(s)?;
                ensure!(affine == scheme, "routes disagree on {u:?} in {r}");
                Ok(affine)
            };
            // The empty set and the whole space are open.
            ensure!(both_open(&PointSet::empty())?, "the empty set is not open in {r}");
            ensure!(both_open(&d.points())?, "the whole spectrum is not open in {r}");
            // A family of sampled opens is closed under union and intersection.
            let u1 = sample::open_set(&mut rng, &d);
            let u2 = sample::open_set(&mut rng, &d);
            let u3 = sample::open_set(&mut rng, &d);
            for u in [&u1, &u2, &u3] {
                ensure!(both_open(u)?, "sampled open set rejected: {u:?} in {r}");
            }
            ensure!(both_open(&u1.union(&u2))?, "a union of opens is not open in {r}");
            ensure!(
                both_open(&u1.union(&u2).union(&u3))?,
                "a triple union of opens is not open in {r}"
            );
            ensure!(
                both_open(&intersect_points(&u1, &u2))?,
                "an intersection of opens is not open in {r}"
            );
            ensure!(
                both_open(&intersect_points(&intersect_points(&u1, &u2), &u3))?,
                "a triple intersection of opens is not open in {r}"
            );
            // An arbitrary representable subset gets the same verdict on
            // both routes, whatever that verdict is.
            let v = sample::point_subset(&mut rng, &d);
            both_open(&v)?;
        }
        Ok(())
    });
}

#[test]
fn c6_charts_glue() {
    criterion(6, "chart gluing", || {
        let mut rng = sample::rng(66);
        let mut generic_pairs = 0usize;
        let mut rounds = 0usize;
        while generic_pairs < 1000 {
            rounds += 1;
            ensure!(rounds < 100_000, "not enough affine chart pairs found");
            let r = sample::solid_ring(&mut rng);
            let d = r.classification_data();
            let u1 = sample::open_set(&mut rng, &d);
            let u2 = sample::open_set(&mut rng, &d);
            let (Some(c1), Some(c2)) =
                (d.chart_ring(&u1).map_err(s)?, d.chart_ring(&u2).map_err(s)?)
            else {
                continue;
            };
            let d1 = c1.classification_data();
            let d2 = c2.classification_data();
            ensure!(
                d1.points() == u1 && d2.points() == u2,
                "chart ring has the wrong spectrum for {r}"
            );
            let sd = symdiff_points(&d1, &d2)
                .map_err(|e| format!("symdiff of charts of {r} failed: {e}"))?;
            let expected = PointSet::new(
                u1.generic() != u2.generic(),
                u1.line().symmetric_difference(u2.line()),
                u1.torsion().symmetric_difference(u2.torsion()),
            );
            ensure!(sd == expected, "symdiff wrong for charts of {r}");
            if u1.generic() && u2.generic() {
                generic_pairs += 1;
                ensure!(
                    sd.line().is_finite() && sd.torsion().is_finite(),
                    "two charts around the generic point differ infinitely in {r}"
                );
            }
            let glued = affine_union(&c1, &c2)
                .map_err(|e| format!("union of charts of {r} failed: {e}"))?;
            ensure!(
                spectrum_of(&glued).points() == u1.union(&u2),
                "union spectrum is not the union of the charts in {r}"
            );
        }
        Ok(())
    });
}

#[test]
fn c7_towers_exhaust_their_schemes() {
    criterion(7, "affine towers", || {
        let start = Instant::now();
        let mut rng = sample::rng(77);
        for _ in 0..500 {
            let d = sample::classification_data(&mut rng);
            let stages = d.tower(25).map_err(s)?;
            ensure!(
                !stages.is_empty() && stages.len() <= 26,
                "bad stage count {} for {d:?}",
                stages.len()
            );
            for (points, ring) in &stages {
                ensure!(d.is_open(points).map_err(s)?, "stage not open in {d:?}");
                ensure!(
                    &ring.classification_data().points() == points,
                    "stage ring has the wrong spectrum in {d:?}"
                );
            }
            for w in stages.windows(2) {
                ensure!(
                    w[0].0.is_subset_of(&w[1].0) && w[0].0 != w[1].0,
                    "stages not strictly nested in {d:?}"
                );
                let new_line = w[1].0.line().difference(w[0].0.line());
                let new_tors = w[1].0.torsion().difference(w[0].0.torsion());
                ensure!(
                    new_line.is_finite() && new_tors.is_finite(),
                    "a stage added infinitely many points in {d:?}"
                );
                let gained = new_line.iter_members().count()
                    + new_tors.iter_members().count()
                    + usize::from(w[1].0.generic() && !w[0].0.generic());
                ensure!(gained == 1, "a stage added {gained} points in {d:?}");
            }
            if stages.len() < 26 {
                let (last_points, last_ring) = stages.last().unwrap();
                ensure!(
                    d.points() == *last_points,
                    "tower stopped before exhausting {d:?}"
                );
                // A tower that saturates has built the whole scheme, so the
                // scheme is affine and the final chart is its ring.
                ensure!(
                    d.affine_ring().map_err(s)?.as_ref() == Some(last_ring),
                    "saturated tower does not end at the affine model of {d:?}"
                );
            }
        }
        ensure!(start.elapsed().as_secs() < 30, "towers took {:?}", start.elapsed());
        Ok(())
    });
}

#[test]
fn c8_canonical_forms_round_trip() {
    criterion(8, "round trips", || {
        let mut rng = sample::rng(88);
        for _ in 0..10_000 {
            let r = sample::solid_ring(&mut rng);
            ensure!(
                r.classification_data().affine_ring().map_err(s)? == Some(r.clone()),
                "classification round trip failed for {r}"
            );
            let printed = print_ring(&r);
            ensure!(
                parse_ring(&printed).map_err(s)? == r,
                "ring grammar round trip failed for {printed}"
            );
            let ps = sample::prime_set(&mut rng);
            ensure!(
                parse_primeset(&print_primeset(&ps)).map_err(s)? == ps,
                "prime set grammar round trip failed for {ps}"
            );
            let d = sample::classification_data(&mut rng);
            ensure!(
                parse_scheme(&print_scheme(&d)).map_err(s)? == d,
                "scheme grammar round trip failed for {d}"
            );
            let u = sample::point_set(&mut rng);
            ensure!(
                parse_pointset(&print_pointset(&u)).map_err(s)? == u,
                "point set grammar round trip failed for {u}"
            );
        }
        Ok(())
    });
}

#[test]
fn c9_classification_data_invariants_hold() {
    criterion(9, "data invariants", || {
        // Line points force a generic point.
        let line_only = ExponentMap::new(PrimeSet::finite([p(2)]), PrimeSet::empty(), 1, [])
            .map_err(s)?;
        ensure!(
            ClassificationData::new(line_only, false, PrimeSet::empty()).is_err(),
            "a line point without a generic point was accepted"
        );
        // At most one point per prime.
        ensure!(
            ExponentMap::new(PrimeSet::finite([p(2)]), PrimeSet::finite([p(2)]), 1, []).is_err(),
            "a prime with two stalks was accepted"
        );
        // Exponents are positive and listed once.
        ensure!(
            Factorization::new([(p(2), 0)]).is_err(),
            "a zero exponent was accepted"
        );
        ensure!(
            Factorization::new([(p(2), 1), (p(2), 2)]).is_err(),
            "a duplicated prime was accepted"
        );

        let mut rng = sample::rng(99);
        for _ in 0..2000 {
            let d = sample::classification_data(&mut rng);
            ensure!(
                d.exponents().inf().intersect(d.exponents().fin()).is_empty(),
                "inf and fin overlap in {d}"
            );
            ensure!(
                d.closure().is_subset_of(&d.support()),
                "closure leaves the support in {d}"
            );
            if !d.has_generic() {
                ensure!(
                    d.exponents().inf().is_empty() && d.closure().is_empty(),
                    "a generic-free scheme kept line points or a closure set: {d}"
                );
            }
            let generic_stalk = d.stalk_at(&SpecPoint::Generic);
            ensure!(
                generic_stalk.is_ok() == d.has_generic()
                    && (!d.has_generic() || generic_stalk == Ok(Stalk::Rationals)),
                "wrong stalk at the generic point of {d}"
            );
            for q in d.support().members_below(50) {
                match d.exponents().exponent(q) {
                    Exponent::Infinite => {
                        ensure!(
                            d.stalk_at(&SpecPoint::Line(q)) == Ok(Stalk::LocalizedAt(q)),
                            "wrong line stalk at {q} in {d}"
                        );
                        ensure!(
                            d.stalk_at(&SpecPoint::Torsion(q)).is_err(),
                            "a line prime answered as torsion at {q} in {d}"
                        );
                    }
                    Exponent::Finite(e) => {
                        ensure!(
                            d.stalk_at(&SpecPoint::Torsion(q)) == Ok(Stalk::Truncation(q, e)),
                            "wrong torsion stalk at {q} in {d}"
                        );
                        ensure!(
                            d.stalk_at(&SpecPoint::Line(q)).is_err(),
                            "a torsion prime answered as a line point at {q} in {d}"
                        );
                    }
                    Exponent::Zero => {
                        return Err(format!("support member {q} has no point in {d}"));
                    }
                }
            }
        }
        Ok(())
    });
}
