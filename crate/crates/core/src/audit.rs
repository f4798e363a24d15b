//! Exhaustive and randomized checks of the order, the rule tables and the
//! sweep dynamics. Used by `sweep --selftest` and the test suites.

use std::collections::HashSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bits::{CheckSet, QubitSet};
use crate::causal::{causal_region, local_pattern, support, syndrome_distances_from, Direction, SweepContext};
use crate::lattice::{Family, Label, Lattice, Side};
use crate::sweep::{RuleTable, SweepState, Sweeper, Tables, Variant};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, result: Result<String, String>) -> Self {
        let (passed, detail) = match result {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        Self {
            name: name.into(),
            passed,
            detail,
        }
    }
}

/// Faces within one step of `v`: the faces at `v` and at its neighbours.
fn faces_near(lat: &Lattice, v: u32) -> Vec<u32> {
    let mut fs: Vec<u32> = lat.faces_at(v).to_vec();
    for &e in lat.edges_at(v) {
        fs.extend_from_slice(lat.faces_at(lat.other_end(e, v)));
    }
    fs.sort();
    fs.dedup();
    fs
}

/// Largest coordinate extent of a vertex set, in lattice units (minimal
/// images on a torus).
pub fn extent(lat: &Lattice, vs: &[u32]) -> f64 {
    let Some(&first) = vs.first() else { return 0.0 };
    let base = lat.vertex(first).coord;
    let img = |v: i32, b: i32| match lat.period() {
        Some(p) => b + (v - b + p / 2).rem_euclid(p) - p / 2,
        None => v,
    };
    (0..3)
        .map(|a| {
            let it = vs.iter().map(|&v| img(lat.vertex(v).coord.axis(a), base.axis(a)));
            it.clone().max().unwrap() - it.min().unwrap()
        })
        .max()
        .unwrap_or(0) as f64
        / 2.0
}

fn error_vertices(lat: &Lattice, err: &QubitSet) -> Vec<u32> {
    let mut vs: Vec<u32> = err.iter_ones().flat_map(|f| lat.face(f as u32).vertices()).collect();
    vs.sort();
    vs.dedup();
    vs
}

/// A random error of 1 to `max_faces` faces near a random vertex whose
/// vertices span less than `max_extent` lattice units.
pub fn random_local_error<R: Rng>(lat: &Lattice, max_faces: usize, max_extent: f64, rng: &mut R) -> QubitSet {
    loop {
        let v = rng.random_range(0..lat.num_vertices() as u32);
        let near = faces_near(lat, v);
        let k = rng.random_range(1..=max_faces.min(near.len()));
        let picks: Vec<usize> = near.choose_multiple(rng, k).map(|&f| f as usize).collect();
        let err = QubitSet::from_indices(lat.num_faces(), picks);
        if extent(lat, &error_vertices(lat, &err)) < max_extent {
            return err;
        }
    }
}

/// Half the linear size: the bound on the extent of a local region.
pub fn local_extent(lat: &Lattice) -> f64 {
    lat.size() as f64 / 2.0
}

/// Conditions on the order and a direction's rule table.
fn conditions(lat: &Lattice, tables: &Tables, d: Direction, rng: &mut ChaCha8Rng) -> Result<String, String> {
    let ctx = SweepContext::new(lat, d);
    let order = ctx.order();
    // bounds exist for small vertex sets
    let mut tested = 0;
    while tested < 50 {
        let v = rng.random_range(0..lat.num_vertices() as u32);
        let mut set = vec![v];
        for &e in lat.edges_at(v) {
            if rng.random_bool(0.5) {
                set.push(lat.other_end(e, v));
            }
        }
        if extent(lat, &set) >= local_extent(lat) {
            continue;
        }
        tested += 1;
        let lo = ctx.infimum(&set).map_err(|e| format!("{d}: {e}"))?;
        let hi = ctx.supremum(&set).map_err(|e| format!("{d}: {e}"))?;
        let lifted = ctx.lift(&set).map_err(|e| e.to_string())?;
        if !lifted.iter().all(|&c| order.leq(lo.coord, c) && order.leq(c, hi.coord)) {
            return Err(format!("{d}: bounds of {set:?} do not bracket the set"));
        }
    }
    // qubits and checks are finite vertex sets of the right size
    if lat.faces().iter().any(|f| f.edges.is_empty() || f.edges.len() > 4) {
        return Err("face with no edges or more than 4".into());
    }
    // every face contains its infimum
    for f in 0..lat.num_faces() as u32 {
        let face = lat.face(f);
        let inf = order.infimum(&face.corners).map_err(|e| format!("{d}: face {f}: {e}"))?;
        if !face.corners.contains(&inf) {
            return Err(format!("{d}: face {f} does not contain its infimum"));
        }
    }
    // syndrome locality: (∂ε)|v = (∂(ε|v))|v
    for _ in 0..500 / 8 + 1 {
        let err = random_local_error(lat, 6, f64::INFINITY, rng);
        let s = lat.boundary(&err);
        for v in support(lat, &s) {
            let mut local = lat.zero_checks();
            for &f in lat.faces_at(v) {
                if err.get(f as usize) {
                    lat.add_face_boundary(&mut local, f);
                }
            }
            if local_pattern(lat, &local, v) != local_pattern(lat, &s, v) {
                return Err(format!("{d}: locality fails at vertex {v}"));
            }
        }
    }
    // trailing rule: verified entries, dead patterns only off the bulk
    let t = tables.get(d);
    t.verify(lat).map_err(|e| e.to_string())?;
    if let Some(v) = t.dead_vertices().into_iter().find(|&v| lat.vertex(v).label == Label::Bulk) {
        return Err(format!("{d}: bulk vertex {v} fails the trailing condition"));
    }
    Ok(t.dead_vertices().len().to_string())
}

/// Order and rule-table conditions for every direction.
pub fn check_conditions(lat: &Lattice, tables: &Tables, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let res = Direction::ALL
        .iter()
        .map(|&d| conditions(lat, tables, d, &mut rng))
        .collect::<Result<Vec<_>, _>>()
        .map(|v| format!("dead boundary vertices per direction: {}", v.join(",")));
    Check::new(format!("conditions {} L={}", lat.family(), lat.size()), res)
}

/// Support, propagation and removal for random local errors under one fixed
/// direction each, with the longest-chain monotone checked at every step.
pub fn check_sweep_properties(lat: &Lattice, tables: &Tables, errors: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let res = (|| {
        let mut max_steps = 0;
        let (mut i, mut skipped) = (0, 0);
        while i < errors {
            if skipped > 100 * errors {
                return Err(format!("only {i} local errors found"));
            }
            let d = Direction::ALL[i % 8];
            let ctx = SweepContext::new_order_only(lat, d);
            let err = random_local_error(lat, 4, local_extent(lat), &mut rng);
            let s0 = lat.boundary(&err);
            if s0.is_zero() {
                continue;
            }
            let verts = support(lat, &s0);
            let diamond = ctx.causal_diamond(&verts).map_err(|e| e.to_string())?;
            if extent(lat, &diamond) >= local_extent(lat) {
                skipped += 1;
                continue;
            }
            let diamond: HashSet<u32> = diamond.into_iter().collect();
            let top = ctx
                .lift(&verts)
                .and_then(|c| ctx.order().supremum(&c))
                .map_err(|e| e.to_string())?;
            let dist = syndrome_distances_from(lat, &s0);
            let monotone = |s: &CheckSet| -> Result<usize, String> {
                if s.is_zero() {
                    return Ok(0);
                }
                ctx.chain_length(verts[0], &support(lat, s), top).map_err(|e| e.to_string())
            };
            let f0 = monotone(&s0)?;
            let mut prev = f0;
            let mut st = SweepState::new(lat, s0.clone());
            let mut sw = Sweeper::new(lat);
            let mut t = 0;
            while !st.syndrome.is_zero() {
                if t > f0 {
                    return Err(format!("error {i} ({d}): syndrome survives past {f0} steps"));
                }
                sw.step(lat, tables.get(d), &mut st, Variant::Regular, seed ^ i as u64);
                t += 1;
                if let Some(v) = support(lat, &st.syndrome).into_iter().find(|v| !diamond.contains(v)) {
                    return Err(format!("error {i} ({d}): vertex {v} left the diamond at step {t}"));
                }
                if let Some(e) = st.syndrome.iter_ones().find(|&e| dist[e] as usize > t) {
                    return Err(format!("error {i} ({d}): edge {e} at distance {} after {t} steps", dist[e]));
                }
                let f = monotone(&st.syndrome)?;
                if f >= prev && f != 0 {
                    return Err(format!("error {i} ({d}): monotone {prev} -> {f}"));
                }
                prev = f;
            }
            if lat.boundary(&st.correction) != s0 {
                return Err(format!("error {i} ({d}): correction boundary mismatch"));
            }
            max_steps = max_steps.max(t);
            i += 1;
        }
        Ok(format!("{errors} errors, max removal time {max_steps}"))
    })();
    Check::new(format!("sweep properties {} L={}", lat.family(), lat.size()), res)
}

/// Directions each of the six sides admits at every vertex on it that lies on
/// no other rough side (smooth sides: on no rough side at all).
pub fn direction_table(lat: &Lattice, tables: &Tables) -> Vec<(Side, Vec<Direction>)> {
    let fam = lat.family();
    Side::all()
        .map(|s| {
            let vs: Vec<u32> = (0..lat.num_vertices() as u32)
                .filter(|&v| {
                    let sides = lat.vertex(v).sides;
                    sides.contains(s) && sides.iter().all(|t| t == s || !fam.side_is_rough(t))
                })
                .collect();
            let ok = Direction::ALL
                .iter()
                .copied()
                .filter(|&d| vs.iter().all(|&v| tables.get(d).satisfies_trailing_condition(v)))
                .collect();
            (s, ok)
        })
        .collect()
}

/// The expected table: rough sides admit the four outward directions, smooth
/// sides the four inward ones.
pub fn expected_directions(fam: Family, s: Side) -> Vec<Direction> {
    let outward = if s.high { 1 } else { -1 };
    let want = if fam.side_is_rough(s) { outward } else { -outward };
    Direction::ALL
        .iter()
        .copied()
        .filter(|d| d.signs()[s.axis as usize] == want)
        .collect()
}

pub fn check_direction_table(lat: &Lattice, tables: &Tables) -> Check {
    let fam = lat.family();
    let res = direction_table(lat, tables)
        .into_iter()
        .map(|(s, ok)| {
            let want = expected_directions(fam, s);
            if ok == want {
                Ok(())
            } else {
                Err(format!("side {s:?}: got {ok:?}, want {want:?}"))
            }
        })
        .collect::<Result<Vec<_>, _>>()
        .map(|_| "6 sides match".to_string());
    Check::new(format!("direction table {} L={}", fam, lat.size()), res)
}

/// Whether the causal region of `s` over all directions fits in a local region.
pub fn region_is_local(lat: &Lattice, s: &CheckSet) -> bool {
    causal_region(lat, &Direction::ALL, &support(lat, s)).is_ok_and(|r| extent(lat, &r) < local_extent(lat))
}

/// Some direction makes every vertex of the syndrome's causal region satisfy
/// the trailing condition.
pub fn witness_direction(lat: &Lattice, tables: &Tables, order: &[Direction], s: &CheckSet) -> Option<Direction> {
    let region = causal_region(lat, order, &support(lat, s)).ok()?;
    Direction::ALL
        .iter()
        .copied()
        .find(|&d| region.iter().all(|&v| tables.get(d).satisfies_trailing_condition(v)))
}

pub fn check_witness(lat: &Lattice, tables: &Tables, syndromes: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let res = (|| {
        let (mut done, mut rejected) = (0, 0usize);
        while done < syndromes {
            if rejected > 1000 * syndromes {
                return Err(format!("only {done} local syndromes found"));
            }
            let s = lat.boundary(&random_local_error(lat, 3, local_extent(lat), &mut rng));
            if s.is_zero() {
                continue;
            }
            if !region_is_local(lat, &s) {
                rejected += 1;
                continue;
            }
            if witness_direction(lat, tables, &Direction::ALL, &s).is_none() {
                return Err(format!("no direction for syndrome {s:?}"));
            }
            done += 1;
        }
        Ok(format!("{syndromes} local syndromes ({rejected} with non-local regions skipped)"))
    })();
    Check::new(format!("direction witness {} L={}", lat.family(), lat.size()), res)
}

/// Corrupting a rule table must be caught by verification.
pub fn check_fault_injection() -> Check {
    let res = (|| {
        let lat = Lattice::rhombic_periodic(2).map_err(|e| e.to_string())?;
        let mut t = RuleTable::build(&lat, Direction::ALL[0]).map_err(|e| e.to_string())?;
        t.corrupt_for_test();
        match t.verify(&lat) {
            Err(e) => Ok(format!("rejected: {e}")),
            Ok(()) => Err("corrupted table passed verification".into()),
        }
    })();
    Check::new("fault injection", res)
}

/// The whole suite on the standard small lattices.
pub fn selftest(seed: u64) -> Vec<Check> {
    let mut out = Vec::new();
    let cases = [
        (Family::RhombicPeriodic, 2),
        (Family::RhombicPeriodic, 4),
        (Family::RhombicOpen, 3),
        (Family::RhombicOpen, 5),
        (Family::CubicPeriodic, 4),
        (Family::CubicOpen, 4),
    ];
    for (fam, l) in cases {
        let lat = match fam.build(l) {
            Ok(lat) => lat,
            Err(e) => {
                out.push(Check::new(format!("build {fam} L={l}"), Err(e.to_string())));
                continue;
            }
        };
        let tables = match Tables::build(&lat) {
            Ok(t) => t,
            Err(e) => {
                out.push(Check::new(format!("tables {fam} L={l}"), Err(e.to_string())));
                continue;
            }
        };
        out.push(check_conditions(&lat, &tables, seed));
        if fam.is_periodic() && l >= 4 {
            out.push(check_sweep_properties(&lat, &tables, 500, seed));
        }
        if fam == Family::RhombicOpen && l >= 4 {
            out.push(check_direction_table(&lat, &tables));
            if l == 5 {
                out.push(check_witness(&lat, &tables, 1000, seed));
            }
        }
    }
    if let Ok(lat) = Lattice::rhombic_periodic(6) {
        if let Ok(t) = Tables::build(&lat) {
            out.push(check_sweep_properties(&lat, &t, 500, seed));
        }
    }
    out.push(check_fault_injection());
    out
}
