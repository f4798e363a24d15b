//! The sweep rule as a cellular automaton over the lattice vertices.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{CheckSet, QubitSet};
use crate::causal::{local_pattern, CausalError, Direction, Order, SweepContext};
use crate::lattice::{Coord, Label, Lattice};
use crate::seed::mix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SweepError {
    #[error("bulk vertex {vertex} has no valid rule for pattern {pattern:#010b} (direction {dir})")]
    DeadBulkPattern {
        vertex: u32,
        pattern: u8,
        dir: Direction,
    },
    #[error("rule table entry at vertex {vertex}, pattern {pattern:#010b}: {reason}")]
    BadEntry {
        vertex: u32,
        pattern: u8,
        reason: &'static str,
    },
    #[error(transparent)]
    Causal(#[from] CausalError),
}

/// How ties between several minimal candidates are broken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Uniformly at random, from a per-(trial, step, vertex) stream.
    #[default]
    Regular,
    /// Always the first candidate in table order.
    FirstCandidate,
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "regular" => Ok(Self::Regular),
            "first-candidate" => Ok(Self::FirstCandidate),
            _ => Err(format!("unknown variant '{s}' (expected regular or first-candidate)")),
        }
    }
}

/// Rule for one local geometry: indexed by the syndrome pattern over the
/// vertex's incident edges, each entry lists candidate face masks over the
/// vertex's incident faces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalRule {
    entries: Vec<Vec<u16>>,
    dead: Vec<u8>,
}

impl LocalRule {
    pub fn candidates(&self, pattern: u8) -> &[u16] {
        self.entries.get(pattern as usize).map_or(&[], |c| c.as_slice())
    }

    /// Realizable trailing patterns with no valid response.
    pub fn dead(&self) -> &[u8] {
        &self.dead
    }

    pub fn is_empty(&self) -> bool {
        self.entries.iter().all(|c| c.is_empty())
    }
}

/// The sweep rule for every vertex of a lattice in one direction.
#[derive(Debug, Clone)]
pub struct RuleTable {
    direction: Direction,
    rule_of: Vec<u32>,
    rules: Vec<LocalRule>,
    future_edges: Vec<u8>,
    future_faces: Vec<u16>,
}

/// Local boundary mask of each face at `v`, over `edges_at(v)`.
fn face_masks(lat: &Lattice, v: u32) -> Vec<u8> {
    let edges = lat.edges_at(v);
    lat.faces_at(v)
        .iter()
        .map(|&f| {
            lat.face(f)
                .edges
                .iter()
                .filter_map(|e| edges.iter().position(|x| x == e))
                .fold(0u8, |m, i| m | 1 << i)
        })
        .collect()
}

fn span(masks: &[u8]) -> [bool; 256] {
    let mut s = [false; 256];
    s[0] = true;
    for &m in masks {
        let cur = s;
        for (p, &on) in cur.iter().enumerate() {
            if on {
                s[p ^ m as usize] = true;
            }
        }
    }
    s
}

/// Diamond test on the unrolled faces: the faces' diamond equals the diamond of
/// their combined boundary at `v`, both taken in the infinite tiling. Boundary
/// vertices only need a nonzero local boundary.
fn diamond_matches(lat: &Lattice, order: &Order, v: u32, at: Coord, faces: &[u32]) -> bool {
    let mut verts = Vec::new();
    let mut steps: Vec<Coord> = Vec::new();
    for &f in faces {
        let off = lat.face_offsets(f, v);
        let i = lat.face(f).corner_of(v).unwrap();
        verts.extend(off.iter().map(|&o| at + o));
        for j in [(i + 1) % 4, (i + 3) % 4] {
            let s = off[j];
            if let Some(k) = steps.iter().position(|&x| x == s) {
                steps.swap_remove(k);
            } else {
                steps.push(s);
            }
        }
    }
    if steps.is_empty() {
        return false;
    }
    if lat.vertex(v).label != Label::Bulk {
        return true;
    }
    let mut locs = vec![at];
    locs.extend(steps.iter().map(|&s| at + s));
    let pair = |set: &[Coord]| Some((order.infimum(set).ok()?, order.supremum(set).ok()?));
    match (pair(&verts), pair(&locs)) {
        (Some(a), Some(b)) => a == b,
        _ => false,
    }
}

fn local_rule(lat: &Lattice, ctx: &SweepContext<'_>, v: u32) -> LocalRule {
    let at = lat.vertex(v).coord;
    let k = lat.edges_at(v).len();
    let faces = lat.faces_at(v);
    let masks = face_masks(lat, v);
    let realizable = span(&masks);
    let fe = ctx.future_edge_mask(v);
    let ff = ctx.future_face_mask(v);
    let fut: Vec<usize> = (0..faces.len()).filter(|&j| ff >> j & 1 == 1).collect();

    let mut by_pattern: HashMap<u8, Vec<u16>> = HashMap::new();
    for sub in 1u32..(1 << fut.len()) {
        let mut sel = 0u16;
        let mut m = 0u8;
        for (b, &j) in fut.iter().enumerate() {
            if sub >> b & 1 == 1 {
                sel |= 1 << j;
                m ^= masks[j];
            }
        }
        if m != 0 {
            by_pattern.entry(m).or_default().push(sel);
        }
    }

    let mut entries = vec![Vec::new(); 1 << k];
    let mut dead = Vec::new();
    for p in 1..(1usize << k) {
        let p8 = p as u8;
        if p8 & !fe != 0 {
            continue;
        }
        let mut cands: Vec<u16> = by_pattern.get(&p8).cloned().unwrap_or_default();
        cands.sort_by_key(|s| (s.count_ones(), *s));
        let valid: Vec<u16> = cands
            .into_iter()
            .filter(|&sel| {
                let fs: Vec<u32> = (0..faces.len())
                    .filter(|j| sel >> j & 1 == 1)
                    .map(|j| faces[j])
                    .collect();
                diamond_matches(lat, ctx.order(), v, at, &fs)
            })
            .collect();
        if let Some(first) = valid.first() {
            let w = first.count_ones();
            entries[p] = valid.into_iter().take_while(|s| s.count_ones() == w).collect();
        } else if realizable[p] {
            dead.push(p8);
        }
    }
    LocalRule { entries, dead }
}

/// Key identifying vertices whose rules coincide up to translation.
fn signature(lat: &Lattice, v: u32, fe: u8, ff: u16) -> Vec<i32> {
    let mut key = vec![fe as i32, ff as i32, lat.edges_at(v).len() as i32];
    for &e in lat.edges_at(v) {
        key.extend(lat.edge_step(e, v).to_array());
    }
    let at = lat.vertex(v).coord;
    key.push((at.is_center_type() as i32) * 4 + at.sum().rem_euclid(4));
    key.push(lat.vertex(v).label as i32);
    let masks = face_masks(lat, v);
    for (j, &f) in lat.faces_at(v).iter().enumerate() {
        let face = lat.face(f);
        key.push(masks[j] as i32);
        for (i, o) in lat.face_offsets(f, v).iter().enumerate() {
            key.push(face.ids[i].is_some() as i32);
            key.extend(o.to_array());
        }
    }
    key
}

impl RuleTable {
    /// Build and verify the rule for every vertex. Realizable trailing patterns
    /// without a valid response are tolerated only away from the bulk.
    pub fn build(lat: &Lattice, dir: Direction) -> Result<Self, SweepError> {
        let ctx = SweepContext::new(lat, dir);
        let nv = lat.num_vertices() as u32;
        let mut seen: HashMap<Vec<i32>, u32> = HashMap::new();
        let mut rules = Vec::new();
        let mut rule_of = Vec::with_capacity(nv as usize);
        let mut future_edges = Vec::with_capacity(nv as usize);
        let mut future_faces = Vec::with_capacity(nv as usize);
        for v in 0..nv {
            let (fe, ff) = (ctx.future_edge_mask(v), ctx.future_face_mask(v));
            future_edges.push(fe);
            future_faces.push(ff);
            let key = signature(lat, v, fe, ff);
            let id = match seen.get(&key) {
                Some(&id) => id,
                None => {
                    let id = rules.len() as u32;
                    rules.push(local_rule(lat, &ctx, v));
                    seen.insert(key, id);
                    id
                }
            };
            if lat.vertex(v).label == Label::Bulk {
                if let Some(&p) = rules[id as usize].dead.first() {
                    return Err(SweepError::DeadBulkPattern {
                        vertex: v,
                        pattern: p,
                        dir,
                    });
                }
            }
            rule_of.push(id);
        }
        Ok(Self {
            direction: dir,
            rule_of,
            rules,
            future_edges,
            future_faces,
        })
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn rule(&self, v: u32) -> &LocalRule {
        &self.rules[self.rule_of[v as usize] as usize]
    }

    /// Number of distinct local rules after sharing.
    pub fn distinct_rules(&self) -> usize {
        self.rules.len()
    }

    #[inline]
    pub fn future_edge_mask(&self, v: u32) -> u8 {
        self.future_edges[v as usize]
    }

    pub fn future_face_mask(&self, v: u32) -> u16 {
        self.future_faces[v as usize]
    }

    /// Vertices with at least one dead pattern.
    pub fn dead_vertices(&self) -> Vec<u32> {
        (0..self.rule_of.len() as u32)
            .filter(|&v| !self.rule(v).dead.is_empty())
            .collect()
    }

    /// Whether every realizable trailing pattern at `v` has a valid response.
    pub fn satisfies_trailing_condition(&self, v: u32) -> bool {
        self.rule(v).dead.is_empty()
    }

    /// Faces (global indices) of a candidate mask at `v`.
    pub fn faces_of(&self, lat: &Lattice, v: u32, mask: u16) -> Vec<u32> {
        lat.faces_at(v)
            .iter()
            .enumerate()
            .filter(|(j, _)| mask >> j & 1 == 1)
            .map(|(_, &f)| f)
            .collect()
    }

    /// Re-check every stored entry against the lattice from scratch.
    pub fn verify(&self, lat: &Lattice) -> Result<(), SweepError> {
        let ctx = SweepContext::new(lat, self.direction);
        for v in 0..lat.num_vertices() as u32 {
            let at = lat.vertex(v).coord;
            let masks = face_masks(lat, v);
            let realizable = span(&masks);
            let fe = ctx.future_edge_mask(v);
            let ff = ctx.future_face_mask(v);
            let rule = self.rule(v);
            let k = lat.edges_at(v).len();
            for p in 1..(1usize << k) {
                let p8 = p as u8;
                let cands = rule.candidates(p8);
                let bad = |reason| SweepError::BadEntry {
                    vertex: v,
                    pattern: p8,
                    reason,
                };
                if p8 & !fe != 0 {
                    if !cands.is_empty() {
                        return Err(bad("pattern outside the future has an action"));
                    }
                    continue;
                }
                if cands.is_empty() && realizable[p] && !rule.dead.contains(&p8) {
                    return Err(bad("realizable pattern has no action"));
                }
                for &c in cands {
                    if c & !ff != 0 {
                        return Err(bad("face outside the future"));
                    }
                    let m = (0..masks.len())
                        .filter(|j| c >> j & 1 == 1)
                        .fold(0u8, |m, j| m ^ masks[j]);
                    if m != p8 {
                        return Err(bad("local boundary does not match the pattern"));
                    }
                    let fs = self.faces_of(lat, v, c);
                    if !diamond_matches(lat, ctx.order(), v, at, &fs) {
                        return Err(bad("diamond of the response differs from the pattern's"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Test hook: replace the first nonempty entry with its complement inside
    /// the vertex's incident faces.
    #[doc(hidden)]
    pub fn corrupt_for_test(&mut self) {
        for r in &mut self.rules {
            for e in &mut r.entries {
                if let Some(c) = e.first_mut() {
                    *c = !*c & 0x0fff;
                    return;
                }
            }
        }
    }
}

/// The automaton's state between steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepState {
    pub syndrome: CheckSet,
    pub correction: QubitSet,
    pub time: u64,
}

impl SweepState {
    pub fn new(lat: &Lattice, syndrome: CheckSet) -> Self {
        assert_eq!(syndrome.len(), lat.num_edges());
        Self {
            syndrome,
            correction: lat.zero_qubits(),
            time: 0,
        }
    }
}

/// Tie-break draw for vertex `v` at step `t` of the trial seeded with `seed`.
#[inline]
pub fn choice(seed: u64, t: u64, v: u32, n: usize) -> usize {
    (mix(seed ^ mix(t ^ mix(v as u64 ^ 0x5851_f42d_4c95_7f2d))) % n as u64) as usize
}

/// Reusable scratch space for sweep steps on one lattice.
#[derive(Debug, Clone)]
pub struct Sweeper {
    mark: Vec<u64>,
    epoch: u64,
    active: Vec<u32>,
    out: Vec<u32>,
}

impl Sweeper {
    pub fn new(lat: &Lattice) -> Self {
        Self {
            mark: vec![0; lat.num_vertices()],
            epoch: 0,
            active: Vec::new(),
            out: Vec::new(),
        }
    }

    /// One synchronous application of the rule at every vertex. Returns the
    /// faces flipped (each vertex's response, concatenated).
    pub fn step(
        &mut self,
        lat: &Lattice,
        table: &RuleTable,
        state: &mut SweepState,
        variant: Variant,
        seed: u64,
    ) -> &[u32] {
        self.epoch += 1;
        self.active.clear();
        self.out.clear();
        for e in state.syndrome.iter_ones() {
            for v in lat.edge(e as u32).ends {
                if self.mark[v as usize] != self.epoch {
                    self.mark[v as usize] = self.epoch;
                    self.active.push(v);
                }
            }
        }
        for &v in &self.active {
            let pat = local_pattern(lat, &state.syndrome, v);
            if pat & !table.future_edge_mask(v) != 0 {
                continue;
            }
            let cands = table.rule(v).candidates(pat);
            let pick = match cands.len() {
                0 => continue,
                1 => cands[0],
                n => match variant {
                    Variant::Regular => cands[choice(seed, state.time, v, n)],
                    Variant::FirstCandidate => cands[0],
                },
            };
            let faces = lat.faces_at(v);
            let mut m = pick;
            while m != 0 {
                let j = m.trailing_zeros() as usize;
                m &= m - 1;
                self.out.push(faces[j]);
            }
        }
        for &f in &self.out {
            state.correction.flip(f as usize);
            lat.add_face_boundary(&mut state.syndrome, f);
        }
        state.time += 1;
        &self.out
    }
}

/// Single step without reusable scratch; returns φ(T) as a face set.
pub fn sweep_step(
    lat: &Lattice,
    table: &RuleTable,
    state: &mut SweepState,
    variant: Variant,
    seed: u64,
) -> QubitSet {
    let mut sw = Sweeper::new(lat);
    let faces = sw.step(lat, table, state, variant, seed);
    QubitSet::from_indices(lat.num_faces(), faces.iter().map(|&f| f as usize))
}

/// Rule tables for all eight directions, indexed by `Direction::index`.
#[derive(Debug, Clone)]
pub struct Tables {
    by_index: Vec<RuleTable>,
}

impl Tables {
    pub fn build(lat: &Lattice) -> Result<Self, SweepError> {
        let mut by_index: Vec<Option<RuleTable>> = vec![None; 8];
        for i in 0..8 {
            by_index[i] = Some(RuleTable::build(lat, Direction::from_index(i))?);
        }
        Ok(Self {
            by_index: by_index.into_iter().map(Option::unwrap).collect(),
        })
    }

    pub fn get(&self, d: Direction) -> &RuleTable {
        &self.by_index[d.index()]
    }

    pub fn verify(&self, lat: &Lattice) -> Result<(), SweepError> {
        self.by_index.iter().try_for_each(|t| t.verify(lat))
    }

    #[doc(hidden)]
    pub fn get_mut(&mut self, d: Direction) -> &mut RuleTable {
        &mut self.by_index[d.index()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_syndrome_is_fixed_point() {
        let lat = Lattice::rhombic_periodic(4).unwrap();
        let t = RuleTable::build(&lat, Direction::ALL[0]).unwrap();
        let mut s = SweepState::new(&lat, lat.zero_checks());
        let phi = sweep_step(&lat, &t, &mut s, Variant::Regular, 1);
        assert!(phi.is_zero());
        assert!(s.syndrome.is_zero() && s.correction.is_zero());
    }

    #[test]
    fn choice_in_range() {
        for v in 0..100 {
            assert!(choice(7, 3, v, 3) < 3);
        }
    }

    #[test]
    fn tables_verify_on_small_lattices() {
        for lat in [
            Lattice::rhombic_periodic(2).unwrap(),
            Lattice::cubic_periodic(3).unwrap(),
            Lattice::rhombic_open(3).unwrap(),
            Lattice::cubic_open(3).unwrap(),
        ] {
            let t = Tables::build(&lat).unwrap();
            t.verify(&lat).unwrap();
        }
    }

    #[test]
    fn corrupted_table_fails_verification() {
        let lat = Lattice::cubic_periodic(3).unwrap();
        let mut t = RuleTable::build(&lat, Direction::ALL[0]).unwrap();
        t.corrupt_for_test();
        assert!(t.verify(&lat).is_err());
    }
}
