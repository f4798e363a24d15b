//! Partial orders induced by a sweep direction, and the causal structure built on them.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{CheckSet, QubitSet};
use crate::lattice::{Coord, Lattice, Tiling};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CausalError {
    #[error("operation needs a nonempty set")]
    Empty,
    #[error("no infimum found for {0} vertices")]
    NoInfimum(usize),
    #[error("no supremum found for {0} vertices")]
    NoSupremum(usize),
    #[error("set spans {spread} (doubled units) on a torus of period {period}; too large to unroll")]
    TooLarge { spread: i32, period: i32 },
    #[error("unknown sweep direction '{0}'")]
    BadDirection(String),
}

/// One of the eight sweep directions (±1, ±1, ±1).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Direction([i8; 3]);

impl Direction {
    /// Default schedule order.
    pub const ALL: [Direction; 8] = [
        Direction([1, 1, 1]),
        Direction([-1, -1, -1]),
        Direction([1, -1, -1]),
        Direction([-1, 1, 1]),
        Direction([-1, 1, -1]),
        Direction([1, -1, 1]),
        Direction([-1, -1, 1]),
        Direction([1, 1, -1]),
    ];

    pub fn new(x: i8, y: i8, z: i8) -> Option<Self> {
        [x, y, z]
            .iter()
            .all(|s| s.abs() == 1)
            .then_some(Direction([x, y, z]))
    }

    pub fn signs(self) -> [i8; 3] {
        self.0
    }

    /// Dense index in 0..8 (bit i set when component i is positive).
    pub fn index(self) -> usize {
        (0..3).map(|i| ((self.0[i] > 0) as usize) << i).sum()
    }

    pub fn from_index(i: usize) -> Self {
        let s = |b: usize| if i >> b & 1 == 1 { 1 } else { -1 };
        Direction([s(0), s(1), s(2)])
    }

    pub fn reversed(self) -> Self {
        Direction(self.0.map(|s| -s))
    }

    #[inline]
    pub fn dot(self, c: Coord) -> i32 {
        self.0[0] as i32 * c.x + self.0[1] as i32 * c.y + self.0[2] as i32 * c.z
    }

    /// Coordinates in which every forward step is componentwise non-negative.
    pub fn frame(self, tiling: Tiling, c: Coord) -> [i32; 3] {
        let r = [
            self.0[0] as i32 * c.x,
            self.0[1] as i32 * c.y,
            self.0[2] as i32 * c.z,
        ];
        match tiling {
            Tiling::Cubic => r.map(|v| v.div_euclid(2)),
            Tiling::Rhombic => [
                (r[0] + r[1]).div_euclid(2),
                (r[0] + r[2]).div_euclid(2),
                (r[1] + r[2]).div_euclid(2),
            ],
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.0 {
            f.write_str(if s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for Direction {
    type Err = CausalError;
    fn from_str(s: &str) -> Result<Self, CausalError> {
        let b = s.as_bytes();
        let sign = |c: u8| match c {
            b'+' => Some(1),
            b'-' => Some(-1),
            _ => None,
        };
        if b.len() != 3 {
            return Err(CausalError::BadDirection(s.into()));
        }
        match (sign(b[0]), sign(b[1]), sign(b[2])) {
            (Some(x), Some(y), Some(z)) => Ok(Direction([x, y, z])),
            _ => Err(CausalError::BadDirection(s.into())),
        }
    }
}

impl TryFrom<String> for Direction {
    type Error = CausalError;
    fn try_from(s: String) -> Result<Self, CausalError> {
        s.parse()
    }
}

impl From<Direction> for String {
    fn from(d: Direction) -> String {
        d.to_string()
    }
}

/// The partial order of the infinite tiling under one direction.
#[derive(Debug, Clone, Copy)]
pub struct Order {
    pub tiling: Tiling,
    pub dir: Direction,
}

fn le3(a: [i32; 3], b: [i32; 3]) -> bool {
    a[0] <= b[0] && a[1] <= b[1] && a[2] <= b[2]
}

impl Order {
    pub fn new(tiling: Tiling, dir: Direction) -> Self {
        Self { tiling, dir }
    }

    pub fn height(&self, c: Coord) -> i32 {
        self.dir.dot(c)
    }

    fn frame(&self, c: Coord) -> [i32; 3] {
        self.dir.frame(self.tiling, c)
    }

    pub fn successors(&self, c: Coord) -> impl Iterator<Item = Coord> + '_ {
        self.tiling
            .steps(c)
            .filter(move |&d| self.dir.dot(d) > 0)
            .map(move |d| c + d)
    }

    pub fn predecessors(&self, c: Coord) -> impl Iterator<Item = Coord> + '_ {
        self.tiling
            .steps(c)
            .filter(move |&d| self.dir.dot(d) < 0)
            .map(move |d| c + d)
    }

    /// Everything reachable from `start` moving forward (or backward), restricted
    /// to frame coordinates inside `[lo, hi]`.
    fn cone(&self, start: Coord, forward: bool, lo: [i32; 3], hi: [i32; 3]) -> HashSet<Coord> {
        let mut seen = HashSet::new();
        let f = self.frame(start);
        if !le3(lo, f) || !le3(f, hi) {
            return seen;
        }
        let mut queue = VecDeque::from([start]);
        seen.insert(start);
        while let Some(c) = queue.pop_front() {
            let next: Vec<Coord> = if forward {
                self.successors(c).collect()
            } else {
                self.predecessors(c).collect()
            };
            for n in next {
                let f = self.frame(n);
                if le3(lo, f) && le3(f, hi) && seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
        seen
    }

    /// `a ⪯ b`: a forward path leads from `a` to `b`.
    pub fn leq(&self, a: Coord, b: Coord) -> bool {
        if a == b {
            return true;
        }
        let (fa, fb) = (self.frame(a), self.frame(b));
        if !le3(fa, fb) {
            return false;
        }
        self.cone(a, true, fa, fb).contains(&b)
    }

    fn bound(&self, set: &[Coord], lower: bool) -> Result<Coord, CausalError> {
        let n = set.len();
        let err = || {
            if lower {
                CausalError::NoInfimum(n)
            } else {
                CausalError::NoSupremum(n)
            }
        };
        let first = *set.first().ok_or(CausalError::Empty)?;
        if set.iter().all(|&c| c == first) {
            return Ok(first);
        }
        let frames: Vec<[i32; 3]> = set.iter().map(|&c| self.frame(c)).collect();
        let ext = |pick: fn(i32, i32) -> i32| {
            let mut m = frames[0];
            for f in &frames[1..] {
                for i in 0..3 {
                    m[i] = pick(m[i], f[i]);
                }
            }
            m
        };
        let (mn, mx) = (ext(i32::min), ext(i32::max));
        for slack in [2, 4, 8, 16] {
            let (lo, hi) = if lower {
                (mn.map(|v| v - slack), mx)
            } else {
                (mn, mx.map(|v| v + slack))
            };
            let mut common: Option<HashSet<Coord>> = None;
            for &c in set {
                let cone = self.cone(c, !lower, lo, hi);
                common = Some(match common {
                    None => cone,
                    Some(acc) => acc.intersection(&cone).copied().collect(),
                });
            }
            let common = common.unwrap_or_default();
            if common.is_empty() {
                continue;
            }
            let key = |c: &Coord| (self.height(*c), *c);
            let best = if lower {
                *common.iter().max_by_key(|c| key(c)).unwrap()
            } else {
                *common.iter().min_by_key(|c| key(c)).unwrap()
            };
            let reach = self.cone(best, !lower, lo, hi);
            return if common.iter().all(|c| reach.contains(c)) {
                Ok(best)
            } else {
                Err(err())
            };
        }
        Err(err())
    }

    pub fn infimum(&self, set: &[Coord]) -> Result<Coord, CausalError> {
        self.bound(set, true)
    }

    pub fn supremum(&self, set: &[Coord]) -> Result<Coord, CausalError> {
        self.bound(set, false)
    }

    /// `{ z : lo ⪯ z ⪯ hi }`.
    pub fn interval(&self, lo: Coord, hi: Coord) -> HashSet<Coord> {
        let (fl, fh) = (self.frame(lo), self.frame(hi));
        let up = self.cone(lo, true, fl, fh);
        let down = self.cone(hi, false, fl, fh);
        up.intersection(&down).copied().collect()
    }

    pub fn diamond(&self, set: &[Coord]) -> Result<HashSet<Coord>, CausalError> {
        let lo = self.infimum(set)?;
        let hi = self.supremum(set)?;
        Ok(self.interval(lo, hi))
    }

    /// Length (in edges) of the longest forward path from `lo` to `hi`.
    pub fn longest_chain(&self, lo: Coord, hi: Coord) -> Option<usize> {
        let inside = self.interval(lo, hi);
        let mut nodes: Vec<Coord> = inside.iter().copied().collect();
        if nodes.is_empty() {
            return None;
        }
        nodes.sort_by_key(|&c| (self.height(c), c));
        let mut best: HashMap<Coord, usize> = HashMap::from([(lo, 0)]);
        for c in nodes {
            let Some(&d) = best.get(&c) else { continue };
            for n in self.successors(c) {
                if inside.contains(&n) {
                    let e = best.entry(n).or_insert(0);
                    *e = (*e).max(d + 1);
                }
            }
        }
        best.get(&hi).copied()
    }
}

/// A lattice vertex or a point of the infinite tiling outside it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bound {
    pub coord: Coord,
    pub vertex: Option<u32>,
}

/// Order queries on a finite lattice for one sweep direction.
#[derive(Debug, Clone)]
pub struct SweepContext<'a> {
    lattice: &'a Lattice,
    order: Order,
    future_edges: Vec<u8>,
    future_faces: Vec<u16>,
}

impl<'a> SweepContext<'a> {
    pub fn new(lattice: &'a Lattice, dir: Direction) -> Self {
        let order = Order::new(lattice.tiling(), dir);
        let nv = lattice.num_vertices() as u32;
        let future_edges = (0..nv)
            .map(|v| {
                lattice
                    .edges_at(v)
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| dir.dot(lattice.edge_step(e, v)) > 0)
                    .fold(0u8, |m, (i, _)| m | 1 << i)
            })
            .collect();
        let fam = lattice.family();
        let future_faces = (0..nv)
            .map(|v| {
                let at = lattice.vertex(v).coord;
                let into_rough = lattice
                    .vertex(v)
                    .sides
                    .iter()
                    .any(|s| fam.side_is_rough(s) && (dir.signs()[s.axis as usize] > 0) != s.high);
                lattice
                    .faces_at(v)
                    .iter()
                    .enumerate()
                    .filter(|(_, &f)| {
                        let face = lattice.face(f);
                        let off = lattice.face_offsets(f, v);
                        (0..4)
                            .filter(|&i| into_rough || face.ids[i].is_some())
                            .all(|i| order.leq(at, at + off[i]))
                    })
                    .fold(0u16, |m, (i, _)| m | 1 << i)
            })
            .collect();
        Self {
            lattice,
            order,
            future_edges,
            future_faces,
        }
    }

    pub fn lattice(&self) -> &'a Lattice {
        self.lattice
    }

    pub fn direction(&self) -> Direction {
        self.order.dir
    }

    pub fn order(&self) -> &Order {
        &self.order
    }

    /// Bit i set iff `edges_at(v)[i]` points forward.
    pub fn future_edge_mask(&self, v: u32) -> u8 {
        self.future_edges[v as usize]
    }

    /// Bit i set iff `faces_at(v)[i]` lies in the future of `v`. Corners missing
    /// from the lattice are ignored unless `v` is on a rough side that the
    /// direction points into.
    pub fn future_face_mask(&self, v: u32) -> u16 {
        self.future_faces[v as usize]
    }

    pub fn future_edges(&self, v: u32) -> Vec<u32> {
        let m = self.future_edge_mask(v);
        select(self.lattice.edges_at(v), m as u16)
    }

    pub fn future_faces(&self, v: u32) -> Vec<u32> {
        select(self.lattice.faces_at(v), self.future_face_mask(v))
    }

    /// Unrolled coordinates of lattice vertices; on a torus, minimal images
    /// around the first vertex.
    pub fn lift(&self, vs: &[u32]) -> Result<Vec<Coord>, CausalError> {
        let first = *vs.first().ok_or(CausalError::Empty)?;
        let base = self.lattice.vertex(first).coord;
        let Some(p) = self.lattice.period() else {
            return Ok(vs.iter().map(|&v| self.lattice.vertex(v).coord).collect());
        };
        let half = p / 2;
        let img = |v: i32, b: i32| b + (v - b + half).rem_euclid(p) - half;
        let out: Vec<Coord> = vs
            .iter()
            .map(|&v| {
                let c = self.lattice.vertex(v).coord;
                Coord::new(img(c.x, base.x), img(c.y, base.y), img(c.z, base.z))
            })
            .collect();
        let spread = (0..3)
            .map(|a| {
                let it = out.iter().map(|c| c.axis(a));
                it.clone().max().unwrap() - it.min().unwrap()
            })
            .max()
            .unwrap_or(0);
        if spread >= half {
            return Err(CausalError::TooLarge { spread, period: p });
        }
        Ok(out)
    }

    fn to_bound(&self, c: Coord) -> Bound {
        Bound {
            coord: c,
            vertex: self.lattice.vertex_at(c),
        }
    }

    pub fn leq(&self, u: u32, w: u32) -> Result<bool, CausalError> {
        let c = self.lift(&[u, w])?;
        Ok(self.order.leq(c[0], c[1]))
    }

    /// Members of `region` in the future of `v`.
    pub fn future(&self, v: u32, region: &[u32]) -> Vec<u32> {
        region
            .iter()
            .copied()
            .filter(|&w| self.leq(v, w).unwrap_or(false))
            .collect()
    }

    /// Members of `region` in the past of `v`.
    pub fn past(&self, v: u32, region: &[u32]) -> Vec<u32> {
        region
            .iter()
            .copied()
            .filter(|&w| self.leq(w, v).unwrap_or(false))
            .collect()
    }

    pub fn infimum(&self, vs: &[u32]) -> Result<Bound, CausalError> {
        let c = self.lift(vs)?;
        Ok(self.to_bound(self.order.infimum(&c)?))
    }

    pub fn supremum(&self, vs: &[u32]) -> Result<Bound, CausalError> {
        let c = self.lift(vs)?;
        Ok(self.to_bound(self.order.supremum(&c)?))
    }

    /// Lattice vertices of the causal diamond of `vs`.
    pub fn causal_diamond(&self, vs: &[u32]) -> Result<Vec<u32>, CausalError> {
        let c = self.lift(vs)?;
        let mut out: Vec<u32> = self
            .order
            .diamond(&c)?
            .into_iter()
            .filter_map(|c| self.lattice.vertex_at(c))
            .collect();
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Longest chain from any vertex of `from` up to `top`, in the unrolled frame
    /// anchored at `anchor`.
    pub fn chain_length(&self, anchor: u32, from: &[u32], top: Coord) -> Result<usize, CausalError> {
        let mut all = vec![anchor];
        all.extend_from_slice(from);
        let c = self.lift(&all)?;
        Ok(c[1..]
            .iter()
            .filter_map(|&s| self.order.longest_chain(s, top))
            .max()
            .unwrap_or(0))
    }

    /// `σ|v` is nonempty and lies entirely in the future of `v`.
    pub fn is_trailing(&self, syndrome: &CheckSet, v: u32) -> bool {
        let pat = local_pattern(self.lattice, syndrome, v);
        pat != 0 && pat & !self.future_edge_mask(v) == 0
    }
}

fn select(items: &[u32], mask: u16) -> Vec<u32> {
    items
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &x)| x)
        .collect()
}

/// Bit i set iff `edges_at(v)[i]` is in the syndrome.
#[inline]
pub fn local_pattern(lat: &Lattice, syndrome: &CheckSet, v: u32) -> u8 {
    lat.edges_at(v)
        .iter()
        .enumerate()
        .fold(0u8, |m, (i, &e)| m | (syndrome.get(e as usize) as u8) << i)
}

/// Edges of the syndrome incident to `v`.
pub fn restrict_checks(lat: &Lattice, syndrome: &CheckSet, v: u32) -> Vec<u32> {
    lat.edges_at(v)
        .iter()
        .copied()
        .filter(|&e| syndrome.get(e as usize))
        .collect()
}

/// Faces of the error containing `v`.
pub fn restrict_qubits(lat: &Lattice, error: &QubitSet, v: u32) -> Vec<u32> {
    lat.faces_at(v)
        .iter()
        .copied()
        .filter(|&f| error.get(f as usize))
        .collect()
}

/// Vertices touched by a set of edges.
pub fn support(lat: &Lattice, checks: &CheckSet) -> Vec<u32> {
    let mut vs: Vec<u32> = checks
        .iter_ones()
        .flat_map(|e| lat.edge(e as u32).ends)
        .collect();
    vs.sort();
    vs.dedup();
    vs
}

/// Iterated diamonds over a direction sequence, each restricted to the lattice.
pub fn causal_region(lat: &Lattice, dirs: &[Direction], set: &[u32]) -> Result<Vec<u32>, CausalError> {
    let mut cur: Vec<u32> = set.to_vec();
    if cur.is_empty() {
        return Err(CausalError::Empty);
    }
    for &d in dirs {
        cur = SweepContext::new_order_only(lat, d).causal_diamond(&cur)?;
    }
    Ok(cur)
}

impl<'a> SweepContext<'a> {
    /// A context without the per-vertex future tables.
    pub fn new_order_only(lattice: &'a Lattice, dir: Direction) -> Self {
        Self {
            lattice,
            order: Order::new(lattice.tiling(), dir),
            future_edges: Vec::new(),
            future_faces: Vec::new(),
        }
    }
}

/// Shortest path length in the syndrome graph (edges adjacent iff they share a face).
pub fn syndrome_distance(lat: &Lattice, a: &CheckSet, b: &CheckSet) -> Result<usize, CausalError> {
    if a.is_zero() || b.is_zero() {
        return Err(CausalError::Empty);
    }
    let mut dist = vec![u32::MAX; lat.num_edges()];
    let mut queue = VecDeque::new();
    for e in a.iter_ones() {
        dist[e] = 0;
        queue.push_back(e as u32);
    }
    while let Some(e) = queue.pop_front() {
        if b.get(e as usize) {
            return Ok(dist[e as usize] as usize);
        }
        for &f in lat.faces_of_edge(e) {
            for &g in &lat.face(f).edges {
                if dist[g as usize] == u32::MAX {
                    dist[g as usize] = dist[e as usize] + 1;
                    queue.push_back(g);
                }
            }
        }
    }
    Ok(usize::MAX)
}

/// Distance from every edge to the nearest edge of `a` (`u32::MAX` if unreachable).
pub fn syndrome_distances_from(lat: &Lattice, a: &CheckSet) -> Vec<u32> {
    let mut dist = vec![u32::MAX; lat.num_edges()];
    let mut queue = VecDeque::new();
    for e in a.iter_ones() {
        dist[e] = 0;
        queue.push_back(e as u32);
    }
    while let Some(e) = queue.pop_front() {
        for &f in lat.faces_of_edge(e) {
            for &g in &lat.face(f).edges {
                if dist[g as usize] == u32::MAX {
                    dist[g as usize] = dist[e as usize] + 1;
                    queue.push_back(g);
                }
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direction_index_round_trip() {
        let mut seen = [false; 8];
        for d in Direction::ALL {
            assert_eq!(Direction::from_index(d.index()), d);
            assert_eq!(d.to_string().parse::<Direction>().unwrap(), d);
            seen[d.index()] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn no_edge_is_perpendicular() {
        for d in Direction::ALL {
            for t in [Tiling::Rhombic, Tiling::Cubic] {
                for c in [Coord::new(0, 0, 0), Coord::new(2, 0, 0), Coord::new(1, 1, 3)] {
                    if t.contains(c) {
                        assert!(t.steps(c).all(|s| d.dot(s) != 0));
                    }
                }
            }
        }
    }

    #[test]
    fn degree_eight_vertex_future() {
        let o = Order::new(Tiling::Rhombic, Direction::new(-1, -1, -1).unwrap());
        let c = Coord::new(1, 1, 3);
        let fut: Vec<Coord> = o.successors(c).collect();
        assert_eq!(fut.len(), 4);
        assert!(fut.iter().all(|&w| o.height(w) > o.height(c)));
    }

    #[test]
    fn comparable_pair_bounds() {
        let o = Order::new(Tiling::Rhombic, Direction::ALL[0]);
        let a = Coord::new(1, 1, 3);
        let b = o.successors(a).next().unwrap();
        let b = o.successors(b).next().unwrap();
        assert!(o.leq(a, b));
        assert!(!o.leq(b, a));
        assert_eq!(o.infimum(&[a, b]).unwrap(), a);
        assert_eq!(o.supremum(&[b, a]).unwrap(), b);
        assert_eq!(o.diamond(&[a]).unwrap(), HashSet::from([a]));
    }

    #[test]
    fn cubic_bounds_are_coordinatewise() {
        let o = Order::new(Tiling::Cubic, Direction::ALL[0]);
        let u = [Coord::new(0, 4, 2), Coord::new(2, 0, 6)];
        assert_eq!(o.infimum(&u).unwrap(), Coord::new(0, 0, 2));
        assert_eq!(o.supremum(&u).unwrap(), Coord::new(2, 4, 6));
        assert_eq!(o.longest_chain(Coord::new(0, 0, 2), Coord::new(2, 4, 6)), Some(5));
    }

    #[test]
    fn empty_set_rejected() {
        let o = Order::new(Tiling::Cubic, Direction::ALL[0]);
        assert_eq!(o.infimum(&[]), Err(CausalError::Empty));
    }
}
