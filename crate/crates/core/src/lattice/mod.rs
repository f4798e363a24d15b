//! Finite lattices: incidence structure, the boundary map and logical operators.

mod build;
mod coord;
mod export;
mod logical;
mod tiling;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{CheckSet, QubitSet};

pub use coord::{Coord, DIAGONALS};
pub use export::write_text;
pub use tiling::{Polygon, Tiling};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("{family} lattice needs L >= {min}, got {got}")]
    TooSmall {
        family: Family,
        min: usize,
        got: usize,
    },
    #[error("periodic rhombic lattice needs even L, got {0}")]
    OddPeriodicRhombic(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    RhombicPeriodic,
    RhombicOpen,
    CubicPeriodic,
    CubicOpen,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::RhombicPeriodic,
        Family::RhombicOpen,
        Family::CubicPeriodic,
        Family::CubicOpen,
    ];

    pub fn tiling(self) -> Tiling {
        match self {
            Family::RhombicPeriodic | Family::RhombicOpen => Tiling::Rhombic,
            Family::CubicPeriodic | Family::CubicOpen => Tiling::Cubic,
        }
    }

    pub fn is_periodic(self) -> bool {
        matches!(self, Family::RhombicPeriodic | Family::CubicPeriodic)
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::RhombicPeriodic => "rhombic-periodic",
            Family::RhombicOpen => "rhombic-open",
            Family::CubicPeriodic => "cubic-periodic",
            Family::CubicOpen => "cubic-open",
        }
    }

    pub fn build(self, size: usize) -> Result<Lattice, LatticeError> {
        match self {
            Family::RhombicPeriodic => Lattice::rhombic_periodic(size),
            Family::RhombicOpen => Lattice::rhombic_open(size),
            Family::CubicPeriodic => Lattice::cubic_periodic(size),
            Family::CubicOpen => Lattice::cubic_open(size),
        }
    }

    /// Whether a boundary side is rough (syndrome strings may end there).
    pub fn side_is_rough(self, side: Side) -> bool {
        match self {
            Family::RhombicOpen => side.axis != 0,
            Family::CubicOpen => side.axis != 2,
            _ => false,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown lattice family '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Bulk,
    Rough,
    Smooth,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Bulk => "bulk",
            Label::Rough => "rough",
            Label::Smooth => "smooth",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexKind {
    /// Degree-4 cube corner.
    Corner,
    /// Degree-8 cube center.
    Center,
    Cubic,
}

/// One face of the bounding box: axis and sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Side {
    pub axis: u8,
    pub high: bool,
}

impl Side {
    pub fn bit(self) -> u8 {
        1 << (self.axis * 2 + self.high as u8)
    }

    pub fn all() -> impl Iterator<Item = Side> {
        (0..3u8).flat_map(|axis| [false, true].map(|high| Side { axis, high }))
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = ["x", "y", "z"][self.axis as usize];
        write!(f, "{a}{}", if self.high { "+" } else { "-" })
    }
}

/// Bit set of boundary sides a vertex touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Sides(pub u8);

impl Sides {
    pub fn contains(self, s: Side) -> bool {
        self.0 & s.bit() != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Side> {
        Side::all().filter(move |s| self.contains(*s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub coord: Coord,
    pub kind: VertexKind,
    pub sides: Sides,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    /// `ends[1]` sits at `coord(ends[0]) + offset` before wrapping.
    pub ends: [u32; 2],
    pub offset: Coord,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub base: Coord,
    pub axis: u8,
    /// Full polygon of the infinite tiling, unwrapped, with `corners[0] == base`.
    pub corners: [Coord; 4],
    /// Lattice vertex at each corner, if present.
    pub ids: [Option<u32>; 4],
    pub edges: Vec<u32>,
    pub label: Label,
}

impl Face {
    /// Present vertices in cyclic order.
    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        self.ids.iter().flatten().copied()
    }

    pub fn corner_of(&self, v: u32) -> Option<usize> {
        self.ids.iter().position(|&i| i == Some(v))
    }
}

/// Immutable incidence structure of a finite lattice.
#[derive(Debug, Clone)]
pub struct Lattice {
    family: Family,
    size: usize,
    period: Option<i32>,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    faces: Vec<Face>,
    cells: Vec<Vec<u32>>,
    vertex_edges: Vec<Vec<u32>>,
    vertex_faces: Vec<Vec<u32>>,
    edge_faces: Vec<Vec<u32>>,
    index: HashMap<Coord, u32>,
    face_index: HashMap<(Coord, u8), u32>,
    dropped_vertices: usize,
    logical_z: Vec<QubitSet>,
    logical_x: Vec<QubitSet>,
}

impl Lattice {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn tiling(&self) -> Tiling {
        self.family.tiling()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Doubled period of the torus, if periodic.
    pub fn period(&self) -> Option<i32> {
        self.period
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: u32) -> &Vertex {
        &self.vertices[v as usize]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: u32) -> &Edge {
        &self.edges[e as usize]
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, f: u32) -> &Face {
        &self.faces[f as usize]
    }

    /// Cells as face lists (Z-stabilizer supports).
    pub fn cells(&self) -> &[Vec<u32>] {
        &self.cells
    }

    pub fn edges_at(&self, v: u32) -> &[u32] {
        &self.vertex_edges[v as usize]
    }

    pub fn faces_at(&self, v: u32) -> &[u32] {
        &self.vertex_faces[v as usize]
    }

    pub fn faces_of_edge(&self, e: u32) -> &[u32] {
        &self.edge_faces[e as usize]
    }

    /// Vertices that the construction dropped because they had no edges.
    pub fn dropped_vertices(&self) -> usize {
        self.dropped_vertices
    }

    /// Canonical position of a coordinate (wrapped on a torus).
    pub fn canonical(&self, c: Coord) -> Coord {
        match self.period {
            Some(p) => c.wrap(p),
            None => c,
        }
    }

    pub fn vertex_at(&self, c: Coord) -> Option<u32> {
        self.index.get(&self.canonical(c)).copied()
    }

    pub fn face_by_key(&self, base: Coord, axis: u8) -> Option<u32> {
        self.face_index.get(&(self.canonical(base), axis)).copied()
    }

    /// The endpoint of `e` other than `v`.
    pub fn other_end(&self, e: u32, v: u32) -> u32 {
        let [a, b] = self.edges[e as usize].ends;
        if a == v {
            b
        } else {
            a
        }
    }

    /// Displacement from `v` along edge `e` (unwrapped).
    pub fn edge_step(&self, e: u32, v: u32) -> Coord {
        let ed = &self.edges[e as usize];
        if ed.ends[0] == v {
            ed.offset
        } else {
            debug_assert_eq!(ed.ends[1], v);
            -ed.offset
        }
    }

    /// Corner positions of face `f` measured from its corner at `v`.
    pub fn face_offsets(&self, f: u32, v: u32) -> [Coord; 4] {
        let face = &self.faces[f as usize];
        let i = face.corner_of(v).expect("vertex not on face");
        face.corners.map(|c| c - face.corners[i])
    }

    pub fn zero_qubits(&self) -> QubitSet {
        QubitSet::zeros(self.faces.len())
    }

    pub fn zero_checks(&self) -> CheckSet {
        CheckSet::zeros(self.edges.len())
    }

    /// The boundary map: XOR of the edges of every face in the error.
    pub fn boundary(&self, error: &QubitSet) -> CheckSet {
        let mut s = self.zero_checks();
        for f in error.iter_ones() {
            self.add_face_boundary(&mut s, f as u32);
        }
        s
    }

    #[inline]
    pub fn add_face_boundary(&self, s: &mut CheckSet, f: u32) {
        for &e in &self.faces[f as usize].edges {
            s.flip(e as usize);
        }
    }

    pub fn cell_set(&self, c: usize) -> QubitSet {
        QubitSet::from_indices(self.faces.len(), self.cells[c].iter().map(|&f| f as usize))
    }

    /// Logical-Z representatives (membranes with trivial syndrome).
    pub fn logical_z(&self) -> &[QubitSet] {
        &self.logical_z
    }

    /// Logical-X representatives, paired index-wise with `logical_z`.
    pub fn logical_x(&self) -> &[QubitSet] {
        &self.logical_x
    }

    /// Number of faces of each edge count, indexed by edge count.
    pub fn face_size_histogram(&self) -> [usize; 5] {
        let mut h = [0; 5];
        for f in &self.faces {
            h[f.edges.len()] += 1;
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_of_single_face() {
        let lat = Lattice::rhombic_periodic(4).unwrap();
        let e = QubitSet::from_indices(lat.num_faces(), [5]);
        let s = lat.boundary(&e);
        let mut want: Vec<usize> = lat.face(5).edges.iter().map(|&e| e as usize).collect();
        want.sort();
        assert_eq!(s.iter_ones().collect::<Vec<_>>(), want);
        assert_eq!(want.len(), 4);
    }

    #[test]
    fn shared_edge_cancels() {
        let lat = Lattice::cubic_periodic(3).unwrap();
        let e0 = 0;
        let fs = lat.faces_of_edge(e0);
        let err = QubitSet::from_indices(lat.num_faces(), [fs[0] as usize, fs[1] as usize]);
        let s = lat.boundary(&err);
        assert!(!s.get(e0 as usize));
        assert_eq!(s.weight(), 6);
    }

    #[test]
    fn family_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
    }
}
