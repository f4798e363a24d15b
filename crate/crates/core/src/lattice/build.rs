use std::collections::{BTreeSet, HashMap};

use super::logical;
use super::{
    Coord, Edge, Face, Family, Label, Lattice, LatticeError, Polygon, Side, Sides, Tiling, Vertex,
    VertexKind,
};

type FaceRule = dyn Fn(&[Option<u32>; 4], usize) -> bool;
type TypeBox = dyn Fn(Coord) -> ([i32; 3], [i32; 3]);

struct Blueprint<'a> {
    family: Family,
    size: usize,
    period: Option<i32>,
    vertices: Vec<Coord>,
    /// (from, offset) pairs.
    edges: Vec<(Coord, Coord)>,
    faces: Vec<Polygon>,
    keep_face: &'a FaceRule,
    cells: Vec<Vec<(Coord, u8)>>,
    type_box: Option<&'a TypeBox>,
}

fn even_box(lo: [i32; 3], hi: [i32; 3]) -> impl Iterator<Item = Coord> {
    (lo[0]..=hi[0]).step_by(2).flat_map(move |x| {
        (lo[1]..=hi[1])
            .step_by(2)
            .flat_map(move |y| (lo[2]..=hi[2]).step_by(2).map(move |z| Coord::new(x, y, z)))
    })
}

fn cube_edges(lo: Coord) -> impl Iterator<Item = (Coord, u8)> {
    (0..3usize).flat_map(move |ax| {
        let (o0, o1) = ((ax + 1) % 3, (ax + 2) % 3);
        [(0, 0), (0, 2), (2, 0), (2, 2)]
            .into_iter()
            .map(move |(s0, s1)| (lo + Coord::unit(o0, s0) + Coord::unit(o1, s1), ax as u8))
    })
}

fn cube_faces(lo: Coord) -> impl Iterator<Item = (Coord, u8)> {
    (0..3usize).flat_map(move |n| [(lo, n as u8), (lo + Coord::unit(n, 2), n as u8)])
}

impl Lattice {
    pub fn rhombic_periodic(l: usize) -> Result<Lattice, LatticeError> {
        if l < 2 {
            return Err(LatticeError::TooSmall {
                family: Family::RhombicPeriodic,
                min: 2,
                got: l,
            });
        }
        if l % 2 == 1 {
            return Err(LatticeError::OddPeriodicRhombic(l));
        }
        let t = Tiling::Rhombic;
        let p = 2 * l as i32;
        let mut vertices: Vec<Coord> = even_box([0; 3], [p - 2; 3]).collect();
        let centers: Vec<Coord> = even_box([0; 3], [p - 2; 3])
            .map(|c| c + Coord::new(1, 1, 1))
            .filter(|&c| t.contains(c))
            .collect();
        let mut edges = Vec::new();
        for &c in &centers {
            for d in t.steps(c) {
                edges.push(((c + d).wrap(p), -d));
            }
        }
        vertices.extend(&centers);
        let faces = even_box([0; 3], [p - 2; 3])
            .flat_map(|a| (0..3).map(move |ax| t.polygon(a, ax)))
            .collect();
        let cells = even_box([0; 3], [p - 2; 3])
            .filter(|c| (c.sum() / 2) % 2 == 0)
            .map(|lo| cube_edges(lo).map(|(b, ax)| (b.wrap(p), ax)).collect())
            .collect();
        Ok(assemble(Blueprint {
            family: Family::RhombicPeriodic,
            size: l,
            period: Some(p),
            vertices,
            edges,
            faces,
            keep_face: &|_, _| true,
            cells,
            type_box: None,
        }))
    }

    pub fn rhombic_open(l: usize) -> Result<Lattice, LatticeError> {
        if l < 3 {
            return Err(LatticeError::TooSmall {
                family: Family::RhombicOpen,
                min: 3,
                got: l,
            });
        }
        let t = Tiling::Rhombic;
        let li = l as i32;
        let corner_lo = [0, 2, 2];
        let corner_hi = [2 * li - 2, 2 * li, 2 * li - 2];
        let corner_ok = |c: Coord| (0..3).all(|i| c.axis(i) >= corner_lo[i] && c.axis(i) <= corner_hi[i]);
        let centers: Vec<Coord> = even_box([0, 0, 0], [2 * li - 4, 2 * li, 2 * li - 2])
            .map(|c| c + Coord::new(1, 1, 1))
            .filter(|&c| t.contains(c))
            .collect();
        let mut corners = BTreeSet::new();
        let mut edges = Vec::new();
        for &c in &centers {
            for d in t.steps(c) {
                let a = c + d;
                if corner_ok(a) {
                    corners.insert(a);
                    edges.push((a, -d));
                }
            }
        }
        let mut vertices: Vec<Coord> = corners.into_iter().collect();
        vertices.extend(&centers);
        let hi = [2 * li - 2, 2 * li + 2, 2 * li];
        let faces = even_box([0; 3], hi)
            .flat_map(|a| (0..3).map(move |ax| (a, ax)))
            .filter(|&(a, ax)| {
                let b = a + Coord::unit(ax as usize, 2);
                (0..3).all(|i| b.axis(i) <= hi[i])
            })
            .map(|(a, ax)| t.polygon(a, ax))
            .collect();
        let cells = even_box([-2, -2, -2], [2 * li, 2 * li + 2, 2 * li])
            .filter(|c| (c.sum() / 2).rem_euclid(2) == 0)
            .map(|lo| cube_edges(lo).collect())
            .collect();
        // two centres, or exactly one surviving edge
        let keep = |ids: &[Option<u32>; 4], n_edges: usize| {
            n_edges >= 1 && ((ids[1].is_some() && ids[3].is_some()) || n_edges == 1)
        };
        let type_box = move |c: Coord| {
            if c.is_center_type() {
                ([1, 1, 1], [2 * li - 3, 2 * li + 1, 2 * li - 1])
            } else {
                (corner_lo, corner_hi)
            }
        };
        Ok(assemble(Blueprint {
            family: Family::RhombicOpen,
            size: l,
            period: None,
            vertices,
            edges,
            faces,
            keep_face: &keep,
            cells,
            type_box: Some(&type_box),
        }))
    }

    pub fn cubic_periodic(l: usize) -> Result<Lattice, LatticeError> {
        if l < 2 {
            return Err(LatticeError::TooSmall {
                family: Family::CubicPeriodic,
                min: 2,
                got: l,
            });
        }
        let t = Tiling::Cubic;
        let p = 2 * l as i32;
        let vertices: Vec<Coord> = even_box([0; 3], [p - 2; 3]).collect();
        let edges = vertices
            .iter()
            .flat_map(|&v| (0..3).map(move |i| (v, Coord::unit(i, 2))))
            .collect();
        let faces = vertices
            .iter()
            .flat_map(|&v| (0..3).map(move |n| t.polygon(v, n)))
            .collect();
        let cells = vertices
            .iter()
            .map(|&v| cube_faces(v).map(|(b, n)| (b.wrap(p), n)).collect())
            .collect();
        Ok(assemble(Blueprint {
            family: Family::CubicPeriodic,
            size: l,
            period: Some(p),
            vertices,
            edges,
            faces,
            keep_face: &|_, _| true,
            cells,
            type_box: None,
        }))
    }

    pub fn cubic_open(l: usize) -> Result<Lattice, LatticeError> {
        if l < 2 {
            return Err(LatticeError::TooSmall {
                family: Family::CubicOpen,
                min: 2,
                got: l,
            });
        }
        let t = Tiling::Cubic;
        let li = l as i32;
        let lo = [0, 0, 0];
        let hi = [2 * li, 2 * li, 2 * li - 2];
        let inside = |c: Coord| (0..3).all(|i| c.axis(i) >= lo[i] && c.axis(i) <= hi[i]);
        let in_plane = |pts: &[Coord]| {
            (0..2).any(|ax| [0, 2 * li].iter().any(|&v| pts.iter().all(|p| p.axis(ax) == v)))
        };
        let vertices: Vec<Coord> = even_box(lo, hi).collect();
        let edges = vertices
            .iter()
            .flat_map(|&v| (0..3).map(move |i| (v, Coord::unit(i, 2))))
            .filter(|&(v, d)| inside(v + d) && !in_plane(&[v, v + d]))
            .collect();
        let faces = vertices
            .iter()
            .flat_map(|&v| (0..3).map(move |n| t.polygon(v, n)))
            .filter(|p| p.corners.iter().all(|&c| inside(c)) && !in_plane(&p.corners))
            .collect();
        let cells = vertices.iter().map(|&v| cube_faces(v).collect()).collect();
        let type_box = move |_: Coord| (lo, hi);
        Ok(assemble(Blueprint {
            family: Family::CubicOpen,
            size: l,
            period: None,
            vertices,
            edges,
            faces,
            keep_face: &|_, _| true,
            cells,
            type_box: Some(&type_box),
        }))
    }
}

fn assemble(bp: Blueprint<'_>) -> Lattice {
    let canon = |c: Coord| match bp.period {
        Some(p) => c.wrap(p),
        None => c,
    };
    let tiling = bp.family.tiling();

    let mut edge_list = bp.edges.clone();
    edge_list.sort();
    edge_list.dedup();
    let mut used: BTreeSet<Coord> = BTreeSet::new();
    for &(a, d) in &edge_list {
        used.insert(canon(a));
        used.insert(canon(a + d));
    }
    let mut coords: Vec<Coord> = bp.vertices.iter().map(|&c| canon(c)).collect();
    coords.sort();
    coords.dedup();
    let before = coords.len();
    coords.retain(|c| used.contains(c));
    let dropped_vertices = before - coords.len();

    let index: HashMap<Coord, u32> = coords.iter().enumerate().map(|(i, &c)| (c, i as u32)).collect();
    let edge_key: HashMap<(Coord, Coord), u32> = edge_list
        .iter()
        .enumerate()
        .map(|(i, &(a, d))| ((canon(a), d), i as u32))
        .collect();
    let mut edges: Vec<Edge> = edge_list
        .iter()
        .map(|&(a, d)| Edge {
            ends: [index[&canon(a)], index[&canon(a + d)]],
            offset: d,
            label: Label::Bulk,
        })
        .collect();

    let mut polys = bp.faces.clone();
    for p in &mut polys {
        let shift = canon(p.base) - p.base;
        p.base = p.base + shift;
        p.corners = p.corners.map(|c| c + shift);
    }
    polys.sort_by_key(|p| (p.base, p.axis));
    polys.dedup_by_key(|p| (p.base, p.axis));
    let mut faces = Vec::new();
    for p in polys {
        let ids = p.corners.map(|c| index.get(&canon(c)).copied());
        let mut fe = Vec::new();
        for i in 0..4 {
            let (a, b) = (p.corners[i], p.corners[(i + 1) % 4]);
            if ids[i].is_none() || ids[(i + 1) % 4].is_none() {
                continue;
            }
            if let Some(&e) = edge_key
                .get(&(canon(a), b - a))
                .or_else(|| edge_key.get(&(canon(b), a - b)))
            {
                fe.push(e);
            }
        }
        if !(bp.keep_face)(&ids, fe.len()) {
            continue;
        }
        faces.push(Face {
            base: p.base,
            axis: p.axis,
            corners: p.corners,
            ids,
            edges: fe,
            label: Label::Bulk,
        });
    }
    let face_index: HashMap<(Coord, u8), u32> = faces
        .iter()
        .enumerate()
        .map(|(i, f)| ((f.base, f.axis), i as u32))
        .collect();

    let nv = coords.len();
    let mut vertex_edges = vec![Vec::new(); nv];
    for (i, e) in edges.iter().enumerate() {
        vertex_edges[e.ends[0] as usize].push(i as u32);
        vertex_edges[e.ends[1] as usize].push(i as u32);
    }
    let mut vertex_faces = vec![Vec::new(); nv];
    let mut edge_faces = vec![Vec::new(); edges.len()];
    for (i, f) in faces.iter().enumerate() {
        for v in f.vertices() {
            vertex_faces[v as usize].push(i as u32);
        }
        for &e in &f.edges {
            edge_faces[e as usize].push(i as u32);
        }
    }

    let cells: Vec<Vec<u32>> = bp
        .cells
        .iter()
        .filter_map(|keys| {
            let mut fs: Vec<u32> = keys
                .iter()
                .map(|&(b, ax)| face_index.get(&(canon(b), ax)).copied())
                .collect::<Option<_>>()?;
            fs.sort();
            fs.dedup();
            Some(fs)
        })
        .collect();

    let mut vertices: Vec<Vertex> = coords
        .iter()
        .map(|&c| Vertex {
            coord: c,
            kind: match tiling {
                Tiling::Cubic => VertexKind::Cubic,
                Tiling::Rhombic if c.is_center_type() => VertexKind::Center,
                Tiling::Rhombic => VertexKind::Corner,
            },
            sides: Sides::default(),
            label: Label::Bulk,
        })
        .collect();

    if let Some(type_box) = bp.type_box {
        for v in &mut vertices {
            let mut star: Vec<Coord> = tiling.steps(v.coord).map(|d| v.coord + d).collect();
            for p in tiling.polygons_at(v.coord) {
                star.extend(p.corners);
            }
            let mut bits = 0u8;
            for q in star {
                let (lo, hi) = type_box(q);
                for ax in 0..3 {
                    if q.axis(ax) < lo[ax] {
                        bits |= Side { axis: ax as u8, high: false }.bit();
                    }
                    if q.axis(ax) > hi[ax] {
                        bits |= Side { axis: ax as u8, high: true }.bit();
                    }
                }
            }
            v.sides = Sides(bits);
            v.label = if v.sides.is_empty() {
                Label::Bulk
            } else if v.sides.iter().any(|s| bp.family.side_is_rough(s)) {
                Label::Rough
            } else {
                Label::Smooth
            };
        }
    }

    let worst = |a: Label, b: Label| match (a, b) {
        (Label::Rough, _) | (_, Label::Rough) => Label::Rough,
        (Label::Smooth, _) | (_, Label::Smooth) => Label::Smooth,
        _ => Label::Bulk,
    };
    for f in &mut faces {
        f.label = if f.edges.len() < 4 {
            Label::Rough
        } else {
            f.vertices()
                .map(|v| vertices[v as usize].label)
                .fold(Label::Bulk, worst)
        };
    }
    for (i, e) in edges.iter_mut().enumerate() {
        let reduced = edge_faces[i].iter().any(|&f| faces[f as usize].edges.len() < 4);
        e.label = if reduced {
            Label::Rough
        } else {
            worst(vertices[e.ends[0] as usize].label, vertices[e.ends[1] as usize].label)
        };
    }

    let mut lat = Lattice {
        family: bp.family,
        size: bp.size,
        period: bp.period,
        vertices,
        edges,
        faces,
        cells,
        vertex_edges,
        vertex_faces,
        edge_faces,
        index,
        face_index,
        dropped_vertices,
        logical_z: Vec::new(),
        logical_x: Vec::new(),
    };
    let (z, x) = logical::representatives(&lat);
    lat.logical_z = z;
    lat.logical_x = x;
    lat
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert_eq!(
            Lattice::rhombic_periodic(3).unwrap_err(),
            LatticeError::OddPeriodicRhombic(3)
        );
        assert!(Lattice::rhombic_periodic(0).is_err());
        assert!(Lattice::rhombic_open(2).is_err());
        assert!(Lattice::cubic_open(1).is_err());
        assert!(Lattice::cubic_periodic(1).is_err());
    }

    #[test]
    fn periodic_rhombic_counts() {
        for l in [2usize, 4, 6] {
            let lat = Lattice::rhombic_periodic(l).unwrap();
            let l3 = l * l * l;
            assert_eq!(lat.num_vertices(), 3 * l3 / 2);
            assert_eq!(lat.num_edges(), 4 * l3);
            assert_eq!(lat.num_faces(), 3 * l3);
            assert_eq!(lat.num_cells(), l3 / 2);
        }
    }

    #[test]
    fn cubic_periodic_counts() {
        let lat = Lattice::cubic_periodic(3).unwrap();
        assert_eq!(
            (lat.num_vertices(), lat.num_edges(), lat.num_faces(), lat.num_cells()),
            (27, 81, 81, 27)
        );
        assert!((0..lat.num_edges() as u32).all(|e| lat.faces_of_edge(e).len() == 4));
    }

    #[test]
    fn open_lattices_have_reduced_faces() {
        let r = Lattice::rhombic_open(3).unwrap();
        let h = r.face_size_histogram();
        assert!(h[1] > 0 && h[2] > 0 && h[3] == 0 && h[4] > 0);
        let c = Lattice::cubic_open(3).unwrap();
        let h = c.face_size_histogram();
        assert!(h[2] > 0 && h[3] > 0);
    }

    #[test]
    fn rhombic_degrees_in_bulk() {
        let lat = Lattice::rhombic_open(5).unwrap();
        for (i, v) in lat.vertices().iter().enumerate() {
            if v.label == Label::Bulk {
                let d = lat.edges_at(i as u32).len();
                match v.kind {
                    VertexKind::Corner => assert_eq!(d, 4),
                    VertexKind::Center => assert_eq!(d, 8),
                    VertexKind::Cubic => unreachable!(),
                }
            }
        }
    }
}
