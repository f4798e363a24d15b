use crate::bits::QubitSet;

use super::{Coord, Family, Lattice};

fn set_of(lat: &Lattice, faces: impl Iterator<Item = u32>) -> QubitSet {
    QubitSet::from_indices(lat.num_faces(), faces.map(|f| f as usize))
}

/// Membranes of faces lying in the plane `coord[axis] == at` (every face not
/// crossing it), and the matching strings that pierce them once.
pub(super) fn representatives(lat: &Lattice) -> (Vec<QubitSet>, Vec<QubitSet>) {
    let l = lat.size() as i32;
    let in_plane = |axis: usize, at: i32| {
        move |f: &super::Face| f.corners.iter().all(|c| c.axis(axis) == at)
    };
    let plane = |axis: usize, at: i32| {
        let keep = in_plane(axis, at);
        set_of(
            lat,
            lat.faces()
                .iter()
                .enumerate()
                .filter(|(_, f)| keep(f))
                .map(|(i, _)| i as u32),
        )
    };
    // the line of faces with given base coordinates, stepped along `along`
    let line = |along: usize, base: Coord, axis: u8, steps: i32| {
        set_of(
            lat,
            (0..steps).filter_map(|t| lat.face_by_key(base.with_axis(along, 2 * t), axis)),
        )
    };
    let mut zs = Vec::new();
    let mut xs = Vec::new();
    match lat.family() {
        Family::RhombicPeriodic => {
            for d in 0..3 {
                let (d1, d2) = ((d + 1) % 3, (d + 2) % 3);
                // rhombic faces in a cube plane: only the corner pair lies in the plane
                zs.push(set_of(
                    lat,
                    lat.faces()
                        .iter()
                        .enumerate()
                        .filter(|(_, f)| f.axis as usize != d && f.base.axis(d) == 2)
                        .map(|(i, _)| i as u32),
                ));
                let base = Coord::default().with_axis(d1, 2);
                xs.push(line(d, base, d2 as u8, l));
            }
        }
        Family::RhombicOpen => {
            let m = 2 * ((l - 1) / 2);
            zs.push(set_of(
                lat,
                lat.faces()
                    .iter()
                    .enumerate()
                    .filter(|(_, f)| f.axis != 0 && f.base.x == m)
                    .map(|(i, _)| i as u32),
            ));
            xs.push(line(0, Coord::new(0, 4, 2), 2, l));
        }
        Family::CubicPeriodic => {
            for d in 0..3 {
                zs.push(plane(d, 0));
                xs.push(line(d, Coord::default(), d as u8, l));
            }
        }
        Family::CubicOpen => {
            zs.push(plane(2, 2 * ((l - 1) / 2)));
            xs.push(line(2, Coord::default(), 2, l));
        }
    }
    (zs, xs)
}
