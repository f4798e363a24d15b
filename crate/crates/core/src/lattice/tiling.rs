//! The two infinite tilings underlying every finite lattice.

use serde::{Deserialize, Serialize};

use super::coord::{Coord, DIAGONALS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tiling {
    /// Cube corners plus a checkerboard of cube centers.
    Rhombic,
    /// Plain cubic lattice with unit spacing (doubled coordinates step by 2).
    Cubic,
}

/// A face polygon in the infinite tiling together with its identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Polygon {
    /// Lowest cube corner of the face.
    pub base: Coord,
    /// Rhombic: axis of the cube edge. Cubic: normal axis.
    pub axis: u8,
    /// Vertices in cyclic order.
    pub corners: [Coord; 4],
}

impl Tiling {
    pub fn contains(self, c: Coord) -> bool {
        match self {
            Tiling::Rhombic => c.is_even() || (c.is_center_type() && c.sum().rem_euclid(4) == 1),
            Tiling::Cubic => c.is_even(),
        }
    }

    pub fn is_center(self, c: Coord) -> bool {
        self == Tiling::Rhombic && c.is_center_type()
    }

    /// Displacements to every neighbor of `c` (which must be a vertex).
    pub fn steps(self, c: Coord) -> impl Iterator<Item = Coord> {
        let mut out = [Coord::default(); 8];
        let mut n = 0;
        match self {
            Tiling::Rhombic => {
                for d in DIAGONALS {
                    if self.contains(c + d) {
                        out[n] = d;
                        n += 1;
                    }
                }
            }
            Tiling::Cubic => {
                for i in 0..3 {
                    for s in [-2, 2] {
                        out[n] = Coord::unit(i, s);
                        n += 1;
                    }
                }
            }
        }
        out.into_iter().take(n)
    }

    /// The face on cube edge/plane `(base, axis)`.
    pub fn polygon(self, base: Coord, axis: u8) -> Polygon {
        let ax = axis as usize;
        let (o0, o1) = ((ax + 1) % 3, (ax + 2) % 3);
        let (o0, o1) = (o0.min(o1), o0.max(o1));
        let corners = match self {
            Tiling::Rhombic => {
                let b = base + Coord::unit(ax, 2);
                let mid = base + Coord::unit(ax, 1);
                let mut cs = [[-1, -1], [-1, 1], [1, -1], [1, 1]]
                    .into_iter()
                    .map(|[s0, s1]| mid + Coord::unit(o0, s0) + Coord::unit(o1, s1))
                    .filter(|&c| self.contains(c));
                let c1 = cs.next().expect("two centers per cube edge");
                let c2 = cs.next().expect("two centers per cube edge");
                [base, c1, b, c2]
            }
            Tiling::Cubic => {
                let a = Coord::unit(o0, 2);
                let b = Coord::unit(o1, 2);
                [base, base + a, base + a + b, base + b]
            }
        };
        Polygon {
            base,
            axis,
            corners,
        }
    }

    /// Every face of the infinite tiling containing vertex `c`.
    pub fn polygons_at(self, c: Coord) -> Vec<Polygon> {
        let mut out = Vec::new();
        match self {
            Tiling::Rhombic if c.is_even() => {
                for ax in 0..3 {
                    out.push(self.polygon(c, ax as u8));
                    out.push(self.polygon(c - Coord::unit(ax, 2), ax as u8));
                }
            }
            Tiling::Rhombic => {
                // the 12 edges of the cube centred at c
                let lo = c - Coord::new(1, 1, 1);
                for ax in 0..3 {
                    let (o0, o1) = ((ax + 1) % 3, (ax + 2) % 3);
                    for s0 in [0, 2] {
                        for s1 in [0, 2] {
                            let base = lo + Coord::unit(o0, s0) + Coord::unit(o1, s1);
                            out.push(self.polygon(base, ax as u8));
                        }
                    }
                }
            }
            Tiling::Cubic => {
                for n in 0..3 {
                    let (o0, o1) = ((n + 1) % 3, (n + 2) % 3);
                    for s0 in [0, -2] {
                        for s1 in [0, -2] {
                            let base = c + Coord::unit(o0, s0) + Coord::unit(o1, s1);
                            out.push(self.polygon(base, n as u8));
                        }
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rhombic_degrees() {
        let t = Tiling::Rhombic;
        assert_eq!(t.steps(Coord::new(0, 0, 0)).count(), 4);
        assert_eq!(t.steps(Coord::new(2, 0, 0)).count(), 4);
        assert_eq!(t.steps(Coord::new(1, 1, 3)).count(), 8);
        assert!(!t.contains(Coord::new(1, 1, 1)));
    }

    #[test]
    fn polygons_are_cycles() {
        for t in [Tiling::Rhombic, Tiling::Cubic] {
            for c in [Coord::new(0, 0, 0), Coord::new(1, 1, 3), Coord::new(2, 4, 0)] {
                if !t.contains(c) {
                    continue;
                }
                let ps = t.polygons_at(c);
                assert_eq!(ps.len(), if t.is_center(c) || t == Tiling::Cubic { 12 } else { 6 });
                for p in ps {
                    assert!(p.corners.contains(&c));
                    for i in 0..4 {
                        let (a, b) = (p.corners[i], p.corners[(i + 1) % 4]);
                        assert!(t.contains(a));
                        assert!(t.steps(a).any(|d| a + d == b));
                    }
                }
            }
        }
    }
}
