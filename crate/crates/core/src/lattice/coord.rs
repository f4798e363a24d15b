use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Lattice coordinate stored doubled, so half-integer positions stay integral.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Coord {
    pub x: i32,
    pub y: i32,
    pub z: i32,
}

impl Coord {
    pub const fn new(x: i32, y: i32, z: i32) -> Self {
        Self { x, y, z }
    }

    pub fn axis(self, i: usize) -> i32 {
        match i {
            0 => self.x,
            1 => self.y,
            2 => self.z,
            _ => panic!("axis out of range"),
        }
    }

    pub fn with_axis(mut self, i: usize, v: i32) -> Self {
        match i {
            0 => self.x = v,
            1 => self.y = v,
            2 => self.z = v,
            _ => panic!("axis out of range"),
        }
        self
    }

    pub fn unit(i: usize, len: i32) -> Self {
        Self::default().with_axis(i, len)
    }

    pub fn to_array(self) -> [i32; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [i32; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    /// All three doubled coordinates odd: a cube-center position.
    pub fn is_center_type(self) -> bool {
        self.x.rem_euclid(2) == 1 && self.y.rem_euclid(2) == 1 && self.z.rem_euclid(2) == 1
    }

    pub fn is_even(self) -> bool {
        self.x.rem_euclid(2) == 0 && self.y.rem_euclid(2) == 0 && self.z.rem_euclid(2) == 0
    }

    pub fn sum(self) -> i32 {
        self.x + self.y + self.z
    }

    pub fn wrap(self, period: i32) -> Self {
        Self::new(
            self.x.rem_euclid(period),
            self.y.rem_euclid(period),
            self.z.rem_euclid(period),
        )
    }

    /// Chebyshev norm.
    pub fn norm_inf(self) -> i32 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }
}

impl Add for Coord {
    type Output = Coord;
    fn add(self, o: Coord) -> Coord {
        Coord::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Coord {
    type Output = Coord;
    fn sub(self, o: Coord) -> Coord {
        Coord::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Coord {
    type Output = Coord;
    fn neg(self) -> Coord {
        Coord::new(-self.x, -self.y, -self.z)
    }
}

impl fmt::Debug for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.z)
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.x, self.y, self.z)
    }
}

/// The eight diagonal unit steps (doubled coordinates).
pub const DIAGONALS: [Coord; 8] = [
    Coord::new(-1, -1, -1),
    Coord::new(-1, -1, 1),
    Coord::new(-1, 1, -1),
    Coord::new(-1, 1, 1),
    Coord::new(1, -1, -1),
    Coord::new(1, -1, 1),
    Coord::new(1, 1, -1),
    Coord::new(1, 1, 1),
];
