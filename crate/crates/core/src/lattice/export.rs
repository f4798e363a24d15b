use std::io::{self, Write};

use super::Lattice;

/// Line-oriented dump:
///
/// ```text
/// lattice <family> <L>
/// v <index> <x> <y> <z> <label>
/// e <index> <v0> <v1>
/// f <index> <vertex cycle...> ; <edges...>
/// ```
///
/// Coordinates are doubled.
pub fn write_text<W: Write>(lat: &Lattice, mut out: W) -> io::Result<()> {
    writeln!(out, "lattice {} {}", lat.family(), lat.size())?;
    for (i, v) in lat.vertices().iter().enumerate() {
        writeln!(out, "v {i} {} {}", v.coord, v.label.as_str())?;
    }
    for (i, e) in lat.edges().iter().enumerate() {
        writeln!(out, "e {i} {} {}", e.ends[0], e.ends[1])?;
    }
    for (i, f) in lat.faces().iter().enumerate() {
        write!(out, "f {i}")?;
        for v in f.vertices() {
            write!(out, " {v}")?;
        }
        write!(out, " ;")?;
        for e in &f.edges {
            write!(out, " {e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}
