#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, VecDeque};

use sweep_decoder::bits::QubitSet;
use sweep_decoder::lattice::Lattice;

/// Rank over F2 of a list of row bit-vectors given as u64 words.
pub fn rank_f2(mut rows: Vec<Vec<u64>>) -> usize {
    let mut rank = 0;
    let width = rows.first().map_or(0, |r| r.len() * 64);
    for col in 0..width {
        let (w, b) = (col / 64, 1u64 << (col % 64));
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][w] & b != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (i, r) in rows.iter_mut().enumerate() {
            if i != rank && r[w] & b != 0 {
                r.iter_mut().zip(&pivot).for_each(|(x, y)| *x ^= y);
            }
        }
        rank += 1;
    }
    rank
}

/// Boundary matrix columns (one row per face, as edge bit-vectors).
pub fn boundary_rows(lat: &Lattice) -> Vec<Vec<u64>> {
    (0..lat.num_faces())
        .map(|f| {
            let q = QubitSet::from_indices(lat.num_faces(), [f]);
            lat.boundary(&q).words().to_vec()
        })
        .collect()
}

/// Stabilizer generators. On open lattices: the faces of each cube (complete or
/// truncated) whenever their boundary vanishes, found by brute force over cubes.
pub fn stabilizer_rows(lat: &Lattice) -> Vec<Vec<u64>> {
    if lat.period().is_some() {
        return (0..lat.num_cells()).map(|c| lat.cell_set(c).words().to_vec()).collect();
    }
    let even = |f: usize| -> Vec<sweep_decoder::lattice::Coord> {
        lat.face(f as u32).corners.iter().copied().filter(|c| c.is_even()).collect()
    };
    let mut by_cube: HashMap<(i32, i32, i32), BTreeSet<usize>> = HashMap::new();
    for i in 0..lat.num_faces() {
        let cs = even(i);
        let lo = |a: usize| cs.iter().map(|c| c.axis(a)).max().unwrap() / 2 - 1;
        for x in lo(0)..=lo(0) + 1 {
            for y in lo(1)..=lo(1) + 1 {
                for z in lo(2)..=lo(2) + 1 {
                    by_cube.entry((x, y, z)).or_default().insert(i);
                }
            }
        }
    }
    let mut rows = Vec::new();
    let mut keys: Vec<_> = by_cube.keys().copied().collect();
    keys.sort();
    for k in keys {
        let fs = &by_cube[&k];
        let (x, y, z) = k;
        let inside = |f: usize| {
            even(f).iter().all(|c| {
                let ok = |v: i32, lo: i32| (0..=2).contains(&(v - 2 * lo));
                ok(c.x, x) && ok(c.y, y) && ok(c.z, z)
            })
        };
        let cell: Vec<usize> = fs.iter().copied().filter(|&f| inside(f)).collect();
        if cell.is_empty() {
            continue;
        }
        let q = QubitSet::from_indices(lat.num_faces(), cell.iter().copied());
        if lat.boundary(&q).is_zero() {
            rows.push(q.words().to_vec());
        }
    }
    rows
}

pub fn logical_count(lat: &Lattice) -> usize {
    let ker = lat.num_faces() - rank_f2(boundary_rows(lat));
    ker - rank_f2(stabilizer_rows(lat))
}

/// Independent BFS over the syndrome graph built as an explicit adjacency list.
pub fn syndrome_graph_distance(lat: &Lattice, a: &[usize], b: &[usize]) -> usize {
    let n = lat.num_edges();
    let mut adj = vec![BTreeSet::new(); n];
    for f in lat.faces() {
        for &e in &f.edges {
            for &g in &f.edges {
                if e != g {
                    adj[e as usize].insert(g as usize);
                }
            }
        }
    }
    let target: BTreeSet<usize> = b.iter().copied().collect();
    let mut dist = vec![usize::MAX; n];
    let mut q = VecDeque::new();
    for &s in a {
        dist[s] = 0;
        q.push_back(s);
    }
    while let Some(u) = q.pop_front() {
        if target.contains(&u) {
            return dist[u];
        }
        for &w in &adj[u] {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                q.push_back(w);
            }
        }
    }
    usize::MAX
}
