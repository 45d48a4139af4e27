// SPDX-License-Identifier: Apache-2.0

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};

const UNREACHABLE: u32 = u32::MAX;

/// Undirected physical connectivity with precomputed all-pairs hop distances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingMap {
    physical_qubits: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    distance: Vec<Vec<u32>>,
}

/// 27-qubit heavy-hex lattice of the Falcon processor family.
const HEAVY_HEX_27: [(usize, usize); 28] = [
    (0, 1), (1, 2), (1, 4), (2, 3), (3, 5), (4, 7), (5, 8), (6, 7), (7, 10), (8, 9),
    (8, 11), (10, 12), (11, 14), (12, 13), (12, 15), (13, 14), (14, 16), (15, 18),
    (16, 19), (17, 18), (18, 21), (19, 20), (19, 22), (21, 23), (22, 25), (23, 24),
    (24, 25), (25, 26),
];

impl CouplingMap {
    pub fn new(physical_qubits: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= physical_qubits || v >= physical_qubits {
                return Err(Error::InvalidCouplingMap(format!(
                    "edge {u}-{v} outside {physical_qubits} qubits"
                )));
            }
            if u == v {
                return Err(Error::InvalidCouplingMap(format!("self-loop on {u}")));
            }
            set.insert((u.min(v), u.max(v)));
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); physical_qubits];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for a in &mut adjacency {
            a.sort_unstable();
        }
        let distance = (0..physical_qubits).map(|s| bfs(&adjacency, s)).collect();
        Ok(Self {
            physical_qubits,
            edges,
            adjacency,
            distance,
        })
    }

    pub fn linear(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i - 1, i))).expect("valid line")
    }

    pub fn grid(rows: usize, cols: usize) -> Self {
        let idx = |r: usize, c: usize| r * cols + c;
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    edges.push((idx(r, c), idx(r, c + 1)));
                }
                if r + 1 < rows {
                    edges.push((idx(r, c), idx(r + 1, c)));
                }
            }
        }
        Self::new(rows * cols, edges).expect("valid grid")
    }

    pub fn heavy_hex_27() -> Self {
        Self::new(27, HEAVY_HEX_27).expect("valid heavy-hex")
    }

    /// `linear-N`, `grid-RxC` or `heavy-hex-27`.
    pub fn named(name: &str) -> Result<Self> {
        let bad = || Error::InvalidCouplingMap(format!("unknown map `{name}`"));
        if name == "heavy-hex-27" {
            return Ok(Self::heavy_hex_27());
        }
        if let Some(n) = name.strip_prefix("linear-") {
            let n: usize = n.parse().map_err(|_| bad())?;
            return if n == 0 { Err(bad()) } else { Ok(Self::linear(n)) };
        }
        if let Some(dims) = name.strip_prefix("grid-") {
            let (r, c) = dims.split_once('x').ok_or_else(bad)?;
            let r: usize = r.parse().map_err(|_| bad())?;
            let c: usize = c.parse().map_err(|_| bad())?;
            return if r == 0 || c == 0 { Err(bad()) } else { Ok(Self::grid(r, c)) };
        }
        Err(bad())
    }

    /// File format: first non-empty line is the qubit count, then one
    /// `u v` edge per line. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let n: usize = lines
            .next()
            .ok_or_else(|| Error::InvalidCouplingMap("empty file".into()))?
            .parse()
            .map_err(|_| Error::InvalidCouplingMap("first line must be the qubit count".into()))?;
        let mut edges = Vec::new();
        for l in lines {
            let mut it = l.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(u)), Some(Ok(v)), None) => edges.push((u, v)),
                _ => return Err(Error::InvalidCouplingMap(format!("bad edge line `{l}`"))),
            }
        }
        Self::new(n, edges)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.physical_qubits);
        for (u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn physical_qubits(&self) -> usize {
        self.physical_qubits
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, p: usize) -> &[usize] {
        &self.adjacency[p]
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.distance[a][b] == 1
    }

    /// Hop distance, `None` when unreachable.
    pub fn distance(&self, a: usize, b: usize) -> Option<u32> {
        let d = self.distance[a][b];
        (d != UNREACHABLE).then_some(d)
    }

    pub(crate) fn raw_distance(&self, a: usize, b: usize) -> u32 {
        self.distance[a][b]
    }

    /// Shortest path `a .. b` inclusive, preferring low-index neighbours.
    pub fn shortest_path(&self, a: usize, b: usize) -> Result<Vec<usize>> {
        if self.distance[a][b] == UNREACHABLE {
            return Err(Error::Disconnected { from: a, to: b });
        }
        let mut path = vec![a];
        let mut cur = a;
        while cur != b {
            cur = *self.adjacency[cur]
                .iter()
                .find(|&&n| self.distance[n][b] + 1 == self.distance[cur][b])
                .expect("distance table is consistent");
            path.push(cur);
        }
        Ok(path)
    }
}

fn bfs(adjacency: &[Vec<usize>], source: usize) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; adjacency.len()];
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        for &v in &adjacency[u] {
            if dist[v] == UNREACHABLE {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_maps() {
        let line = CouplingMap::named("linear-4").unwrap();
        assert_eq!(line.edges(), &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(line.distance(0, 3), Some(3));
        let grid = CouplingMap::named("grid-2x3").unwrap();
        assert_eq!(grid.physical_qubits(), 6);
        assert_eq!(grid.edges().len(), 7);
        let hh = CouplingMap::named("heavy-hex-27").unwrap();
        assert_eq!(hh.edges().len(), 28);
        assert!((0..27).all(|p| hh.distance(0, p).is_some()));
        assert!(hh.neighbors(0).len() == 1 && hh.neighbors(1).len() == 3);
        assert!(CouplingMap::named("ring-5").is_err());
        assert!(CouplingMap::named("linear-0").is_err());
    }

    #[test]
    fn file_format_round_trip() {
        let cm = CouplingMap::parse("# tiny\n3\n0 1\n2 1\n").unwrap();
        assert_eq!(cm.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(CouplingMap::parse(&cm.to_text()).unwrap(), cm);
        assert!(CouplingMap::parse("2\n0 2\n").is_err());
        assert!(CouplingMap::parse("2\n0\n").is_err());
    }

    #[test]
    fn paths_and_disconnection() {
        let cm = CouplingMap::new(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(cm.distance(0, 2), None);
        assert_eq!(cm.shortest_path(0, 2), Err(Error::Disconnected { from: 0, to: 2 }));
        let line = CouplingMap::linear(5);
        assert_eq!(line.shortest_path(4, 1).unwrap(), vec![4, 3, 2, 1]);
    }
}
