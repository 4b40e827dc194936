//! Graph families under study: circles, tori, and arbitrary connected
//! d-regular graphs, plus an edge-list text format.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;

/// Retry cap for the configuration-model generator.
pub const GENERATION_ATTEMPT_CAP: usize = 10_000;

/// Undirected d-regular simple graph with sorted neighbor lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularGraph {
    n: usize,
    d: usize,
    adjacency: Vec<Vec<usize>>,
}

/// 2-D coordinate on an N x N torus, indexed as `x * N + y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusCoord {
    pub x: usize,
    pub y: usize,
}

impl TorusCoord {
    pub fn index(self, n: usize) -> usize {
        self.x * n + self.y
    }

    pub fn from_index(index: usize, n: usize) -> Self {
        Self {
            x: index / n,
            y: index % n,
        }
    }
}

impl RegularGraph {
    /// Validates and adopts an adjacency structure. Neighbor lists are sorted;
    /// every vertex must have the same degree, edges must be symmetric, and
    /// self-loops and duplicates are rejected. Requires `n * d` even.
    pub fn from_adjacency(mut adjacency: Vec<Vec<usize>>) -> Result<Self> {
        let n = adjacency.len();
        if n == 0 {
            return Err(Error::InvalidGraph("empty vertex set".into()));
        }
        let d = adjacency[0].len();
        if d == 0 {
            return Err(Error::InvalidGraph("degree 0 is not supported".into()));
        }
        for list in adjacency.iter_mut() {
            list.sort_unstable();
        }
        for (u, list) in adjacency.iter().enumerate() {
            if list.len() != d {
                return Err(Error::InvalidGraph(format!(
                    "vertex {u} has degree {}, expected {d}",
                    list.len()
                )));
            }
            for window in list.windows(2) {
                if window[0] == window[1] {
                    return Err(Error::InvalidGraph(format!(
                        "duplicate edge {u}-{}",
                        window[0]
                    )));
                }
            }
            for &v in list {
                if v >= n {
                    return Err(Error::InvalidGraph(format!(
                        "vertex {u} lists out-of-range neighbor {v}"
                    )));
                }
                if v == u {
                    return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
                }
                if adjacency[v].binary_search(&u).is_err() {
                    return Err(Error::InvalidGraph(format!(
                        "edge {u}-{v} is not symmetric"
                    )));
                }
            }
        }
        if n * d % 2 != 0 {
            return Err(Error::OddDegreeSum { n, d });
        }
        Ok(Self { n, d, adjacency })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// Edges with `u < v`, lexicographically sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.n * self.d / 2);
        for u in 0..self.n {
            for &v in &self.adjacency[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// BFS reachability of every vertex from vertex 0.
    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = vec![0usize];
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = queue.pop() {
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    reached += 1;
                    queue.push(v);
                }
            }
        }
        reached == self.n
    }

    pub fn adjacency_matrix<T: Scalar>(&self) -> DenseMatrix<T> {
        let mut a = DenseMatrix::<T>::zeros(self.n, self.n);
        for u in 0..self.n {
            for &v in &self.adjacency[u] {
                a.set(u, v, T::one());
            }
        }
        a
    }

    /// Returns `Some(n)` when this graph is exactly the canonical cycle on
    /// `n` vertices (vertex `i` adjacent to `i +- 1 mod n`).
    pub fn circle_size(&self) -> Option<usize> {
        if self.d != 2 || self.n < 3 {
            return None;
        }
        for i in 0..self.n {
            let mut expected = vec![(i + 1) % self.n, (i + self.n - 1) % self.n];
            expected.sort_unstable();
            if self.adjacency[i] != expected {
                return None;
            }
        }
        Some(self.n)
    }

    /// Returns `Some(N)` when this graph is exactly the canonical N x N torus
    /// under the `x * N + y` indexing.
    pub fn torus_size(&self) -> Option<usize> {
        if self.d != 4 {
            return None;
        }
        let side = (self.n as f64).sqrt().round() as usize;
        if side < 3 || side * side != self.n {
            return None;
        }
        for x in 0..side {
            for y in 0..side {
                let c = TorusCoord { x, y };
                let mut expected = vec![
                    TorusCoord {
                        x: (x + 1) % side,
                        y,
                    }
                    .index(side),
                    TorusCoord {
                        x: (x + side - 1) % side,
                        y,
                    }
                    .index(side),
                    TorusCoord {
                        x,
                        y: (y + 1) % side,
                    }
                    .index(side),
                    TorusCoord {
                        x,
                        y: (y + side - 1) % side,
                    }
                    .index(side),
                ];
                expected.sort_unstable();
                if self.adjacency[c.index(side)] != expected {
                    return None;
                }
            }
        }
        Some(side)
    }
}

/// Cycle graph on `n >= 3` vertices.
pub fn build_circle(n: usize) -> Result<RegularGraph> {
    if n < 3 {
        return Err(Error::TooFewVertices { n, min: 3 });
    }
    let adjacency = (0..n).map(|i| vec![(i + 1) % n, (i + n - 1) % n]).collect();
    RegularGraph::from_adjacency(adjacency)
}

/// N x N torus (4-regular) for `n >= 3`, indexed `x * n + y`.
pub fn build_torus(n: usize) -> Result<RegularGraph> {
    if n < 3 {
        return Err(Error::TooFewVertices { n, min: 3 });
    }
    let mut adjacency = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            adjacency.push(vec![
                TorusCoord { x: (x + 1) % n, y }.index(n),
                TorusCoord {
                    x: (x + n - 1) % n,
                    y,
                }
                .index(n),
                TorusCoord { x, y: (y + 1) % n }.index(n),
                TorusCoord {
                    x,
                    y: (y + n - 1) % n,
                }
                .index(n),
            ]);
        }
    }
    RegularGraph::from_adjacency(adjacency)
}

/// Random connected simple d-regular graph via the configuration model.
///
/// Shuffles `n*d` half-edge stubs into a perfect matching and rejects the
/// whole sample on any self-loop, duplicate edge, or disconnected result.
/// Deterministic for a given seed. Gives up after
/// [`GENERATION_ATTEMPT_CAP`] attempts.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<RegularGraph> {
    if d == 0 || d >= n {
        return Err(Error::InfeasibleDegree { n, d });
    }
    if n * d % 2 != 0 {
        return Err(Error::OddDegreeSum { n, d });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();

    'attempt: for _ in 0..GENERATION_ATTEMPT_CAP {
        stubs.shuffle(&mut rng);
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::with_capacity(d); n];
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v || adjacency[u].contains(&v) {
                continue 'attempt;
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        let graph = RegularGraph::from_adjacency(adjacency)?;
        if graph.is_connected() {
            return Ok(graph);
        }
    }
    Err(Error::GenerationFailed {
        n,
        d,
        attempts: GENERATION_ATTEMPT_CAP,
    })
}

/// Parses the edge-list text format: a header line `n d` followed by exactly
/// `n*d/2` lines `u v` (0-indexed). Accepts LF or CRLF and ignores trailing
/// blank lines. Errors carry the 1-based offending line number.
pub fn read_graph(text: &str) -> Result<RegularGraph> {
    let mut lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .collect();
    while matches!(lines.last(), Some((_, l)) if l.trim().is_empty()) {
        lines.pop();
    }
    let mut it = lines.into_iter();

    let (header_no, header) = it.next().ok_or(Error::Parse {
        line: 1,
        message: "missing header line \"n d\"".into(),
    })?;
    let mut fields = header.split_whitespace();
    let parse_usize = |field: Option<&str>, what: &str, line: usize| -> Result<usize> {
        field
            .ok_or_else(|| Error::Parse {
                line,
                message: format!("missing {what}"),
            })?
            .parse()
            .map_err(|_| Error::Parse {
                line,
                message: format!("invalid {what}"),
            })
    };
    let n = parse_usize(fields.next(), "vertex count", header_no)?;
    let d = parse_usize(fields.next(), "degree", header_no)?;
    if fields.next().is_some() {
        return Err(Error::Parse {
            line: header_no,
            message: "header must be exactly \"n d\"".into(),
        });
    }
    if n == 0 || d == 0 || d >= n {
        return Err(Error::Parse {
            line: header_no,
            message: format!("infeasible header: n={n}, d={d}"),
        });
    }
    if n * d % 2 != 0 {
        return Err(Error::Parse {
            line: header_no,
            message: format!("n*d must be even: n={n}, d={d}"),
        });
    }

    let expected_edges = n * d / 2;
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::with_capacity(d); n];
    let mut edge_count = 0usize;
    for (line_no, line) in it {
        let mut fields = line.split_whitespace();
        let u = parse_usize(fields.next(), "edge endpoint", line_no)?;
        let v = parse_usize(fields.next(), "edge endpoint", line_no)?;
        if fields.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: "edge line must be exactly \"u v\"".into(),
            });
        }
        if u >= n || v >= n {
            return Err(Error::Parse {
                line: line_no,
                message: format!("vertex out of range in edge {u} {v} (n={n})"),
            });
        }
        if u == v {
            return Err(Error::Parse {
                line: line_no,
                message: format!("self-loop at vertex {u}"),
            });
        }
        if adjacency[u].contains(&v) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("duplicate edge {u} {v}"),
            });
        }
        edge_count += 1;
        if edge_count > expected_edges {
            return Err(Error::Parse {
                line: line_no,
                message: format!("more than the expected {expected_edges} edges"),
            });
        }
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    if edge_count < expected_edges {
        return Err(Error::Parse {
            line: edge_count + 1,
            message: format!("expected {expected_edges} edges, found {edge_count}"),
        });
    }
    for (u, list) in adjacency.iter().enumerate() {
        if list.len() != d {
            return Err(Error::InvalidGraph(format!(
                "vertex {u} has degree {}, expected {d}",
                list.len()
            )));
        }
    }
    RegularGraph::from_adjacency(adjacency)
}

/// Serializes to the edge-list text format. `read_graph(write_graph(g))`
/// reproduces `g` exactly.
pub fn write_graph(g: &RegularGraph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.degree());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_three_is_triangle() {
        let g = build_circle(3).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.degree(), 2);
        assert_eq!(g.neighbors(0), &[1, 2]);
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    #[test]
    fn circle_four_neighbors() {
        let g = build_circle(4).unwrap();
        assert_eq!(g.neighbors(0), &[1, 3]);
    }

    #[test]
    fn circle_eight_connected_even_sum() {
        let g = build_circle(8).unwrap();
        assert!(g.is_connected());
        assert_eq!(g.n() * g.degree(), 16);
    }

    #[test]
    fn circle_rejects_small() {
        assert!(matches!(build_circle(2), Err(Error::TooFewVertices { .. })));
    }

    #[test]
    fn torus_three() {
        let g = build_torus(3).unwrap();
        assert_eq!(g.n(), 9);
        assert_eq!(g.degree(), 4);
        // (0,0) -> {(1,0),(2,0),(0,1),(0,2)} = indices {3,6,1,2}
        assert_eq!(g.neighbors(0), &[1, 2, 3, 6]);
        assert_eq!(g.torus_size(), Some(3));
    }

    #[test]
    fn torus_four_connected() {
        let g = build_torus(4).unwrap();
        assert_eq!(g.n(), 16);
        assert!(g.is_connected());
    }

    #[test]
    fn torus_rejects_small() {
        assert!(build_torus(2).is_err());
    }

    #[test]
    fn torus_coord_round_trip() {
        let n = 5;
        for i in 0..n * n {
            assert_eq!(TorusCoord::from_index(i, n).index(n), i);
        }
    }

    #[test]
    fn random_regular_k4_is_unique() {
        for seed in [0, 1, 99] {
            let g = random_regular(4, 3, seed).unwrap();
            for v in 0..4 {
                let expected: Vec<usize> = (0..4).filter(|&u| u != v).collect();
                assert_eq!(g.neighbors(v), expected.as_slice());
            }
        }
    }

    #[test]
    fn random_regular_cubic_10() {
        let g = random_regular(10, 3, 42).unwrap();
        assert_eq!(g.n(), 10);
        assert!(g.is_connected());
        for v in 0..10 {
            assert_eq!(g.neighbors(v).len(), 3);
        }
    }

    #[test]
    fn random_regular_rejects_odd_sum() {
        assert!(matches!(
            random_regular(5, 3, 0),
            Err(Error::OddDegreeSum { .. })
        ));
    }

    #[test]
    fn random_regular_is_deterministic() {
        let a = random_regular(12, 3, 7).unwrap();
        let b = random_regular(12, 3, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn read_triangle() {
        let g = read_graph("3 2\n0 1\n1 2\n0 2").unwrap();
        assert_eq!(g.circle_size(), Some(3));
    }

    #[test]
    fn read_reports_self_loop_line() {
        let err = read_graph("3 2\n0 1\n1 2\n0 0").unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 4);
                assert!(message.contains("self-loop"));
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn read_accepts_crlf_and_trailing_blanks() {
        let g = read_graph("3 2\r\n0 1\r\n1 2\r\n0 2\r\n\r\n\n").unwrap();
        assert_eq!(g.n(), 3);
    }

    #[test]
    fn read_reports_edge_count_mismatch() {
        let err = read_graph("3 2\n0 1\n1 2").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn write_then_read_round_trips() {
        let g = build_circle(7).unwrap();
        let text = write_graph(&g);
        assert_eq!(read_graph(&text).unwrap(), g);
    }

    #[test]
    fn circle_detection_rejects_other_graphs() {
        let g = random_regular(4, 3, 0).unwrap();
        assert_eq!(g.circle_size(), None);
        let c = build_circle(6).unwrap();
        assert_eq!(c.circle_size(), Some(6));
        assert_eq!(c.torus_size(), None);
    }
}
