//! Labeled simple graphs with bitmask adjacency, G(n,p) sampling, and the
//! domination primitives used everywhere else.
//!
//! Text format: first line `n m`, then `m` lines `u v` with `u < v`, sorted
//! lexicographically. Blank lines and lines starting with `#` are ignored on
//! input.

use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::vertex_set::{VertexSet, MAX_VERTICES};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<VertexSet>,
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::Capacity {
                n,
                max: MAX_VERTICES,
            });
        }
        Ok(Self {
            n,
            adj: vec![VertexSet::empty(); n],
        })
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut g = Self::empty(n)?;
        let all = VertexSet::full(n);
        for v in 0..n {
            g.adj[v] = all.without(v);
        }
        Ok(g)
    }

    /// Cycle `0-1-..-(n-1)-0`.
    pub fn cycle(n: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n).map(|v| (v, (v + 1) % n)).collect();
        Self::from_edges(n, &edges)
    }

    /// Path `0-1-..-(n-1)`.
    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Self::from_edges(n, &edges)
    }

    /// Star with center 0.
    pub fn star(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|v| (0, v)).collect();
        Self::from_edges(n, &edges)
    }

    /// Builds a graph from an edge list. Duplicate edges are merged.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for &(u, v) in edges {
            g.check_pair(u, v)?;
            g.set_edge(u, v, true);
        }
        Ok(g)
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }

    fn check_pair(&self, u: usize, v: usize) -> Result<()> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        Ok(())
    }

    fn set_edge(&mut self, u: usize, v: usize, present: bool) {
        if present {
            self.adj[u].insert(v);
            self.adj[v].insert(u);
        } else {
            self.adj[u].remove(v);
            self.adj[v].remove(u);
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].contains(v)
    }

    /// Open neighborhood.
    #[inline]
    pub fn neighbors(&self, v: usize) -> VertexSet {
        self.adj[v]
    }

    #[inline]
    pub fn closed_neighborhood(&self, v: usize) -> VertexSet {
        self.adj[v].with(v)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(VertexSet::len).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(VertexSet::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            for v in self.adj[u].iter().filter(|&v| v > u) {
                out.push((u, v));
            }
        }
        out
    }

    /// Checks the structural invariants: no loops, symmetry, no stray bits.
    pub fn is_well_formed(&self) -> bool {
        let all = self.vertices();
        self.adj.len() == self.n
            && (0..self.n).all(|v| {
                let row = self.adj[v];
                !row.contains(v)
                    && row.is_subset(&all)
                    && row.iter().all(|u| self.adj[u].contains(v))
            })
    }

    /// Short content hash (first 16 hex digits of SHA-256 over the text form).
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_text(&self) -> String {
        let edges = self.edges();
        let mut s = format!("{} {}\n", self.n, edges.len());
        for (u, v) in edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges())
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Graph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let parse_two = |line: usize, l: &str| -> Result<(usize, usize)> {
            let mut it = l.split_whitespace().map(|t| {
                t.parse::<usize>().map_err(|e| Error::Parse {
                    line,
                    msg: format!("{t:?}: {e}"),
                })
            });
            let a = it.next().ok_or_else(|| Error::Parse {
                line,
                msg: "expected two integers".into(),
            })??;
            let b = it.next().ok_or_else(|| Error::Parse {
                line,
                msg: "expected two integers".into(),
            })??;
            if it.next().is_some() {
                return Err(Error::Parse {
                    line,
                    msg: "trailing tokens".into(),
                });
            }
            Ok((a, b))
        };

        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let (n, m) = parse_two(hline, header)?;
        let mut g = Graph::empty(n)?;
        let mut count = 0;
        for (line, l) in lines {
            let (u, v) = parse_two(line, l)?;
            if u >= v {
                return Err(Error::Parse {
                    line,
                    msg: format!("edge ({u}, {v}) must satisfy u < v"),
                });
            }
            g.check_pair(u, v).map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?;
            if g.has_edge(u, v) {
                return Err(Error::Parse {
                    line,
                    msg: format!("duplicate edge ({u}, {v})"),
                });
            }
            g.set_edge(u, v, true);
            count += 1;
        }
        if count != m {
            return Err(Error::Parse {
                line: hline,
                msg: format!("header announces {m} edges, found {count}"),
            });
        }
        Ok(g)
    }
}

/// Samples G(n,p). Pairs `(i, j)`, `i < j`, are visited in lexicographic
/// order and each consumes exactly one uniform variate; the edge is present
/// iff the variate is `< p`.
pub fn generate_gnp(n: usize, p: f64, rng: &mut RngStream) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("edge probability {p} not in [0,1]")));
    }
    if n == 0 {
        return Err(Error::Domain("graph needs at least one vertex".into()));
    }
    let mut g = Graph::empty(n)?;
    for i in 0..n {
        for j in i + 1..n {
            if rng.next_f64() < p {
                g.set_edge(i, j, true);
            }
        }
    }
    Ok(g)
}

/// Subgraph induced on `w`, relabeled `0..|w|` in ascending order of the
/// original labels. The second component maps new label to old label.
pub fn induced_subgraph(g: &Graph, w: VertexSet) -> Result<(Graph, Vec<usize>)> {
    if w.is_empty() {
        return Err(Error::Domain("induced subgraph on an empty vertex set".into()));
    }
    w.check_within(g.n)?;
    let relabel = w.to_vec();
    let mut h = Graph::empty(relabel.len())?;
    for (a, &old_a) in relabel.iter().enumerate() {
        for (b, &old_b) in relabel.iter().enumerate().skip(a + 1) {
            if g.has_edge(old_a, old_b) {
                h.set_edge(a, b, true);
            }
        }
    }
    Ok((h, relabel))
}

/// Vertices neither in `s` nor adjacent to it: the complement of the union
/// of closed neighborhoods over `s`.
pub fn undominated(g: &Graph, s: VertexSet) -> VertexSet {
    let mut covered = s;
    for v in s.iter().filter(|&v| v < g.n) {
        covered = covered | g.adj[v];
    }
    g.vertices() - covered
}

pub fn is_dominating(g: &Graph, s: VertexSet) -> bool {
    undominated(g, s).is_empty()
}

fn normalize(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Returns a copy of `g` with the `remove` edges deleted and the `add` edges
/// inserted. Every removed pair must be an edge, every added pair a non-edge,
/// and no pair may appear in both lists.
pub fn toggle_edges(
    g: &Graph,
    remove: &[(usize, usize)],
    add: &[(usize, usize)],
) -> Result<Graph> {
    for &(u, v) in remove.iter().chain(add) {
        g.check_pair(u, v)?;
    }
    for &(u, v) in remove {
        if add.iter().any(|&(a, b)| normalize(a, b) == normalize(u, v)) {
            let (a, b) = normalize(u, v);
            return Err(Error::ConflictingEdit(a, b));
        }
        if !g.has_edge(u, v) {
            return Err(Error::MissingEdge(u, v));
        }
    }
    for &(u, v) in add {
        if g.has_edge(u, v) {
            return Err(Error::ExistingEdge(u, v));
        }
    }
    let mut out = g.clone();
    for &(u, v) in remove {
        out.set_edge(u, v, false);
    }
    for &(u, v) in add {
        out.set_edge(u, v, true);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(vs: &[usize]) -> VertexSet {
        VertexSet::from_vertices(vs.iter().copied())
    }

    #[test]
    fn gnp_extremes() {
        let mut rng = RngStream::new(9, 0);
        let g = generate_gnp(5, 0.0, &mut rng).unwrap();
        assert_eq!(g.edge_count(), 0);
        let g = generate_gnp(5, 1.0, &mut rng).unwrap();
        assert_eq!(g, Graph::complete(5).unwrap());
    }

    #[test]
    fn gnp_rejects_bad_input() {
        let mut rng = RngStream::new(0, 0);
        assert!(matches!(
            generate_gnp(MAX_VERTICES + 1, 0.5, &mut rng),
            Err(Error::Capacity { .. })
        ));
        assert!(matches!(
            generate_gnp(4, 1.5, &mut rng),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn gnp_beyond_one_word() {
        let mut rng = RngStream::new(3, 1);
        let g = generate_gnp(150, 0.1, &mut rng).unwrap();
        assert!(g.is_well_formed());
        assert!(g.edges().iter().any(|&(_, v)| v >= 64));
    }

    #[test]
    fn induced_examples() {
        let k5 = Graph::complete(5).unwrap();
        let (h, map) = induced_subgraph(&k5, set(&[0, 1, 2])).unwrap();
        assert_eq!(h, Graph::complete(3).unwrap());
        assert_eq!(map, vec![0, 1, 2]);

        let e5 = Graph::empty(5).unwrap();
        let (h, map) = induced_subgraph(&e5, set(&[1, 3])).unwrap();
        assert_eq!(h, Graph::empty(2).unwrap());
        assert_eq!(map, vec![1, 3]);

        let c5 = Graph::cycle(5).unwrap();
        let (h, _) = induced_subgraph(&c5, set(&[0, 1, 2])).unwrap();
        assert_eq!(h.edges(), vec![(0, 1), (1, 2)]);

        assert!(matches!(
            induced_subgraph(&c5, VertexSet::empty()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn undominated_examples() {
        let c5 = Graph::cycle(5).unwrap();
        assert!(undominated(&c5, c5.vertices()).is_empty());
        let e5 = Graph::empty(5).unwrap();
        assert_eq!(undominated(&e5, set(&[0, 1])), set(&[2, 3, 4]));
        assert_eq!(undominated(&c5, set(&[0, 1])), set(&[3]));
    }

    #[test]
    fn toggle_examples() {
        let k3 = Graph::complete(3).unwrap();
        let g = toggle_edges(&k3, &[(0, 1)], &[]).unwrap();
        assert_eq!(g.edges(), vec![(0, 2), (1, 2)]);
        assert_eq!(k3.edge_count(), 3);

        let e4 = Graph::empty(4).unwrap();
        let g = toggle_edges(&e4, &[], &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(g.edges(), vec![(0, 1), (2, 3)]);

        let c5 = Graph::cycle(5).unwrap();
        let g = toggle_edges(&c5, &[(0, 1)], &[(0, 2)]).unwrap();
        assert_eq!(g.edges(), vec![(0, 2), (0, 4), (1, 2), (2, 3), (3, 4)]);
    }

    #[test]
    fn toggle_errors_name_the_pair() {
        let c5 = Graph::cycle(5).unwrap();
        assert_eq!(
            toggle_edges(&c5, &[(0, 2)], &[]),
            Err(Error::MissingEdge(0, 2))
        );
        assert_eq!(
            toggle_edges(&c5, &[], &[(1, 2)]),
            Err(Error::ExistingEdge(1, 2))
        );
        assert_eq!(toggle_edges(&c5, &[], &[(3, 3)]), Err(Error::SelfLoop(3)));
        assert_eq!(
            toggle_edges(&c5, &[(0, 1)], &[(1, 0)]),
            Err(Error::ConflictingEdit(0, 1))
        );
    }

    #[test]
    fn text_format() {
        let c5 = Graph::cycle(5).unwrap();
        let txt = c5.to_text();
        assert_eq!(txt, "5 5\n0 1\n0 4\n1 2\n2 3\n3 4\n");
        assert_eq!(txt.parse::<Graph>().unwrap(), c5);
        assert!("3 1\n1 0\n".parse::<Graph>().is_err());
        assert!("3 2\n0 1\n".parse::<Graph>().is_err());
        assert!("3 1\n0 7\n".parse::<Graph>().is_err());
        assert!("# comment\n\n2 1\n0 1\n".parse::<Graph>().is_ok());
    }
}
