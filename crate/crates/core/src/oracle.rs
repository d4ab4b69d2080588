//! Ground truth by brute force over every labeled graph on n ≤ 7 vertices.
//!
//! The graph space is walked once per n in reflected Gray-code order over
//! the C(n,2) edge bits, flipping one adjacency bit per step. For each graph
//! the closed-neighborhood union of every vertex subset is built by a
//! subset DP, which yields X and N for all k at once. Statistics are tallied
//! as exact integers per edge count e; a query for (k, p) then weights each
//! edge-count class by p^e (1-p)^(M-e). Integer tallies make the result
//! independent of thread count and summation order; the final weighted sum
//! uses compensated (Neumaier) summation in increasing e.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ORACLE_MAX_N: usize = 7;

#[derive(Clone, Debug, Default)]
struct KTally {
    sum_x: Vec<u64>,
    sum_x2: Vec<u64>,
    sum_n: Vec<u64>,
    sum_n2: Vec<u64>,
    x_pos: Vec<u64>,
    x_one: Vec<u64>,
    n_pos: Vec<u64>,
}

impl KTally {
    fn new(len: usize) -> Self {
        Self {
            sum_x: vec![0; len],
            sum_x2: vec![0; len],
            sum_n: vec![0; len],
            sum_n2: vec![0; len],
            x_pos: vec![0; len],
            x_one: vec![0; len],
            n_pos: vec![0; len],
        }
    }

    fn merge(&mut self, o: &KTally) {
        for (a, b) in [
            (&mut self.sum_x, &o.sum_x),
            (&mut self.sum_x2, &o.sum_x2),
            (&mut self.sum_n, &o.sum_n),
            (&mut self.sum_n2, &o.sum_n2),
            (&mut self.x_pos, &o.x_pos),
            (&mut self.x_one, &o.x_one),
            (&mut self.n_pos, &o.n_pos),
        ] {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }
}

/// Integer tallies of X and N over all 2^C(n,2) labeled graphs, by edge
/// count, for every k in 1..=n.
#[derive(Clone, Debug)]
pub struct GraphSpace {
    n: usize,
    pairs: usize,
    graphs: Vec<u64>,
    per_k: Vec<KTally>,
}

#[derive(Clone, Debug)]
struct Partial {
    graphs: Vec<u64>,
    per_k: Vec<KTally>,
}

impl Partial {
    fn new(n: usize, pairs: usize) -> Self {
        Self {
            graphs: vec![0; pairs + 1],
            per_k: (0..n).map(|_| KTally::new(pairs + 1)).collect(),
        }
    }
}

fn edge_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            v.push((a, b));
        }
    }
    v
}

fn walk_chunk(n: usize, pairs: &[(usize, usize)], start: u64, end: u64) -> Partial {
    let mut part = Partial::new(n, pairs.len());
    let subsets = 1usize << n;
    let mut adj = [0u8; ORACLE_MAX_N];
    let gray = |s: u64| s ^ (s >> 1);
    let mut mask = gray(start);
    for (t, &(a, b)) in pairs.iter().enumerate() {
        if mask >> t & 1 == 1 {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
    }
    let full = ((1u16 << n) - 1) as u8;
    let mut union = vec![0u8; subsets];
    let mut xs = [0u64; ORACLE_MAX_N + 1];
    let mut ns = [0u64; ORACLE_MAX_N + 1];

    let mut s = start;
    loop {
        xs.fill(0);
        ns.fill(0);
        for set in 1..subsets {
            let low = set.trailing_zeros() as usize;
            union[set] = union[set & (set - 1)] | adj[low] | (1 << low);
            let missed = (full & !union[set]).count_ones();
            let k = set.count_ones() as usize;
            match missed {
                0 => xs[k] += 1,
                1 => ns[k] += 1,
                _ => {}
            }
        }
        let e = mask.count_ones() as usize;
        part.graphs[e] += 1;
        for k in 1..=n {
            let t = &mut part.per_k[k - 1];
            let (x, nn) = (xs[k], ns[k]);
            t.sum_x[e] += x;
            t.sum_x2[e] += x * x;
            t.sum_n[e] += nn;
            t.sum_n2[e] += nn * nn;
            t.x_pos[e] += u64::from(x > 0);
            t.x_one[e] += u64::from(x == 1);
            t.n_pos[e] += u64::from(nn > 0);
        }

        s += 1;
        if s >= end {
            break;
        }
        let bit = s.trailing_zeros() as usize;
        mask ^= 1 << bit;
        let (a, b) = pairs[bit];
        adj[a] ^= 1 << b;
        adj[b] ^= 1 << a;
    }
    part
}

impl GraphSpace {
    pub fn enumerate(n: usize) -> Result<Self> {
        if n == 0 || n > ORACLE_MAX_N {
            return Err(Error::Capacity {
                n,
                max: ORACLE_MAX_N,
            });
        }
        let pairs = edge_pairs(n);
        let m = pairs.len();
        let total = 1u64 << m;
        let chunk_bits = m.min(8);
        let chunks = 1u64 << chunk_bits;
        let per = total / chunks;
        let parts: Vec<Partial> = (0..chunks)
            .into_par_iter()
            .map(|c| walk_chunk(n, &pairs, c * per, (c + 1) * per))
            .collect();
        let mut acc = Partial::new(n, m);
        for p in &parts {
            for (x, y) in acc.graphs.iter_mut().zip(&p.graphs) {
                *x += y;
            }
            for (a, b) in acc.per_k.iter_mut().zip(&p.per_k) {
                a.merge(b);
            }
        }
        Ok(Self {
            n,
            pairs: m,
            graphs: acc.graphs,
            per_k: acc.per_k,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn graph_count(&self) -> u64 {
        1u64 << self.pairs
    }

    pub fn report(&self, k: usize, p: f64) -> Result<OracleReport> {
        if k == 0 || k > self.n {
            return Err(Error::Domain(format!(
                "k={k} outside 1..={}",
                self.n
            )));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("p={p} not in [0,1]")));
        }
        let m = self.pairs as i32;
        let weights: Vec<f64> = (0..=m).map(|e| p.powi(e) * (1.0 - p).powi(m - e)).collect();
        let wsum = |counts: &[u64]| neumaier(weights.iter().zip(counts).map(|(w, &c)| w * c as f64));
        let t = &self.per_k[k - 1];
        Ok(OracleReport {
            n: self.n,
            k,
            p,
            e_x: wsum(&t.sum_x),
            e_x2: wsum(&t.sum_x2),
            e_n: wsum(&t.sum_n),
            e_n2: wsum(&t.sum_n2),
            p_x_pos: wsum(&t.x_pos),
            p_unique: wsum(&t.x_one),
            p_near_pos: wsum(&t.n_pos),
            weight_sum: wsum(&self.graphs),
            graphs_enumerated: self.graph_count(),
        })
    }
}

fn neumaier<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in it {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Exact finite-n expectations and probabilities for one (n, k, p).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub e_x: f64,
    pub e_x2: f64,
    pub e_n: f64,
    pub e_n2: f64,
    /// Pr(X > 0)
    pub p_x_pos: f64,
    /// Pr(X = 1)
    pub p_unique: f64,
    /// Pr(N > 0)
    pub p_near_pos: f64,
    /// Total probability mass; 1 up to rounding.
    pub weight_sum: f64,
    pub graphs_enumerated: u64,
}

pub fn enumerate_graph_space(n: usize, k: usize, p: f64) -> Result<OracleReport> {
    GraphSpace::enumerate(n)?.report(k, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k3_at_certain_edges() {
        let r = enumerate_graph_space(3, 1, 1.0).unwrap();
        assert_eq!(r.e_x, 3.0);
        assert_eq!(r.p_x_pos, 1.0);
        assert_eq!(r.e_n, 0.0);
        assert_eq!(r.graphs_enumerated, 8);
    }

    #[test]
    fn edgeless_at_zero_probability() {
        let r = enumerate_graph_space(3, 1, 0.0).unwrap();
        assert_eq!(r.e_x, 0.0);
        assert_eq!(r.e_n, 0.0);
        assert_eq!(r.p_x_pos, 0.0);
    }

    #[test]
    fn capacity_and_domain() {
        assert!(matches!(
            enumerate_graph_space(8, 2, 0.5),
            Err(Error::Capacity { .. })
        ));
        let space = GraphSpace::enumerate(4).unwrap();
        assert!(space.report(5, 0.5).is_err());
        assert!(space.report(2, 1.5).is_err());
    }

    #[test]
    fn graph_counts_by_edges_are_binomial() {
        let space = GraphSpace::enumerate(5).unwrap();
        let mut c = 1u64;
        for e in 0..=10u64 {
            assert_eq!(space.graphs[e as usize], c);
            c = c * (10 - e) / (e + 1);
        }
    }

    #[test]
    fn weights_sum_to_one() {
        for n in 1..=6 {
            let space = GraphSpace::enumerate(n).unwrap();
            for &p in &[0.0, 0.2, 0.5, 0.7, 1.0] {
                let r = space.report(1, p).unwrap();
                assert!((r.weight_sum - 1.0).abs() < 1e-12);
            }
        }
    }
}
