//! Exact counting and enumeration of dominating and near-dominating k-sets.
//!
//! Two independent implementations share nothing but the [`Graph`] API:
//! a pruned branch-and-bound search over packed closed-neighborhood rows,
//! and [`count_k_sets_naive`], a plain combination walk used as the oracle.
//!
//! A k-set is *near-dominating* when exactly one vertex is left undominated.

use std::fmt;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{undominated, Graph};
use crate::vertex_set::{VertexSet, WORDS};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveCounts {
    /// k-sets with nothing undominated.
    pub dominating: u64,
    /// k-sets with exactly one undominated vertex.
    pub near: u64,
    /// k-sets whose status was decided individually (the rest were pruned).
    pub total_examined: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ClassTag {
    UniqueDom,
    MultiDom,
    NoDomWithNear,
    NoDomNoNear,
}

impl ClassTag {
    pub const ALL: [ClassTag; 4] = [
        ClassTag::UniqueDom,
        ClassTag::MultiDom,
        ClassTag::NoDomWithNear,
        ClassTag::NoDomNoNear,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassTag::UniqueDom => "UNIQUE_DOM",
            ClassTag::MultiDom => "MULTI_DOM",
            ClassTag::NoDomWithNear => "NO_DOM_WITH_NEAR",
            ClassTag::NoDomNoNear => "NO_DOM_NO_NEAR",
        }
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which of the four instance families a graph falls in for a given k.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum InstanceClass {
    /// Exactly one dominating k-set.
    UniqueDom { set: VertexSet },
    /// Two or more; `first` is the lexicographically smallest.
    MultiDom { first: VertexSet },
    /// None, but `set` leaves exactly `vertex` undominated.
    NoDomWithNear { set: VertexSet, vertex: usize },
    NoDomNoNear,
}

impl InstanceClass {
    pub fn tag(&self) -> ClassTag {
        match self {
            InstanceClass::UniqueDom { .. } => ClassTag::UniqueDom,
            InstanceClass::MultiDom { .. } => ClassTag::MultiDom,
            InstanceClass::NoDomWithNear { .. } => ClassTag::NoDomWithNear,
            InstanceClass::NoDomNoNear => ClassTag::NoDomNoNear,
        }
    }
}

fn check_k(g: &Graph, k: usize) -> Result<()> {
    if k == 0 || k > g.n() {
        Err(Error::Domain(format!(
            "set size k={k} outside 1..={} for this graph",
            g.n()
        )))
    } else {
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Packed branch-and-bound kernel.

type Row<const W: usize> = [u64; W];

#[inline(always)]
fn or<const W: usize>(a: &Row<W>, b: &Row<W>) -> Row<W> {
    let mut r = [0; W];
    for i in 0..W {
        r[i] = a[i] | b[i];
    }
    r
}

#[inline(always)]
fn and_not<const W: usize>(a: &Row<W>, b: &Row<W>) -> Row<W> {
    let mut r = [0; W];
    for i in 0..W {
        r[i] = a[i] & !b[i];
    }
    r
}

#[inline(always)]
fn and_count<const W: usize>(a: &Row<W>, b: &Row<W>) -> u32 {
    let mut c = 0;
    for i in 0..W {
        c += (a[i] & b[i]).count_ones();
    }
    c
}

#[inline(always)]
fn and_not_count<const W: usize>(a: &Row<W>, b: &Row<W>) -> u32 {
    let mut c = 0;
    for i in 0..W {
        c += (a[i] & !b[i]).count_ones();
    }
    c
}

#[inline(always)]
fn count<const W: usize>(a: &Row<W>) -> u32 {
    a.iter().map(|w| w.count_ones()).sum()
}

fn pack<const W: usize>(s: VertexSet) -> Row<W> {
    let mut r = [0; W];
    r.copy_from_slice(&s.words()[..W]);
    r
}

fn unpack<const W: usize>(r: &Row<W>) -> VertexSet {
    let mut words = [0u64; WORDS];
    words[..W].copy_from_slice(r);
    VertexSet::from_words(words)
}

/// Leaf callback: chosen positions, undominated count, undominated mask.
type Leaf<'a, const W: usize> = dyn FnMut(&[usize], u32, &Row<W>) -> ControlFlow<()> + 'a;

struct Kernel<const W: usize> {
    /// closed neighborhoods in search order; leaves report positions
    rows: Vec<Row<W>>,
    full: Row<W>,
    /// leaves with more undominated vertices than this are never reported,
    /// and subtrees that cannot get below it are cut
    threshold: u32,
    examined: u64,
    picks: Vec<usize>,
    gains: Vec<u32>,
}

impl<const W: usize> Kernel<W> {
    fn new(g: &Graph, order: &[usize], threshold: u32) -> Self {
        let rows = order
            .iter()
            .map(|&v| pack::<W>(g.closed_neighborhood(v)))
            .collect();
        Self {
            rows,
            full: pack::<W>(g.vertices()),
            threshold,
            examined: 0,
            picks: Vec::new(),
            gains: Vec::new(),
        }
    }

    fn run(&mut self, k: usize, leaf: &mut Leaf<'_, W>) -> ControlFlow<()> {
        self.picks.clear();
        self.dfs(0, k, [0; W], leaf)
    }

    fn dfs(
        &mut self,
        start: usize,
        left: usize,
        covered: Row<W>,
        leaf: &mut Leaf<'_, W>,
    ) -> ControlFlow<()> {
        let len = self.rows.len();
        let uncovered = and_not(&self.full, &covered);
        let u = count(&uncovered);
        if left == 0 {
            self.examined += 1;
            if u <= self.threshold {
                return leaf(&self.picks, u, &uncovered);
            }
            return ControlFlow::Continue(());
        }
        if left == 1 {
            for i in start..len {
                self.examined += 1;
                let rem = and_not_count(&uncovered, &self.rows[i]);
                if rem <= self.threshold {
                    self.picks.push(i);
                    let mask = and_not(&uncovered, &self.rows[i]);
                    let flow = leaf(&self.picks, rem, &mask);
                    self.picks.pop();
                    flow?;
                }
            }
            return ControlFlow::Continue(());
        }

        // Bound: the best `left` remaining candidates, each counted by how
        // many still-uncovered vertices it would cover.
        self.gains.clear();
        for i in start..len {
            self.gains.push(and_count(&uncovered, &self.rows[i]));
        }
        let take = left.min(self.gains.len());
        if take < self.gains.len() {
            self.gains
                .select_nth_unstable_by(take - 1, |a, b| b.cmp(a));
        }
        let best: u32 = self.gains[..take].iter().sum();
        if u.saturating_sub(best) > self.threshold {
            return ControlFlow::Continue(());
        }

        for i in start..=len.saturating_sub(left) {
            self.picks.push(i);
            let next = or(&covered, &self.rows[i]);
            let flow = self.dfs(i + 1, left - 1, next, leaf);
            self.picks.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }
}

fn words_needed(n: usize) -> usize {
    match n {
        0..=64 => 1,
        65..=128 => 2,
        _ => 4,
    }
}

/// Search order for counting: decreasing closed-neighborhood size, ties by
/// label. Large neighborhoods first makes the bound bite early.
fn degree_order(g: &Graph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    order
}

fn count_impl<const W: usize>(g: &Graph, k: usize) -> SolveCounts {
    let mut kernel = Kernel::<W>::new(g, &degree_order(g), 1);
    let (mut dominating, mut near) = (0u64, 0u64);
    let _ = kernel.run(k, &mut |_, u, _| {
        if u == 0 {
            dominating += 1;
        } else {
            near += 1;
        }
        ControlFlow::Continue(())
    });
    SolveCounts {
        dominating,
        near,
        total_examined: kernel.examined,
    }
}

fn find_dom_impl<const W: usize>(g: &Graph, k: usize, limit: usize) -> Vec<VertexSet> {
    let mut kernel = Kernel::<W>::new(g, &(0..g.n()).collect::<Vec<_>>(), 0);
    let mut out = Vec::new();
    let _ = kernel.run(k, &mut |picks, _, _| {
        out.push(VertexSet::from_vertices(picks.iter().copied()));
        if out.len() >= limit {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    out
}

fn find_near_impl<const W: usize>(g: &Graph, k: usize) -> Option<(VertexSet, usize)> {
    let mut kernel = Kernel::<W>::new(g, &(0..g.n()).collect::<Vec<_>>(), 1);
    let mut found = None;
    let _ = kernel.run(k, &mut |picks, u, mask| {
        if u == 1 {
            let v = unpack(mask).first().expect("one undominated vertex");
            found = Some((VertexSet::from_vertices(picks.iter().copied()), v));
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    found
}

macro_rules! dispatch {
    ($n:expr, $f:ident($($arg:expr),*)) => {
        match words_needed($n) {
            1 => $f::<1>($($arg),*),
            2 => $f::<2>($($arg),*),
            _ => $f::<4>($($arg),*),
        }
    };
}

/// Exact counts of dominating and near-dominating k-sets, by pruned search.
pub fn count_k_sets(g: &Graph, k: usize) -> Result<SolveCounts> {
    check_k(g, k)?;
    Ok(dispatch!(g.n(), count_impl(g, k)))
}

/// Up to `limit` dominating k-sets in lexicographic order.
pub fn find_dominating_sets(g: &Graph, k: usize, limit: usize) -> Result<Vec<VertexSet>> {
    check_k(g, k)?;
    if limit == 0 {
        return Err(Error::Domain("limit must be at least 1".into()));
    }
    Ok(dispatch!(g.n(), find_dom_impl(g, k, limit)))
}

/// Lexicographically first k-set leaving exactly one vertex undominated,
/// together with that vertex.
pub fn find_near_witness(g: &Graph, k: usize) -> Result<Option<(VertexSet, usize)>> {
    check_k(g, k)?;
    Ok(dispatch!(g.n(), find_near_impl(g, k)))
}

pub fn classify_instance(g: &Graph, k: usize) -> Result<InstanceClass> {
    let doms = find_dominating_sets(g, k, 2)?;
    Ok(match doms.as_slice() {
        [only] => InstanceClass::UniqueDom { set: *only },
        [first, _] => InstanceClass::MultiDom { first: *first },
        _ => match find_near_witness(g, k)? {
            Some((set, vertex)) => InstanceClass::NoDomWithNear { set, vertex },
            None => InstanceClass::NoDomNoNear,
        },
    })
}

// ---------------------------------------------------------------------------
// Oracle.

/// Index-array walk over all k-combinations of `0..n` in lexicographic order.
pub struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            idx: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = VertexSet;

    fn next(&mut self) -> Option<VertexSet> {
        if self.done {
            return None;
        }
        let out = VertexSet::from_vertices(self.idx.iter().copied());
        let k = self.idx.len();
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Same contract as [`count_k_sets`], by plain enumeration of every k-set.
pub fn count_k_sets_naive(g: &Graph, k: usize) -> Result<SolveCounts> {
    check_k(g, k)?;
    let mut c = SolveCounts::default();
    for s in Combinations::new(g.n(), k) {
        c.total_examined += 1;
        match undominated(g, s).len() {
            0 => c.dominating += 1,
            1 => c.near += 1,
            _ => {}
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(vs: &[usize]) -> VertexSet {
        VertexSet::from_vertices(vs.iter().copied())
    }

    fn counts(d: u64, n: u64) -> (u64, u64) {
        (d, n)
    }

    fn dn(c: SolveCounts) -> (u64, u64) {
        (c.dominating, c.near)
    }

    #[test]
    fn count_examples() {
        let k5 = Graph::complete(5).unwrap();
        let e5 = Graph::empty(5).unwrap();
        let c5 = Graph::cycle(5).unwrap();
        for f in [count_k_sets, count_k_sets_naive] {
            assert_eq!(dn(f(&k5, 1).unwrap()), counts(5, 0));
            assert_eq!(dn(f(&e5, 3).unwrap()), counts(0, 0));
            assert_eq!(dn(f(&c5, 2).unwrap()), counts(5, 5));
        }
        let p3 = Graph::path(3).unwrap();
        assert_eq!(dn(count_k_sets_naive(&p3, 1).unwrap()), counts(1, 2));
        assert_eq!(count_k_sets_naive(&c5, 2).unwrap().total_examined, 10);
    }

    #[test]
    fn k_out_of_range() {
        let c5 = Graph::cycle(5).unwrap();
        assert!(count_k_sets(&c5, 0).is_err());
        assert!(count_k_sets(&c5, 6).is_err());
        assert!(count_k_sets_naive(&c5, 6).is_err());
        assert!(find_dominating_sets(&c5, 2, 0).is_err());
    }

    #[test]
    fn full_set_dominates() {
        let e7 = Graph::empty(7).unwrap();
        assert_eq!(count_k_sets(&e7, 7).unwrap().dominating, 1);
        assert_eq!(count_k_sets(&e7, 6).unwrap().near, 7);
    }

    #[test]
    fn find_examples() {
        let k3 = Graph::complete(3).unwrap();
        assert_eq!(
            find_dominating_sets(&k3, 1, 10).unwrap(),
            vec![set(&[0]), set(&[1]), set(&[2])]
        );
        let e4 = Graph::empty(4).unwrap();
        assert!(find_dominating_sets(&e4, 2, 10).unwrap().is_empty());
        let c5 = Graph::cycle(5).unwrap();
        assert_eq!(find_dominating_sets(&c5, 2, 1).unwrap(), vec![set(&[0, 2])]);
        assert_eq!(
            find_dominating_sets(&c5, 2, 10).unwrap(),
            vec![
                set(&[0, 2]),
                set(&[0, 3]),
                set(&[1, 3]),
                set(&[1, 4]),
                set(&[2, 4])
            ]
        );
    }

    #[test]
    fn near_witness_examples() {
        let p3 = Graph::path(3).unwrap();
        assert_eq!(find_near_witness(&p3, 1).unwrap(), Some((set(&[0]), 2)));
        let k4 = Graph::complete(4).unwrap();
        assert_eq!(find_near_witness(&k4, 1).unwrap(), None);
        let c5 = Graph::cycle(5).unwrap();
        assert_eq!(find_near_witness(&c5, 2).unwrap(), Some((set(&[0, 1]), 3)));
    }

    #[test]
    fn classify_examples() {
        let k5 = Graph::complete(5).unwrap();
        assert_eq!(classify_instance(&k5, 1).unwrap().tag(), ClassTag::MultiDom);
        let p3 = Graph::path(3).unwrap();
        assert_eq!(
            classify_instance(&p3, 1).unwrap(),
            InstanceClass::UniqueDom { set: set(&[1]) }
        );
        let e5 = Graph::empty(5).unwrap();
        assert_eq!(
            classify_instance(&e5, 2).unwrap(),
            InstanceClass::NoDomNoNear
        );
        // edgeless 3 with k=2: {0,1} misses only 2
        let e3 = Graph::empty(3).unwrap();
        assert_eq!(
            classify_instance(&e3, 2).unwrap(),
            InstanceClass::NoDomWithNear {
                set: set(&[0, 1]),
                vertex: 2
            }
        );
    }

    #[test]
    fn combinations_walk() {
        let all: Vec<_> = Combinations::new(4, 2).map(|s| s.to_vec()).collect();
        assert_eq!(
            all,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(Combinations::new(3, 4).count(), 0);
        assert_eq!(Combinations::new(3, 0).count(), 1);
    }

    #[test]
    fn wide_graphs_use_multiword_kernel() {
        // star on 100 vertices: the center is the only dominating singleton
        let g = Graph::star(100).unwrap();
        let c = count_k_sets(&g, 1).unwrap();
        assert_eq!(dn(c), dn(count_k_sets_naive(&g, 1).unwrap()));
        assert_eq!(c.dominating, 1);
        let c2 = count_k_sets(&g, 2).unwrap();
        assert_eq!(dn(c2), dn(count_k_sets_naive(&g, 2).unwrap()));
        assert_eq!(c2.dominating, 99);
        assert_eq!(
            classify_instance(&g, 1).unwrap(),
            InstanceClass::UniqueDom { set: set(&[0]) }
        );
        let big = Graph::star(200).unwrap();
        assert_eq!(count_k_sets(&big, 1).unwrap().dominating, 1);
    }
}
