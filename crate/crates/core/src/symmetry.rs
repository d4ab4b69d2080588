//! Four-vertex edge swaps that flip whether a dominating k-set exists while
//! leaving an induced subgraph H untouched.
//!
//! With S the unique dominating k-set, v a vertex outside S ∪ H whose only
//! S-neighbor is u, z another member of S and w outside S ∪ H ∪ {v}, the
//! *forward* swap removes (u,v), (z,w) and adds (u,z), (v,w): v loses its
//! last link to S. The *reverse* swap starts from S missing only v and
//! removes (v,w), (u,z) and adds (v,u), (z,w): v gains a link to S. Both
//! keep every degree, and applying one then the other on the same quadruple
//! restores the graph.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{induced_subgraph, is_dominating, toggle_edges, undominated, Graph};
use crate::rng::RngStream;
use crate::solver::{classify_instance, count_k_sets, ClassTag};
use crate::vertex_set::VertexSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Direction {
    /// unique dominating set -> none
    Forward,
    /// none (one vertex missed) -> dominating
    Reverse,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "FORWARD",
            Direction::Reverse => "REVERSE",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Quad {
    pub u: usize,
    pub v: usize,
    pub z: usize,
    pub w: usize,
}

impl Quad {
    pub fn new(u: usize, v: usize, z: usize, w: usize) -> Self {
        Self { u, v, z, w }
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::from_vertices([self.u, self.v, self.z, self.w])
    }

    fn distinct(&self) -> bool {
        self.vertices().len() == 4
    }
}

type Pair = (usize, usize);

/// (removed, added) for a direction. The removed pairs are exactly the
/// edges the pattern requires; the added pairs are two of its non-edges.
pub fn edits(q: &Quad, dir: Direction) -> ([Pair; 2], [Pair; 2]) {
    let Quad { u, v, z, w } = *q;
    match dir {
        Direction::Forward => ([(u, v), (z, w)], [(u, z), (v, w)]),
        Direction::Reverse => ([(v, w), (u, z)], [(v, u), (z, w)]),
    }
}

/// Among the four vertices the only edges must be the two being removed.
fn check_pattern(g: &Graph, q: &Quad, dir: Direction) -> Result<()> {
    for x in [q.u, q.v, q.z, q.w] {
        if x >= g.n() {
            return Err(Error::VertexOutOfRange { vertex: x, n: g.n() });
        }
    }
    if !q.distinct() {
        return Err(Error::Precondition(format!(
            "quadruple {q:?} has repeated vertices"
        )));
    }
    let (removed, added) = edits(q, dir);
    let Quad { u, v, z, w } = *q;
    for (a, b) in removed {
        if !g.has_edge(a, b) {
            return Err(Error::MissingEdge(a, b));
        }
    }
    for (a, b) in added.into_iter().chain([(u, w), (v, z)]) {
        if g.has_edge(a, b) {
            return Err(Error::ExistingEdge(a, b));
        }
    }
    Ok(())
}

fn pick<T: Copy>(found: &[T], rng: Option<&mut RngStream>) -> Option<T> {
    match rng {
        _ if found.is_empty() => None,
        Some(r) => Some(found[r.below(found.len())]),
        None => Some(found[0]),
    }
}

/// A quadruple for the forward swap. Lexicographic in (v, z, w) when `rng`
/// is `None`, otherwise uniform over all valid quadruples.
pub fn find_forward_witness(
    g: &Graph,
    s: VertexSet,
    h: VertexSet,
    rng: Option<&mut RngStream>,
) -> Result<Option<Quad>> {
    s.check_within(g.n())?;
    h.check_within(g.n())?;
    if !s.is_disjoint(&h) {
        return Err(Error::Precondition(format!("S {s} meets H")));
    }
    if !is_dominating(g, s) {
        return Err(Error::Precondition(format!("S {s} is not dominating")));
    }
    let outside = g.vertices() - (s | h);
    let lexicographic = rng.is_none();
    let mut found = Vec::new();
    'search: for v in outside.iter() {
        let in_s = g.neighbors(v) & s;
        if in_s.len() != 1 {
            continue;
        }
        let u = in_s.first().expect("one neighbor");
        for z in (s.without(u)).iter() {
            if g.has_edge(u, z) {
                continue;
            }
            for w in (outside.without(v)).iter() {
                if g.has_edge(z, w) && !g.has_edge(u, w) && !g.has_edge(v, w) {
                    found.push(Quad::new(u, v, z, w));
                    if lexicographic {
                        break 'search;
                    }
                }
            }
        }
    }
    Ok(pick(&found, rng))
}

/// `(u, z, w)` for the reverse swap, given S missing exactly `v`.
/// Lexicographic in (u, z, w) when `rng` is `None`.
pub fn find_reverse_witness(
    g: &Graph,
    s: VertexSet,
    v: usize,
    h: VertexSet,
    rng: Option<&mut RngStream>,
) -> Result<Option<(usize, usize, usize)>> {
    s.check_within(g.n())?;
    h.check_within(g.n())?;
    if v >= g.n() {
        return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
    }
    if !s.with(v).is_disjoint(&h) {
        return Err(Error::Precondition(format!("S ∪ {{{v}}} meets H")));
    }
    if undominated(g, s) != VertexSet::singleton(v) {
        return Err(Error::Precondition(format!(
            "S {s} does not leave exactly vertex {v} undominated"
        )));
    }
    let outside = g.vertices() - (s | h).with(v);
    let lexicographic = rng.is_none();
    let mut found = Vec::new();
    'search: for u in s.iter() {
        for z in s.without(u).iter() {
            if !g.has_edge(u, z) {
                continue;
            }
            for w in outside.iter() {
                if g.has_edge(v, w) && !g.has_edge(u, w) && !g.has_edge(z, w) {
                    found.push((u, z, w));
                    if lexicographic {
                        break 'search;
                    }
                }
            }
        }
    }
    Ok(pick(&found, rng))
}

/// Record of one swap. The flags set by [`apply_mapping`] follow from the
/// construction; `h_unchanged`, `flipped` and the classes are filled in by
/// [`verify_certificate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MappingCertificate {
    pub direction: Direction,
    pub quad: Quad,
    pub removed: [Pair; 2],
    pub added: [Pair; 2],
    pub h_vertices: VertexSet,
    /// the set S whose status the swap targets
    pub target: VertexSet,
    pub degree_preserved: bool,
    pub edge_count_preserved: bool,
    /// forward: v undominated by S afterwards; reverse: S dominates afterwards
    pub locally_sound: bool,
    pub h_unchanged: Option<bool>,
    pub flipped: Option<bool>,
    pub pre_class: Option<ClassTag>,
    pub post_class: Option<ClassTag>,
    pub before_hash: String,
    pub after_hash: String,
}

impl MappingCertificate {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }
}

/// Local effect of a swap on the target set, recomputed from the graph.
pub fn local_soundness(after: &Graph, dir: Direction, quad: &Quad, target: VertexSet) -> bool {
    let missed = undominated(after, target);
    match dir {
        Direction::Forward => missed.contains(quad.v),
        Direction::Reverse => missed.is_empty(),
    }
}

pub fn apply_mapping(
    g: &Graph,
    quad: Quad,
    direction: Direction,
    target: VertexSet,
    h: VertexSet,
) -> Result<(Graph, MappingCertificate)> {
    check_pattern(g, &quad, direction)?;
    if !quad.vertices().is_disjoint(&h) {
        return Err(Error::Precondition(format!(
            "quadruple {quad:?} touches H {h}"
        )));
    }
    let (removed, added) = edits(&quad, direction);
    let after = toggle_edges(g, &removed, &added)?;
    let cert = MappingCertificate {
        direction,
        quad,
        removed,
        added,
        h_vertices: h,
        target,
        degree_preserved: g.degrees() == after.degrees(),
        edge_count_preserved: g.edge_count() == after.edge_count(),
        locally_sound: local_soundness(&after, direction, &quad, target),
        h_unchanged: None,
        flipped: None,
        pre_class: None,
        post_class: None,
        before_hash: g.fingerprint(),
        after_hash: after.fingerprint(),
    };
    Ok((after, cert))
}

fn induced_equal(a: &Graph, b: &Graph, h: VertexSet) -> Result<bool> {
    if h.is_empty() {
        return Ok(true);
    }
    Ok(induced_subgraph(a, h)? == induced_subgraph(b, h)?)
}

/// Re-runs the exact solver on both graphs and fills in the verification
/// fields. Each flag is computed independently of the others.
pub fn verify_certificate(
    before: &Graph,
    after: &Graph,
    cert: &MappingCertificate,
    k: usize,
) -> Result<MappingCertificate> {
    let mut out = cert.clone();
    out.degree_preserved = before.degrees() == after.degrees();
    out.edge_count_preserved = before.edge_count() == after.edge_count();
    out.locally_sound = local_soundness(after, cert.direction, &cert.quad, cert.target);
    out.h_unchanged = Some(induced_equal(before, after, cert.h_vertices)?);
    let d_before = count_k_sets(before, k)?.dominating;
    let d_after = count_k_sets(after, k)?.dominating;
    out.flipped = Some(match cert.direction {
        Direction::Forward => d_before == 1 && d_after == 0,
        Direction::Reverse => {
            d_before == 0 && d_after >= 1 && is_dominating(after, cert.target)
        }
    });
    out.pre_class = Some(classify_instance(before, k)?.tag());
    out.post_class = Some(classify_instance(after, k)?.tag());
    out.before_hash = before.fingerprint();
    out.after_hash = after.fingerprint();
    Ok(out)
}
