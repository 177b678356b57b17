//! Finite radius-R balls of Cayley graphs.
//!
//! Vertices are group elements of word length <= R, indexed in BFS order from
//! the identity with generator directions explored in multiset order
//! (s_0, ..., s_{k-1}, s_0^-1, ..., s_{k-1}^-1), so indexing is deterministic.
//! Edges (gamma, gamma s) are kept when both endpoints lie in the ball;
//! boundary-boundary edges stay, edges leaving the ball are dropped.
//!
//! An involutive generator (s = s^-1) contributes a single undirected edge
//! between gamma and gamma s, but that edge occupies two positions in each
//! endpoint's edge-end list, so interior vertices always carry exactly
//! 2|S| edge-ends and stack indexing by ceil(d t) stays well defined.

use std::collections::HashMap;

use crate::error::Error;
use crate::group::{Element, GroupSpec};
use crate::Result;

pub type VertexId = u32;
pub type EdgeId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BallEdge {
    pub tail: VertexId,
    pub head: VertexId,
    pub slot: u32,
}

#[derive(Debug, Clone)]
pub struct CayleyBall {
    spec: GroupSpec,
    radius: u32,
    vertices: Vec<Element>,
    word_len: Vec<u32>,
    index: HashMap<Element, VertexId>,
    edges: Vec<BallEdge>,
    /// Per vertex: incident edge-ends in S ⊔ S⁻¹ order, absent ends skipped.
    /// Involutive edges appear twice (once per end).
    ends: Vec<Vec<EdgeId>>,
    /// Per slot: the edge (identity, s), if the ball has radius >= 1.
    origin_edges: Vec<Option<EdgeId>>,
    boundary_count: usize,
}

impl CayleyBall {
    /// BFS-enumerate the ball of the given radius. Fails if the vertex count
    /// would exceed `vertex_cap`.
    pub fn build(spec: &GroupSpec, radius: u32, vertex_cap: usize) -> Result<CayleyBall> {
        let slot_count = spec.slot_count();
        let mut vertices: Vec<Element> = vec![Element::identity()];
        let mut word_len: Vec<u32> = vec![0];
        let mut index: HashMap<Element, VertexId> = HashMap::new();
        index.insert(Element::identity(), 0);
        if vertex_cap == 0 {
            return Err(Error::VertexCapExceeded { radius, cap: vertex_cap, reached: 1 });
        }

        let mut cursor = 0usize;
        while cursor < vertices.len() {
            let depth = word_len[cursor];
            if depth == radius {
                break; // BFS order: all later vertices are at full radius too
            }
            let current = vertices[cursor].clone();
            for direction in 0..2 * slot_count {
                let slot = direction % slot_count;
                let sign = if direction < slot_count { 1 } else { -1 };
                let next = spec.step(&current, spec.slot_primitive(slot), sign);
                if !index.contains_key(&next) {
                    if vertices.len() >= vertex_cap {
                        return Err(Error::VertexCapExceeded {
                            radius,
                            cap: vertex_cap,
                            reached: vertices.len() + 1,
                        });
                    }
                    index.insert(next.clone(), vertices.len() as VertexId);
                    vertices.push(next);
                    word_len.push(depth + 1);
                }
            }
            cursor += 1;
        }

        // Edge pass: vertices in index order, slots in multiset order.
        let mut edges: Vec<BallEdge> = Vec::new();
        let mut ends: Vec<Vec<EdgeId>> = vec![Vec::new(); vertices.len()];
        // Positioned ends: per vertex 2|S| optional entries, then compacted.
        let mut positioned: Vec<Vec<Option<EdgeId>>> =
            vec![vec![None; 2 * slot_count]; vertices.len()];
        for tail in 0..vertices.len() {
            for slot in 0..slot_count {
                let head_elem =
                    spec.step(&vertices[tail], spec.slot_primitive(slot), 1);
                let Some(&head) = index.get(&head_elem) else { continue };
                let head = head as usize;
                if spec.slot_is_involutive(slot) {
                    // One undirected edge per unordered pair; canonical tail
                    // is the smaller index.
                    if tail > head {
                        continue;
                    }
                    let id = edges.len() as EdgeId;
                    edges.push(BallEdge { tail: tail as VertexId, head: head as VertexId, slot: slot as u32 });
                    positioned[tail][slot] = Some(id);
                    positioned[tail][slot_count + slot] = Some(id);
                    positioned[head][slot] = Some(id);
                    positioned[head][slot_count + slot] = Some(id);
                } else {
                    let id = edges.len() as EdgeId;
                    edges.push(BallEdge { tail: tail as VertexId, head: head as VertexId, slot: slot as u32 });
                    positioned[tail][slot] = Some(id);
                    positioned[head][slot_count + slot] = Some(id);
                }
            }
        }
        for (v, row) in positioned.into_iter().enumerate() {
            ends[v] = row.into_iter().flatten().collect();
        }

        let origin_edges = (0..slot_count)
            .map(|slot| {
                edges
                    .iter()
                    .position(|e| e.slot == slot as u32 && (e.tail == 0 || (spec.slot_is_involutive(slot) && e.head == 0)))
                    .map(|i| i as EdgeId)
            })
            .collect();

        let boundary_count = word_len.iter().filter(|&&d| d == radius).count();

        Ok(CayleyBall {
            spec: spec.clone(),
            radius,
            vertices,
            word_len,
            index,
            edges,
            ends,
            origin_edges,
            boundary_count,
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edge-ends per interior vertex (2|S|).
    pub fn degree(&self) -> usize {
        self.spec.degree()
    }

    pub fn element(&self, v: VertexId) -> &Element {
        &self.vertices[v as usize]
    }

    pub fn word_len(&self, v: VertexId) -> u32 {
        self.word_len[v as usize]
    }

    pub fn is_boundary(&self, v: VertexId) -> bool {
        self.word_len[v as usize] == self.radius
    }

    pub fn boundary_count(&self) -> usize {
        self.boundary_count
    }

    /// Lowest-index vertex at full radius; `None` when the group saturated
    /// below the requested radius (finite groups).
    pub fn first_boundary_vertex(&self) -> Option<VertexId> {
        self.word_len
            .iter()
            .position(|&d| d == self.radius)
            .map(|i| i as VertexId)
    }

    pub fn vertex_of(&self, g: &Element) -> Option<VertexId> {
        self.index.get(g).copied()
    }

    pub fn edge(&self, e: EdgeId) -> BallEdge {
        self.edges[e as usize]
    }

    pub fn edges(&self) -> &[BallEdge] {
        &self.edges
    }

    /// Incident edge-ends of `v` in S ⊔ S⁻¹ order (absent ends skipped,
    /// involutive edges listed twice).
    pub fn ends_of(&self, v: VertexId) -> &[EdgeId] {
        &self.ends[v as usize]
    }

    /// Number of edge-ends at `v`; equals `degree()` for interior vertices.
    pub fn end_count(&self, v: VertexId) -> usize {
        self.ends[v as usize].len()
    }

    pub fn other_endpoint(&self, e: EdgeId, v: VertexId) -> VertexId {
        let edge = self.edges[e as usize];
        if edge.tail == v {
            edge.head
        } else {
            edge.tail
        }
    }

    /// The edge (identity, s) for a slot, present when radius >= 1.
    pub fn origin_edge(&self, slot: usize) -> Option<EdgeId> {
        self.origin_edges[slot]
    }

    /// Left translation g.v; `None` when the product leaves the ball.
    pub fn left_translate(&self, g: &Element, v: VertexId) -> Option<VertexId> {
        let moved = self.spec.mul(g, &self.vertices[v as usize]);
        self.vertex_of(&moved)
    }

    /// Edge orbit data: (edge id, slot label, tail element). Restricted to
    /// non-involutive slots, every (s, gamma) with |gamma| < R and
    /// |gamma s| <= R appears exactly once; involutive slots list each
    /// undirected edge once under its canonical (minimum-index) tail.
    pub fn edge_orbit_decomposition(&self) -> Vec<(EdgeId, String, Element)> {
        self.edges
            .iter()
            .enumerate()
            .map(|(i, e)| {
                (
                    i as EdgeId,
                    self.spec.slot_label(e.slot as usize).to_string(),
                    self.vertices[e.tail as usize].clone(),
                )
            })
            .collect()
    }

    /// Graph distances from `start` over all ball edges (BFS).
    pub fn distances_from(&self, start: VertexId) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.vertices.len()];
        dist[start as usize] = 0;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &e in self.ends_of(v) {
                let w = self.other_endpoint(e, v);
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[v as usize] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}
