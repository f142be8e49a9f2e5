//! Stable and modular graphs: validation, canonical forms, automorphisms with
//! edge parity, contraction, expansion, substitution, and nests.
//!
//! A graph stores a genus per vertex, a list of edges given by their two
//! endpoints, and the vertex carrying each leg. Edge `k` owns half-edges `2k`
//! (at its first endpoint) and `2k + 1` (at its second). Leg `i` carries the
//! label `i + 1`.
//!
//! The flags at a vertex are ordered as: its legs by label, then its
//! half-edges by id. That order identifies the flags of a vertex of type
//! `(g, m)` with the legs `1..m` of whatever sits at the vertex.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::symmetric::{self, Perm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph has no vertices")]
    Empty,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("vertex {0} is unstable")]
    Unstable(usize),
    #[error("reference to vertex {0}, which does not exist")]
    BadVertex(usize),
    #[error("leg labels must be exactly 1..n")]
    BadLegLabels,
    #[error("edge {0} does not exist")]
    BadEdge(usize),
    #[error("nest is empty or disconnected")]
    BadNest,
    #[error("substitution arity mismatch at vertex {vertex}: expected {expected} legs, found {found}")]
    Arity { vertex: usize, expected: usize, found: usize },
    #[error("invalid graph json: {0}")]
    Json(String),
}

/// A flag: either a leg (0-based label index) or a half-edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flag {
    Leg(usize),
    Half(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModularGraph {
    genus: Vec<u32>,
    edges: Vec<(usize, usize)>,
    legs: Vec<usize>,
}

impl ModularGraph {
    /// Builds and validates a graph.
    pub fn new(genus: Vec<u32>, edges: Vec<(usize, usize)>, legs: Vec<usize>) -> Result<Self, GraphError> {
        let g = ModularGraph { genus, edges, legs };
        g.validate()?;
        Ok(g)
    }

    /// Builds a graph without checking connectivity or stability.
    pub fn from_parts(genus: Vec<u32>, edges: Vec<(usize, usize)>, legs: Vec<usize>) -> Self {
        ModularGraph { genus, edges, legs }
    }

    /// The one-vertex graph of type `(g, n)`.
    pub fn corolla(g: u32, n: usize) -> Self {
        ModularGraph { genus: vec![g], edges: vec![], legs: vec![0; n] }
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        let nv = self.genus.len();
        if nv == 0 {
            return Err(GraphError::Empty);
        }
        for &(a, b) in &self.edges {
            for v in [a, b] {
                if v >= nv {
                    return Err(GraphError::BadVertex(v));
                }
            }
        }
        if let Some(&v) = self.legs.iter().find(|&&v| v >= nv) {
            return Err(GraphError::BadVertex(v));
        }
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        if let Some(v) = (0..nv).find(|&v| 2 * self.genus[v] as usize + self.valence(v) < 3) {
            return Err(GraphError::Unstable(v));
        }
        Ok(())
    }

    pub fn is_connected(&self) -> bool {
        let nv = self.genus.len();
        let mut uf = UnionFind::new(nv);
        for &(a, b) in &self.edges {
            uf.union(a, b);
        }
        (1..nv).all(|v| uf.find(v) == uf.find(0))
    }

    pub fn num_vertices(&self) -> usize {
        self.genus.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_legs(&self) -> usize {
        self.legs.len()
    }

    pub fn genus_of(&self, v: usize) -> u32 {
        self.genus[v]
    }

    pub fn genera(&self) -> &[u32] {
        &self.genus
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn legs(&self) -> &[usize] {
        &self.legs
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.edges[e].0 == self.edges[e].1
    }

    /// Vertex carrying a half-edge.
    pub fn half_edge_vertex(&self, h: usize) -> usize {
        let (a, b) = self.edges[h / 2];
        if h.is_multiple_of(2) {
            a
        } else {
            b
        }
    }

    pub fn flag_vertex(&self, f: Flag) -> usize {
        match f {
            Flag::Leg(i) => self.legs[i],
            Flag::Half(h) => self.half_edge_vertex(h),
        }
    }

    /// Flags at `v` in the standard order.
    pub fn flags(&self, v: usize) -> Vec<Flag> {
        let mut out: Vec<Flag> = (0..self.legs.len()).filter(|&i| self.legs[i] == v).map(Flag::Leg).collect();
        for (k, &(a, b)) in self.edges.iter().enumerate() {
            if a == v {
                out.push(Flag::Half(2 * k));
            }
            if b == v {
                out.push(Flag::Half(2 * k + 1));
            }
        }
        out
    }

    pub fn valence(&self, v: usize) -> usize {
        self.legs.iter().filter(|&&x| x == v).count()
            + self.edges.iter().map(|&(a, b)| (a == v) as usize + (b == v) as usize).sum::<usize>()
    }

    /// First Betti number of the underlying graph.
    pub fn betti(&self) -> usize {
        self.edges.len() + 1 - self.genus.len()
    }

    /// Total genus: Betti number plus the vertex genera.
    pub fn total_genus(&self) -> u32 {
        self.betti() as u32 + self.genus.iter().sum::<u32>()
    }

    /// `(total genus, number of legs)`.
    pub fn graph_type(&self) -> (u32, usize) {
        (self.total_genus(), self.legs.len())
    }

    /// Type `(g(v), |v|)` of a vertex.
    pub fn vertex_type(&self, v: usize) -> (u32, usize) {
        (self.genus[v], self.valence(v))
    }

    /// Real dimension of the stratum `Π_v M̄_{g(v),|v|}`.
    pub fn stratum_degree(&self) -> usize {
        (0..self.num_vertices()).map(|v| 6 * self.genus[v] as usize + 2 * self.valence(v) - 6).sum()
    }

    pub fn has_loop(&self) -> bool {
        (0..self.edges.len()).any(|e| self.is_loop(e))
    }

    pub fn has_parallel_edges(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.edges
            .iter()
            .filter(|(a, b)| a != b)
            .any(|&(a, b)| !seen.insert((a.min(b), a.max(b))))
    }

    /// Applies a permutation to the leg labels: leg `i` receives label `σ(i)`.
    pub fn relabel_legs(&self, sigma: &[usize]) -> (ModularGraph, Isomorphism) {
        let mut legs = vec![0; self.legs.len()];
        for (i, &v) in self.legs.iter().enumerate() {
            legs[sigma[i]] = v;
        }
        let g = ModularGraph { genus: self.genus.clone(), edges: self.edges.clone(), legs };
        let iso = Isomorphism {
            vertex: symmetric::identity(self.num_vertices()),
            half_edge: symmetric::identity(2 * self.num_edges()),
            leg: sigma.to_vec(),
        };
        (g, iso)
    }

    // -----------------------------------------------------------------------
    // Contraction and expansion
    // -----------------------------------------------------------------------

    /// Contracts a single edge.
    pub fn contract_edge(&self, e: usize) -> Result<Contraction, GraphError> {
        if e >= self.edges.len() {
            return Err(GraphError::BadEdge(e));
        }
        Ok(self.contract_edges(&[e]))
    }

    /// Contracts a set of edges at once. Surviving edges keep their relative
    /// order; new vertices are ordered by their smallest old vertex.
    pub fn contract_edges(&self, set: &[usize]) -> Contraction {
        let nv = self.num_vertices();
        let mut uf = UnionFind::new(nv);
        let in_set: BTreeSet<usize> = set.iter().copied().collect();
        for &e in &in_set {
            let (a, b) = self.edges[e];
            uf.union(a, b);
        }
        let mut root_to_new = BTreeMap::new();
        let mut vertex = vec![0; nv];
        for (v, slot) in vertex.iter_mut().enumerate() {
            let r = uf.find(v);
            let next = root_to_new.len();
            *slot = *root_to_new.entry(r).or_insert(next);
        }
        let nn = root_to_new.len();
        let mut genus = vec![0u32; nn];
        let mut vcount = vec![0i64; nn];
        let mut ecount = vec![0i64; nn];
        for v in 0..nv {
            genus[vertex[v]] += self.genus[v];
            vcount[vertex[v]] += 1;
        }
        for &e in &in_set {
            ecount[vertex[self.edges[e].0]] += 1;
        }
        for w in 0..nn {
            genus[w] += (ecount[w] - vcount[w] + 1) as u32;
        }
        let mut edges = Vec::new();
        let mut edge_map = vec![None; self.edges.len()];
        for (k, &(a, b)) in self.edges.iter().enumerate() {
            if !in_set.contains(&k) {
                edge_map[k] = Some(edges.len());
                edges.push((vertex[a], vertex[b]));
            }
        }
        let legs = self.legs.iter().map(|&v| vertex[v]).collect();
        Contraction { graph: ModularGraph { genus, edges, legs }, vertex_map: vertex, edge_map }
    }

    /// All one-edge expansions up to isomorphism of the pair `(γ′, e)`, the
    /// new edge being the last one. With `labeled`, leg labels are respected.
    pub fn expansions(&self, labeled: bool) -> Vec<(ModularGraph, usize)> {
        let mut seen: BTreeMap<(ModularGraph, Vec<usize>), (ModularGraph, usize)> = BTreeMap::new();
        for cand in self.raw_expansions() {
            let e = cand.num_edges() - 1;
            let key = marked_edge_key(&cand, &[e], labeled);
            seen.entry(key).or_insert((cand, e));
        }
        seen.into_values().collect()
    }

    /// Every splitting and loop insertion, without deduplication.
    pub fn raw_expansions(&self) -> Vec<ModularGraph> {
        let mut out = Vec::new();
        for v in 0..self.num_vertices() {
            let g = self.genus[v];
            if g >= 1 {
                let mut genus = self.genus.clone();
                genus[v] -= 1;
                let mut edges = self.edges.clone();
                edges.push((v, v));
                out.push(ModularGraph { genus, edges, legs: self.legs.clone() });
            }
            let flags = self.flags(v);
            let m = flags.len();
            let w = self.num_vertices();
            // Subsets moving to the new vertex w; flag 0 stays at v to halve
            // the symmetric duplicates, except all subsets are needed when
            // genera differ, so enumerate all and let dedup sort it out.
            for mask in 0u32..(1 << m) {
                let moved = mask.count_ones() as usize;
                for g1 in 0..=g {
                    let g2 = g - g1;
                    if 2 * g1 as usize + (m - moved) + 1 < 3 || 2 * g2 as usize + moved + 1 < 3 {
                        continue;
                    }
                    let mut genus = self.genus.clone();
                    genus[v] = g1;
                    genus.push(g2);
                    let mut edges = self.edges.clone();
                    let mut legs = self.legs.clone();
                    for (j, f) in flags.iter().enumerate() {
                        if mask & (1 << j) == 0 {
                            continue;
                        }
                        match *f {
                            Flag::Leg(i) => legs[i] = w,
                            Flag::Half(h) => {
                                let k = h / 2;
                                if h.is_multiple_of(2) {
                                    edges[k].0 = w;
                                } else {
                                    edges[k].1 = w;
                                }
                            }
                        }
                    }
                    edges.push((v, w));
                    out.push(ModularGraph { genus, edges, legs });
                }
            }
        }
        out
    }

    // -----------------------------------------------------------------------
    // Substitution and nests
    // -----------------------------------------------------------------------

    /// Inserts `inner[v]` into each vertex `v`. Leg `j` of `inner[v]` is glued
    /// to flag `j` of `v`. The result lists the edges of `self` first, then
    /// the edges of each inner graph in vertex order.
    pub fn substitute(&self, inner: &[ModularGraph]) -> Result<Substitution, GraphError> {
        let mut offset = Vec::with_capacity(inner.len());
        let mut genus = Vec::new();
        for (v, g) in inner.iter().enumerate() {
            let m = self.valence(v);
            if g.num_legs() != m {
                return Err(GraphError::Arity { vertex: v, expected: m, found: g.num_legs() });
            }
            offset.push(genus.len());
            genus.extend_from_slice(&g.genus);
        }
        if inner.len() != self.num_vertices() {
            return Err(GraphError::Arity { vertex: inner.len(), expected: self.num_vertices(), found: inner.len() });
        }
        // Where each flag of self lands.
        let mut flag_home: HashMap<Flag, usize> = HashMap::new();
        for v in 0..self.num_vertices() {
            for (j, f) in self.flags(v).into_iter().enumerate() {
                flag_home.insert(f, offset[v] + inner[v].legs[j]);
            }
        }
        let mut edges: Vec<(usize, usize)> = (0..self.num_edges())
            .map(|k| (flag_home[&Flag::Half(2 * k)], flag_home[&Flag::Half(2 * k + 1)]))
            .collect();
        let mut edge_origin: Vec<(Option<usize>, usize)> = (0..self.num_edges()).map(|k| (None, k)).collect();
        for (v, g) in inner.iter().enumerate() {
            for (k, &(a, b)) in g.edges.iter().enumerate() {
                edges.push((offset[v] + a, offset[v] + b));
                edge_origin.push((Some(v), k));
            }
        }
        let legs = (0..self.num_legs()).map(|i| flag_home[&Flag::Leg(i)]).collect();
        Ok(Substitution { graph: ModularGraph { genus, edges, legs }, edge_origin, vertex_offset: offset })
    }

    /// All nests: nonempty connected edge sets, as sorted edge lists.
    pub fn nests(&self) -> Vec<Nest> {
        let ne = self.num_edges();
        let mut out = Vec::new();
        for mask in 1u64..(1 << ne) {
            let edges: Vec<usize> = (0..ne).filter(|&k| mask & (1 << k) != 0).collect();
            let nest = Nest { edges };
            if nest.is_connected_in(self) {
                out.push(nest);
            }
        }
        out
    }

    pub fn nest_vertices(&self, nest: &Nest) -> Vec<usize> {
        let set: BTreeSet<usize> = nest.edges.iter().flat_map(|&k| [self.edges[k].0, self.edges[k].1]).collect();
        set.into_iter().collect()
    }

    /// `γ/N`: collapse the nest to a single vertex.
    pub fn quotient_by_nest(&self, nest: &Nest) -> Result<Contraction, GraphError> {
        if nest.edges.is_empty() || nest.edges.iter().any(|&k| k >= self.num_edges()) || !nest.is_connected_in(self) {
            return Err(GraphError::BadNest);
        }
        Ok(self.contract_edges(&nest.edges))
    }

    /// The stable graph `N̂` together with, for each of its legs, the flag of
    /// `γ` it came from. Legs of `N̂` follow the flag order of the collapsed
    /// vertex of `γ/N`.
    pub fn nest_closure(&self, nest: &Nest) -> Result<(ModularGraph, Vec<Flag>), GraphError> {
        if nest.edges.is_empty() || !nest.is_connected_in(self) {
            return Err(GraphError::BadNest);
        }
        let verts = self.nest_vertices(nest);
        let local: HashMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let genus = verts.iter().map(|&v| self.genus[v]).collect();
        let edges = nest.edges.iter().map(|&k| (local[&self.edges[k].0], local[&self.edges[k].1])).collect();
        let in_nest: BTreeSet<usize> = nest.edges.iter().copied().collect();
        let mut origin = Vec::new();
        let mut legs = Vec::new();
        for (i, &v) in self.legs.iter().enumerate() {
            if let Some(&lv) = local.get(&v) {
                origin.push(Flag::Leg(i));
                legs.push(lv);
            }
        }
        for h in 0..2 * self.num_edges() {
            if in_nest.contains(&(h / 2)) {
                continue;
            }
            if let Some(&lv) = local.get(&self.half_edge_vertex(h)) {
                origin.push(Flag::Half(h));
                legs.push(lv);
            }
        }
        Ok((ModularGraph { genus, edges, legs }, origin))
    }

    /// Collections of pairwise vertex-disjoint nests. Vertices not covered
    /// count as trivial one-vertex nests; the empty collection is included.
    pub fn depth1_nestings(&self) -> Vec<Vec<Nest>> {
        let nests = self.nests();
        let vsets: Vec<BTreeSet<usize>> = nests.iter().map(|n| self.nest_vertices(n).into_iter().collect()).collect();
        let mut out = Vec::new();
        fn rec(
            start: usize,
            used: &BTreeSet<usize>,
            cur: &mut Vec<usize>,
            vsets: &[BTreeSet<usize>],
            nests: &[Nest],
            out: &mut Vec<Vec<Nest>>,
        ) {
            out.push(cur.iter().map(|&i| nests[i].clone()).collect());
            for i in start..nests.len() {
                if vsets[i].is_disjoint(used) {
                    let mut u = used.clone();
                    u.extend(vsets[i].iter().copied());
                    cur.push(i);
                    rec(i + 1, &u, cur, vsets, nests, out);
                    cur.pop();
                }
            }
        }
        rec(0, &BTreeSet::new(), &mut Vec::new(), &vsets, &nests, &mut out);
        out
    }

    // -----------------------------------------------------------------------
    // JSON
    // -----------------------------------------------------------------------

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            vertices: self.genus.iter().map(|&g| VertexJson { genus: g }).collect(),
            edges: self.edges.iter().filter(|(a, b)| a != b).map(|&(a, b)| [a, b]).collect(),
            loops: self.edges.iter().filter(|(a, b)| a == b).map(|&(a, _)| a).collect(),
            legs: self.legs.iter().enumerate().map(|(i, &v)| LegJson { vertex: v, label: i + 1 }).collect(),
        }
    }

    /// Non-loop edges come first, then loops, in the listed orders.
    pub fn from_json(j: &GraphJson) -> Result<Self, GraphError> {
        let genus = j.vertices.iter().map(|v| v.genus).collect();
        let mut edges: Vec<(usize, usize)> = j.edges.iter().map(|e| (e[0], e[1])).collect();
        if edges.iter().any(|(a, b)| a == b) {
            return Err(GraphError::Json("loop listed among edges".into()));
        }
        edges.extend(j.loops.iter().map(|&v| (v, v)));
        let n = j.legs.len();
        let mut legs = vec![usize::MAX; n];
        for l in &j.legs {
            if l.label == 0 || l.label > n || legs[l.label - 1] != usize::MAX {
                return Err(GraphError::BadLegLabels);
            }
            legs[l.label - 1] = l.vertex;
        }
        ModularGraph::new(genus, edges, legs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub genus: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegJson {
    pub vertex: usize,
    pub label: usize,
}

/// Wire format of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<[usize; 2]>,
    pub loops: Vec<usize>,
    pub legs: Vec<LegJson>,
}

/// Result of contracting edges: the new graph and where old pieces went.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub graph: ModularGraph,
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<Option<usize>>,
}

impl Contraction {
    /// Image of a surviving flag.
    pub fn map_flag(&self, f: Flag) -> Option<Flag> {
        match f {
            Flag::Leg(i) => Some(Flag::Leg(i)),
            Flag::Half(h) => self.edge_map[h / 2].map(|k| Flag::Half(2 * k + h % 2)),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Substitution {
    pub graph: ModularGraph,
    /// For each edge of the result: `(None, k)` for outer edge `k`, or
    /// `(Some(v), k)` for edge `k` of the graph inserted at `v`.
    pub edge_origin: Vec<(Option<usize>, usize)>,
    pub vertex_offset: Vec<usize>,
}

/// A nest, given by its nonempty, connected, sorted edge set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Nest {
    pub edges: Vec<usize>,
}

impl Nest {
    pub fn new(mut edges: Vec<usize>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        Nest { edges }
    }

    pub fn is_connected_in(&self, g: &ModularGraph) -> bool {
        let Some(&first) = self.edges.first() else {
            return false;
        };
        let mut uf = UnionFind::new(g.num_vertices());
        for &k in &self.edges {
            let (a, b) = g.edges[k];
            uf.union(a, b);
        }
        let root = uf.find(g.edges[first].0);
        self.edges.iter().all(|&k| uf.find(g.edges[k].0) == root)
    }
}

// ---------------------------------------------------------------------------
// Isomorphisms and canonical forms
// ---------------------------------------------------------------------------

/// A graph isomorphism, as maps from source indices to target indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Isomorphism {
    pub vertex: Vec<usize>,
    pub half_edge: Vec<usize>,
    pub leg: Vec<usize>,
}

impl Isomorphism {
    pub fn identity(g: &ModularGraph) -> Self {
        Isomorphism {
            vertex: symmetric::identity(g.num_vertices()),
            half_edge: symmetric::identity(2 * g.num_edges()),
            leg: symmetric::identity(g.num_legs()),
        }
    }

    /// `other ∘ self`: first `self`, then `other`.
    pub fn then(&self, other: &Isomorphism) -> Isomorphism {
        Isomorphism {
            vertex: symmetric::compose(&other.vertex, &self.vertex),
            half_edge: symmetric::compose(&other.half_edge, &self.half_edge),
            leg: symmetric::compose(&other.leg, &self.leg),
        }
    }

    pub fn inverse(&self) -> Isomorphism {
        Isomorphism {
            vertex: symmetric::inverse(&self.vertex),
            half_edge: symmetric::inverse(&self.half_edge),
            leg: symmetric::inverse(&self.leg),
        }
    }

    /// Induced permutation of edges.
    pub fn edge_perm(&self) -> Perm {
        (0..self.half_edge.len() / 2).map(|k| self.half_edge[2 * k] / 2).collect()
    }

    /// Sign of the induced edge permutation.
    pub fn edge_parity(&self) -> i32 {
        symmetric::sign(&self.edge_perm())
    }

    pub fn map_flag(&self, f: Flag) -> Flag {
        match f {
            Flag::Leg(i) => Flag::Leg(self.leg[i]),
            Flag::Half(h) => Flag::Half(self.half_edge[h]),
        }
    }

    /// For vertex `v` of `src`, the position in `dst.flags(φ(v))` of each
    /// flag of `v`, in order. This is the permutation to apply to the legs
    /// of a class sitting at `v` when transporting it to `φ(v)`.
    pub fn flag_perm(&self, src: &ModularGraph, dst: &ModularGraph, v: usize) -> Perm {
        let target = dst.flags(self.vertex[v]);
        let pos: HashMap<Flag, usize> = target.iter().enumerate().map(|(i, &f)| (f, i)).collect();
        src.flags(v).into_iter().map(|f| pos[&self.map_flag(f)]).collect()
    }

    /// Whether this is a genuine isomorphism `src → dst`.
    pub fn is_isomorphism(&self, src: &ModularGraph, dst: &ModularGraph) -> bool {
        if src.num_vertices() != dst.num_vertices() || src.num_edges() != dst.num_edges() || src.num_legs() != dst.num_legs() {
            return false;
        }
        let bij = |p: &[usize], n: usize| p.len() == n && symmetric::inverse(p).len() == n && {
            let mut s: Vec<usize> = p.to_vec();
            s.sort_unstable();
            s == symmetric::identity(n)
        };
        if !bij(&self.vertex, src.num_vertices()) || !bij(&self.half_edge, 2 * src.num_edges()) || !bij(&self.leg, src.num_legs()) {
            return false;
        }
        (0..src.num_vertices()).all(|v| src.genus[v] == dst.genus[self.vertex[v]])
            && (0..2 * src.num_edges()).all(|h| {
                self.half_edge[h ^ 1] == self.half_edge[h] ^ 1
                    && dst.half_edge_vertex(self.half_edge[h]) == self.vertex[src.half_edge_vertex(h)]
            })
            && (0..src.num_legs()).all(|i| dst.legs[self.leg[i]] == self.vertex[src.legs[i]])
    }
}

/// A canonical representative and an isomorphism from the input onto it.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub graph: ModularGraph,
    pub iso: Isomorphism,
}

type VertexInvariant = (u32, usize, usize, Vec<usize>);

fn vertex_invariant(g: &ModularGraph, v: usize, labeled: bool) -> VertexInvariant {
    let loops = g.edges.iter().filter(|&&(a, b)| a == v && b == v).count();
    let legs: Vec<usize> = (0..g.num_legs()).filter(|&i| g.legs[i] == v).collect();
    let leg_key = if labeled { legs } else { vec![legs.len()] };
    (g.genus[v], g.valence(v), loops, leg_key)
}

/// Orderings of the vertices compatible with the sorted invariant classes.
/// Each ordering lists old vertex indices by new position.
fn candidate_orderings(g: &ModularGraph, labeled: bool) -> Vec<Vec<usize>> {
    let mut classes: BTreeMap<VertexInvariant, Vec<usize>> = BTreeMap::new();
    for v in 0..g.num_vertices() {
        classes.entry(vertex_invariant(g, v, labeled)).or_default().push(v);
    }
    let mut orderings: Vec<Vec<usize>> = vec![vec![]];
    for members in classes.values() {
        let perms = symmetric::all_perms(members.len());
        let mut next = Vec::with_capacity(orderings.len() * perms.len());
        for o in &orderings {
            for p in &perms {
                let mut o2 = o.clone();
                o2.extend(p.iter().map(|&i| members[i]));
                next.push(o2);
            }
        }
        orderings = next;
    }
    orderings
}

/// Vertex permutations (old → new) mapping each invariant class to itself.
fn invariant_preserving_perms(g: &ModularGraph, labeled: bool) -> Vec<Perm> {
    let mut classes: BTreeMap<VertexInvariant, Vec<usize>> = BTreeMap::new();
    for v in 0..g.num_vertices() {
        classes.entry(vertex_invariant(g, v, labeled)).or_default().push(v);
    }
    let mut out: Vec<Perm> = vec![symmetric::identity(g.num_vertices())];
    for members in classes.values() {
        let perms = symmetric::all_perms(members.len());
        let mut next = Vec::with_capacity(out.len() * perms.len());
        for base in &out {
            for p in &perms {
                let mut q = base.clone();
                for (i, &v) in members.iter().enumerate() {
                    q[v] = members[p[i]];
                }
                next.push(q);
            }
        }
        out = next;
    }
    out
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Certificate {
    legs: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

fn certificate(g: &ModularGraph, new_of_old: &[usize], labeled: bool) -> Certificate {
    let mut edges: Vec<(usize, usize)> = g
        .edges
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (new_of_old[a], new_of_old[b]);
            (x.min(y), x.max(y))
        })
        .collect();
    edges.sort_unstable();
    let mut legs: Vec<usize> = g.legs.iter().map(|&v| new_of_old[v]).collect();
    if !labeled {
        legs.sort_unstable();
    }
    Certificate { legs, edges }
}

/// Canonical form. With `labeled == false` leg labels are forgotten and the
/// canonical graph numbers its legs by vertex.
pub fn canonicalize(g: &ModularGraph, labeled: bool) -> CanonicalForm {
    let mut best: Option<(Certificate, Vec<usize>)> = None;
    for ord in candidate_orderings(g, labeled) {
        let new_of_old = symmetric::inverse(&ord);
        let cert = certificate(g, &new_of_old, labeled);
        if best.as_ref().is_none_or(|(b, _)| cert < *b) {
            best = Some((cert, new_of_old));
        }
    }
    let (cert, new_of_old) = best.expect("at least one ordering");
    let ord = symmetric::inverse(&new_of_old);
    let genus: Vec<u32> = ord.iter().map(|&v| g.genus[v]).collect();
    let canon = ModularGraph { genus, edges: cert.edges.clone(), legs: cert.legs.clone() };

    // Half-edge map: match each old edge to the next free canonical edge with
    // the same endpoints.
    let mut free: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (k, &e) in cert.edges.iter().enumerate().rev() {
        free.entry(e).or_default().push(k);
    }
    let mut half_edge = vec![0; 2 * g.num_edges()];
    for (k, &(a, b)) in g.edges.iter().enumerate() {
        let (x, y) = (new_of_old[a], new_of_old[b]);
        let key = (x.min(y), x.max(y));
        let k2 = free.get_mut(&key).and_then(Vec::pop).expect("edge multiset matches");
        if x <= y {
            half_edge[2 * k] = 2 * k2;
            half_edge[2 * k + 1] = 2 * k2 + 1;
        } else {
            half_edge[2 * k] = 2 * k2 + 1;
            half_edge[2 * k + 1] = 2 * k2;
        }
    }
    let leg = if labeled {
        symmetric::identity(g.num_legs())
    } else {
        // Canonical legs are sorted by vertex; hand them out in label order.
        let mut next_at: BTreeMap<usize, usize> = BTreeMap::new();
        for (i, &v) in canon.legs.iter().enumerate().rev() {
            next_at.insert(v, i);
        }
        g.legs
            .iter()
            .map(|&v| {
                let nv = new_of_old[v];
                let slot = next_at.get_mut(&nv).expect("vertex has legs");
                let i = *slot;
                *slot += 1;
                i
            })
            .collect()
    };
    CanonicalForm { graph: canon, iso: Isomorphism { vertex: new_of_old, half_edge, leg } }
}

/// All automorphisms. With `labeled`, legs are fixed; otherwise legs at a
/// vertex may be permuted.
pub fn automorphisms(g: &ModularGraph, labeled: bool) -> Vec<Isomorphism> {
    let id_cert = certificate(g, &symmetric::identity(g.num_vertices()), labeled);
    let mut out = Vec::new();
    // Edge classes by unordered endpoint pair.
    let mut by_pair: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (k, &(a, b)) in g.edges.iter().enumerate() {
        by_pair.entry((a.min(b), a.max(b))).or_default().push(k);
    }
    let legs_at: Vec<Vec<usize>> = (0..g.num_vertices()).map(|v| (0..g.num_legs()).filter(|&i| g.legs[i] == v).collect()).collect();
    for pi in invariant_preserving_perms(g, labeled) {
        if certificate(g, &pi, labeled) != id_cert {
            continue;
        }
        // Enumerate edge bijections class by class.
        let mut partial: Vec<Vec<usize>> = vec![vec![usize::MAX; 2 * g.num_edges()]];
        for (&(a, b), src) in &by_pair {
            let (x, y) = (pi[a], pi[b]);
            let dst = &by_pair[&(x.min(y), x.max(y))];
            let is_loop = a == b;
            let mut next = Vec::new();
            for p in symmetric::all_perms(src.len()) {
                let flips: u32 = if is_loop { 1 << src.len() } else { 1 };
                for flip in 0..flips {
                    for base in &partial {
                        let mut h = base.clone();
                        for (i, &k) in src.iter().enumerate() {
                            let k2 = dst[p[i]];
                            let (ka, _) = g.edges[k];
                            let straight = if is_loop {
                                flip & (1 << i) == 0
                            } else {
                                g.edges[k2].0 == pi[ka]
                            };
                            if straight {
                                h[2 * k] = 2 * k2;
                                h[2 * k + 1] = 2 * k2 + 1;
                            } else {
                                h[2 * k] = 2 * k2 + 1;
                                h[2 * k + 1] = 2 * k2;
                            }
                        }
                        next.push(h);
                    }
                }
            }
            partial = next;
        }
        // Leg bijections.
        let mut leg_maps: Vec<Vec<usize>> = vec![symmetric::identity(g.num_legs())];
        if !labeled {
            for v in 0..g.num_vertices() {
                let src = &legs_at[v];
                let dst = &legs_at[pi[v]];
                let mut next = Vec::new();
                for p in symmetric::all_perms(src.len()) {
                    for base in &leg_maps {
                        let mut l = base.clone();
                        for (i, &leg) in src.iter().enumerate() {
                            l[leg] = dst[p[i]];
                        }
                        next.push(l);
                    }
                }
                leg_maps = next;
            }
        }
        for h in &partial {
            for l in &leg_maps {
                out.push(Isomorphism { vertex: pi.clone(), half_edge: h.clone(), leg: l.clone() });
            }
        }
    }
    out
}

/// All isomorphisms from `g` onto its canonical form.
pub fn isomorphisms_to_canonical(g: &ModularGraph, labeled: bool) -> (ModularGraph, Vec<Isomorphism>) {
    let cf = canonicalize(g, labeled);
    let isos = automorphisms(g, labeled).iter().map(|a| a.then(&cf.iso)).collect();
    (cf.graph, isos)
}

/// Canonical key for a graph with a marked tuple of edges: the canonical
/// graph and the least image of the tuple over all isomorphisms to it.
pub fn marked_edge_key(g: &ModularGraph, marked: &[usize], labeled: bool) -> (ModularGraph, Vec<usize>) {
    let (canon, isos) = isomorphisms_to_canonical(g, labeled);
    let best = isos
        .iter()
        .map(|iso| {
            let ep = iso.edge_perm();
            marked.iter().map(|&e| ep[e]).collect::<Vec<_>>()
        })
        .min()
        .unwrap_or_default();
    (canon, best)
}

/// Skeletal list of stable graphs of type `(g, n)` with `r` edges, sorted by
/// canonical form. Built by iterated expansion from the corolla.
pub fn enumerate_stable(g: u32, n: usize, r: usize, labeled: bool) -> Vec<ModularGraph> {
    if 2 * g as usize + n < 3 {
        return Vec::new();
    }
    let mut level: BTreeSet<ModularGraph> = BTreeSet::new();
    level.insert(canonicalize(&ModularGraph::corolla(g, n), labeled).graph);
    for _ in 0..r {
        let current: Vec<ModularGraph> = level.into_iter().collect();
        let expanded: Vec<Vec<ModularGraph>> = crate::par::map(&current, |x| {
            x.raw_expansions().iter().map(|y| canonicalize(y, labeled).graph).collect()
        });
        level = expanded.into_iter().flatten().collect();
    }
    level.into_iter().collect()
}

// ---------------------------------------------------------------------------

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let nxt = self.parent[y];
            self.parent[y] = r;
            y = nxt;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(genus: &[u32], edges: &[(usize, usize)], legs: &[usize]) -> ModularGraph {
        ModularGraph::new(genus.to_vec(), edges.to_vec(), legs.to_vec()).unwrap()
    }

    #[test]
    fn validation() {
        assert!(ModularGraph::new(vec![0], vec![], vec![0, 0, 0]).is_ok());
        assert_eq!(ModularGraph::new(vec![0], vec![], vec![0, 0]), Err(GraphError::Unstable(0)));
        let tad = g(&[0], &[(0, 0)], &[0]);
        assert_eq!(tad.graph_type(), (1, 1));
        assert_eq!(
            ModularGraph::new(vec![0, 0], vec![], vec![0, 0, 0, 1, 1, 1]),
            Err(GraphError::Disconnected)
        );
    }

    #[test]
    fn contraction_of_tree_and_loop() {
        let tree = g(&[0, 0], &[(0, 1)], &[0, 0, 1, 1]);
        let c = tree.contract_edge(0).unwrap().graph;
        assert_eq!(canonicalize(&c, true).graph, ModularGraph::corolla(0, 4));

        // Loop on a (0,4) vertex, bridge to a (0,3) vertex with two legs.
        let h = g(&[0, 0], &[(0, 0), (0, 1)], &[1, 1]);
        assert_eq!(h.graph_type(), (1, 2));
        let c = h.contract_edge(0).unwrap().graph;
        assert_eq!(c.genus_of(0), 1);
        assert_eq!(c.valence(0), 1);
        assert!(h.contract_edge(5).is_err());
    }

    #[test]
    fn corolla_expansions() {
        assert_eq!(ModularGraph::corolla(0, 4).expansions(true).len(), 3);
        let e = ModularGraph::corolla(1, 1).expansions(true);
        assert_eq!(e.len(), 1);
        assert!(e[0].0.is_loop(0));
        assert_eq!(ModularGraph::corolla(1, 4).expansions(false).len(), 4);
    }

    #[test]
    fn counts_for_type_one_four() {
        assert_eq!(enumerate_stable(1, 4, 1, false).len(), 4);
        assert_eq!(enumerate_stable(1, 4, 2, false).len(), 9);
        assert_eq!(enumerate_stable(0, 3, 0, true).len(), 1);
    }

    #[test]
    fn banana_has_odd_automorphism() {
        // Two vertices joined by two edges, legs split 1|3.
        let b = g(&[0, 0], &[(0, 1), (0, 1)], &[0, 1, 1, 1]);
        let auts = automorphisms(&b, true);
        assert_eq!(auts.len(), 2);
        assert!(auts.iter().any(|a| a.edge_parity() == -1));
    }

    #[test]
    fn labeled_tree_is_rigid() {
        let t = g(&[0, 0, 0], &[(0, 1), (1, 2)], &[0, 0, 1, 2, 2]);
        assert_eq!(automorphisms(&t, true).len(), 1);
    }

    #[test]
    fn json_round_trip() {
        let x = g(&[0, 1], &[(0, 0), (0, 1)], &[0, 0, 1]);
        let j = x.to_json();
        let s = serde_json::to_string(&j).unwrap();
        let y = ModularGraph::from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(serde_json::to_string(&y.to_json()).unwrap(), s);
    }

    #[test]
    fn nest_closure_of_loop() {
        // Loop vertex joined to a (0,5) vertex with four legs.
        let d04 = g(&[0, 0], &[(0, 0), (0, 1)], &[1, 1, 1, 1]);
        let loop_nest = Nest::new(vec![0]);
        let q = d04.quotient_by_nest(&loop_nest).unwrap().graph;
        assert_eq!(q.genera(), &[1, 0]);
        let (hat, origin) = d04.nest_closure(&loop_nest).unwrap();
        assert_eq!(hat.graph_type(), (1, 1));
        assert_eq!(origin, vec![Flag::Half(2)]);
        let whole = Nest::new(vec![0, 1]);
        assert_eq!(d04.quotient_by_nest(&whole).unwrap().graph, ModularGraph::corolla(1, 4));
    }

    #[test]
    fn substitution_inverts_contraction() {
        let tree = g(&[0, 0], &[(0, 1)], &[0, 0, 1, 1]);
        // Corolla (0,4) with a one-edge tree inside.
        let s = ModularGraph::corolla(0, 4).substitute(std::slice::from_ref(&tree)).unwrap();
        assert_eq!(s.graph, tree);
    }
}
