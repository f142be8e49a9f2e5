//! Homology of M̄_{g,n} for the types `(0,3..6)` and `(1,1..4)` as boundary
//! strata modulo relations.
//!
//! A generator of `H_d(M̄_{g,n})` is a leg-labeled stable graph whose vertices
//! all carry fundamental classes, with `d = Σ_v (6g(v) + 2|v| − 6)`. It stands
//! for the pushforward of the fundamental class along the gluing map, with no
//! automorphism factors. Relations are the genus-zero four-point relations
//! pushed forward along every stratum, plus the elliptic relation in
//! `H_4(M̄_{1,4})`.
//!
//! The chosen basis consists of the first generators, in canonical order,
//! that are independent modulo relations.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactq::{int, quotient_coords, LinalgError, QMatrix, Rational, Subspace};
use crate::modgraph::{canonicalize, enumerate_stable, Flag, GraphError, ModularGraph};
use crate::symmetric::{self, Perm};

/// Types whose homology is modeled.
pub const SUPPORTED: [(u32, usize); 8] = [(0, 3), (0, 4), (0, 5), (0, 6), (1, 1), (1, 2), (1, 3), (1, 4)];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrataError {
    #[error("type ({0},{1}) is outside the supported range")]
    Unsupported(u32, usize),
    #[error("degree {d} is odd or exceeds the top degree {top}")]
    BadDegree { d: usize, top: usize },
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub fn is_supported(g: u32, n: usize) -> bool {
    SUPPORTED.contains(&(g, n))
}

/// Real dimension of M̄_{g,n}.
pub fn top_degree(g: u32, n: usize) -> usize {
    6 * g as usize + 2 * n - 6
}

fn check_range(g: u32, n: usize, d: usize) -> Result<usize, StrataError> {
    if !is_supported(g, n) {
        return Err(StrataError::Unsupported(g, n));
    }
    let top = top_degree(g, n);
    if d % 2 == 1 || d > top {
        return Err(StrataError::BadDegree { d, top });
    }
    Ok((top - d) / 2)
}

/// Leg-labeled strata of degree `d`, in canonical order.
pub fn strata_generators(g: u32, n: usize, d: usize) -> Result<Vec<ModularGraph>, StrataError> {
    let edges = check_range(g, n, d)?;
    Ok(enumerate_stable(g, n, edges, true))
}

/// Splits vertex `v` of `g0`: flags whose bit is set in `mask` move to a new
/// genus-zero vertex, joined to `v` by a new last edge.
fn split_vertex(g0: &ModularGraph, v: usize, flags: &[Flag], mask: u32) -> ModularGraph {
    let w = g0.num_vertices();
    let mut genus = g0.genera().to_vec();
    genus.push(0);
    let mut edges = g0.edges().to_vec();
    let mut legs = g0.legs().to_vec();
    for (j, f) in flags.iter().enumerate() {
        if mask & (1 << j) == 0 {
            continue;
        }
        match *f {
            Flag::Leg(i) => legs[i] = w,
            Flag::Half(h) => {
                if h % 2 == 0 {
                    edges[h / 2].0 = w;
                } else {
                    edges[h / 2].1 = w;
                }
            }
        }
    }
    edges.push((v, w));
    ModularGraph::from_parts(genus, edges, legs)
}

/// Sum over splittings of `v` putting flags `a, b` on one side and `c, d` on
/// the other, as a vector over the generators.
fn wdvv_side(
    g0: &ModularGraph,
    v: usize,
    quad: [usize; 4],
    index: &HashMap<ModularGraph, usize>,
    out: &mut [Rational],
    coeff: &Rational,
) {
    let flags = g0.flags(v);
    let m = flags.len();
    let rest: Vec<usize> = (0..m).filter(|j| !quad.contains(j)).collect();
    let base = (1u32 << quad[2]) | (1u32 << quad[3]);
    for sub in 0u32..(1 << rest.len()) {
        let mut mask = base;
        for (t, &j) in rest.iter().enumerate() {
            if sub & (1 << t) != 0 {
                mask |= 1 << j;
            }
        }
        let gg = canonicalize(&split_vertex(g0, v, &flags, mask), true).graph;
        let k = index[&gg];
        out[k] += coeff;
    }
}

/// Four-point relations pushed forward along every stratum of one edge fewer.
fn wdvv_rows(g: u32, n: usize, edges: usize, index: &HashMap<ModularGraph, usize>) -> Vec<Vec<Rational>> {
    if edges == 0 {
        return Vec::new();
    }
    let ambient = enumerate_stable(g, n, edges - 1, true);
    let per_graph = crate::par::map(&ambient, |g0| {
        let mut rows = Vec::new();
        for v in 0..g0.num_vertices() {
            let m = g0.valence(v);
            if g0.genus_of(v) != 0 || m < 4 {
                continue;
            }
            for a in 0..m {
                for b in a + 1..m {
                    for c in b + 1..m {
                        for d in c + 1..m {
                            // ab|cd − ac|bd and ab|cd − ad|bc
                            for other in [[a, c, b, d], [a, d, b, c]] {
                                let mut row = vec![Rational::zero(); index.len()];
                                wdvv_side(g0, v, [a, b, c, d], index, &mut row, &int(1));
                                wdvv_side(g0, v, other, index, &mut row, &int(-1));
                                if row.iter().any(|x| !x.is_zero()) {
                                    rows.push(row);
                                }
                            }
                        }
                    }
                }
            }
        }
        rows
    });
    per_graph.into_iter().flatten().collect()
}

/// Four-point relations in `H_d(M̄_{g,n})`, as vectors over
/// [`strata_generators`].
pub fn wdvv_relations(g: u32, n: usize, d: usize) -> Result<Vec<Vec<Rational>>, StrataError> {
    let edges = check_range(g, n, d)?;
    let gens = enumerate_stable(g, n, edges, true);
    let index = gens.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
    Ok(wdvv_rows(g, n, edges, &index))
}

// ---------------------------------------------------------------------------
// Named strata of type (1,4)
// ---------------------------------------------------------------------------

/// The nine two-edge stable graphs of type (1,4).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Delta {
    D22,
    D23,
    D34,
    D24,
    D04,
    D03,
    D02,
    Alpha,
    Beta,
}

impl Delta {
    pub const ALL: [Delta; 9] =
        [Delta::D22, Delta::D23, Delta::D34, Delta::D24, Delta::D04, Delta::D03, Delta::D02, Delta::Alpha, Delta::Beta];

    pub fn name(self) -> &'static str {
        match self {
            Delta::D22 => "delta_22",
            Delta::D23 => "delta_23",
            Delta::D34 => "delta_34",
            Delta::D24 => "delta_24",
            Delta::D04 => "delta_04",
            Delta::D03 => "delta_03",
            Delta::D02 => "delta_02",
            Delta::Alpha => "delta_alpha",
            Delta::Beta => "delta_beta",
        }
    }

    /// A labeled representative whose edge 0 is the edge called I and edge 1
    /// the edge called II.
    pub fn template(self) -> ModularGraph {
        let (genus, edges, legs): (Vec<u32>, Vec<(usize, usize)>, Vec<usize>) = match self {
            // genus-one vertex in the middle, two legs at each end
            Delta::D22 => (vec![1, 0, 0], vec![(0, 1), (0, 2)], vec![1, 1, 2, 2]),
            // path g1 – middle – far with 1, 1, 2 legs
            Delta::D23 => (vec![1, 0, 0], vec![(0, 1), (1, 2)], vec![0, 1, 2, 2]),
            // 0, 1, 3 legs
            Delta::D34 => (vec![1, 0, 0], vec![(0, 1), (1, 2)], vec![1, 2, 2, 2]),
            // 0, 2, 2 legs
            Delta::D24 => (vec![1, 0, 0], vec![(0, 1), (1, 2)], vec![1, 1, 2, 2]),
            // loop vertex with 4-k legs, bridge to a vertex with k legs
            Delta::D04 => (vec![0, 0], vec![(0, 0), (0, 1)], vec![1, 1, 1, 1]),
            Delta::D03 => (vec![0, 0], vec![(0, 0), (0, 1)], vec![0, 1, 1, 1]),
            Delta::D02 => (vec![0, 0], vec![(0, 0), (0, 1)], vec![0, 0, 1, 1]),
            // two vertices, two parallel edges
            Delta::Alpha => (vec![0, 0], vec![(0, 1), (0, 1)], vec![0, 1, 1, 1]),
            Delta::Beta => (vec![0, 0], vec![(0, 1), (0, 1)], vec![0, 0, 1, 1]),
        };
        ModularGraph::new(genus, edges, legs).expect("template graphs are stable")
    }

    /// Coefficient in the elliptic relation.
    pub fn getzler_coefficient(self) -> i64 {
        match self {
            Delta::D22 => 12,
            Delta::D23 => -4,
            Delta::D24 => -2,
            Delta::D34 => 6,
            Delta::D03 => 1,
            Delta::D04 => 1,
            Delta::Beta => -2,
            Delta::D02 | Delta::Alpha => 0,
        }
    }

    /// Which named graph an unlabeled two-edge (1,4) graph is.
    pub fn identify(g: &ModularGraph) -> Option<Delta> {
        let c = canonicalize(g, false).graph;
        Delta::ALL.into_iter().find(|d| canonicalize(&d.template(), false).graph == c)
    }
}

/// The four one-edge stable graphs of type (1,4).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OneEdge {
    A,
    B,
    C,
    D,
}

impl OneEdge {
    pub const ALL: [OneEdge; 4] = [OneEdge::A, OneEdge::B, OneEdge::C, OneEdge::D];

    pub fn name(self) -> &'static str {
        match self {
            OneEdge::A => "A",
            OneEdge::B => "B",
            OneEdge::C => "C",
            OneEdge::D => "D",
        }
    }

    /// Representative; the genus-one (or loop) vertex is vertex 0.
    pub fn template(self) -> ModularGraph {
        let (genus, edges, legs): (Vec<u32>, Vec<(usize, usize)>, Vec<usize>) = match self {
            OneEdge::A => (vec![1, 0], vec![(0, 1)], vec![1, 1, 1, 1]),
            OneEdge::B => (vec![1, 0], vec![(0, 1)], vec![0, 1, 1, 1]),
            OneEdge::C => (vec![1, 0], vec![(0, 1)], vec![0, 0, 1, 1]),
            OneEdge::D => (vec![0], vec![(0, 0)], vec![0, 0, 0, 0]),
        };
        ModularGraph::new(genus, edges, legs).expect("template graphs are stable")
    }

    pub fn identify(g: &ModularGraph) -> Option<OneEdge> {
        let c = canonicalize(g, false).graph;
        OneEdge::ALL.into_iter().find(|d| canonicalize(&d.template(), false).graph == c)
    }
}

/// Distinct leg labelings of a graph, as canonical labeled graphs.
pub fn distinct_labelings(g: &ModularGraph) -> Vec<ModularGraph> {
    let mut set = std::collections::BTreeSet::new();
    for sigma in symmetric::all_perms(g.num_legs()) {
        set.insert(canonicalize(&g.relabel_legs(&sigma).0, true).graph);
    }
    set.into_iter().collect()
}

/// Sum of all distinct labelings of a graph, as a vector over generators.
pub fn symbol_vector(pres: &StrataPresentation, g: &ModularGraph) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); pres.num_generators()];
    for x in distinct_labelings(g) {
        let k = pres.generator_index(&x).expect("labeling is a generator");
        v[k] += Rational::one();
    }
    v
}

/// The elliptic relation in `H_4(M̄_{1,4})`, over the generators of that
/// presentation.
pub fn getzler_relation(gens: &[ModularGraph]) -> Vec<Rational> {
    let index: HashMap<&ModularGraph, usize> = gens.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let mut v = vec![Rational::zero(); gens.len()];
    for d in Delta::ALL {
        let c = d.getzler_coefficient();
        if c == 0 {
            continue;
        }
        for x in distinct_labelings(&d.template()) {
            v[index[&x]] += int(c);
        }
    }
    v
}

// ---------------------------------------------------------------------------
// Presentations
// ---------------------------------------------------------------------------

/// `H_d(M̄_{g,n})` as generators modulo relations, with a chosen basis.
#[derive(Debug)]
pub struct StrataPresentation {
    g: u32,
    n: usize,
    d: usize,
    generators: Vec<ModularGraph>,
    index: HashMap<ModularGraph, usize>,
    relations: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    reduction: Vec<Vec<Rational>>,
    actions: Mutex<HashMap<Perm, Arc<Vec<Vec<Rational>>>>>,
}

impl StrataPresentation {
    pub fn build(g: u32, n: usize, d: usize) -> Result<Self, StrataError> {
        let edges = check_range(g, n, d)?;
        let generators = enumerate_stable(g, n, edges, true);
        let index: HashMap<ModularGraph, usize> =
            generators.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
        let mut relations = wdvv_rows(g, n, edges, &index);
        if (g, n, d) == (1, 4, 4) {
            relations.push(getzler_relation(&generators));
        }
        let ng = generators.len();
        // Row-reduce with columns in reverse order: pivots are the latest
        // generators, the free columns the first independent ones.
        let reversed: Vec<Vec<Rational>> =
            relations.iter().map(|r| r.iter().rev().cloned().collect()).collect();
        let (rref, pivots) = QMatrix::from_rows(ng, reversed)?.rref();
        let mut is_pivot = vec![None; ng];
        for (row, &p) in pivots.iter().enumerate() {
            is_pivot[ng - 1 - p] = Some(row);
        }
        let basis: Vec<usize> = (0..ng).filter(|&j| is_pivot[j].is_none()).collect();
        let pos: HashMap<usize, usize> = basis.iter().enumerate().map(|(i, &j)| (j, i)).collect();
        let reduction = (0..ng)
            .map(|j| {
                let mut c = vec![Rational::zero(); basis.len()];
                match is_pivot[j] {
                    None => c[pos[&j]] = Rational::one(),
                    Some(row) => {
                        for (i, &b) in basis.iter().enumerate() {
                            let x = rref.get(row, ng - 1 - b);
                            if !x.is_zero() {
                                c[i] = -x.clone();
                            }
                        }
                    }
                }
                c
            })
            .collect();
        Ok(StrataPresentation { g, n, d, generators, index, relations, basis, reduction, actions: Mutex::new(HashMap::new()) })
    }

    pub fn genus(&self) -> u32 {
        self.g
    }

    pub fn legs(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[ModularGraph] {
        &self.generators
    }

    pub fn generator(&self, j: usize) -> &ModularGraph {
        &self.generators[j]
    }

    pub fn relations(&self) -> &[Vec<Rational>] {
        &self.relations
    }

    pub fn relation_matrix(&self) -> QMatrix {
        QMatrix::from_rows(self.generators.len(), self.relations.clone()).expect("rows have generator length")
    }

    /// Generator indices forming the basis.
    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    pub fn basis_graph(&self, k: usize) -> &ModularGraph {
        &self.generators[self.basis[k]]
    }

    pub fn generator_index(&self, canonical: &ModularGraph) -> Option<usize> {
        self.index.get(canonical).copied()
    }

    /// Basis coordinates of a generator.
    pub fn reduce_generator(&self, j: usize) -> &[Rational] {
        &self.reduction[j]
    }

    /// Basis coordinates of a vector over generators.
    pub fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim()];
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (o, r) in out.iter_mut().zip(&self.reduction[j]) {
                if !r.is_zero() {
                    *o += x * r;
                }
            }
        }
        out
    }

    /// Basis coordinates of the stratum class of any labeled graph of the
    /// right type and degree.
    pub fn class_of(&self, g: &ModularGraph) -> Result<Vec<Rational>, StrataError> {
        let c = canonicalize(g, true).graph;
        let j = self
            .generator_index(&c)
            .ok_or_else(|| StrataError::TypeMismatch(format!("graph is not a generator of ({},{},{})", self.g, self.n, self.d)))?;
        Ok(self.reduction[j].clone())
    }

    /// Images of the basis vectors under leg relabeling by `σ`.
    pub fn action(&self, sigma: &[usize]) -> Arc<Vec<Vec<Rational>>> {
        if let Some(a) = self.actions.lock().expect("action cache").get(sigma) {
            return a.clone();
        }
        let cols: Vec<Vec<Rational>> = (0..self.dim())
            .map(|k| {
                let (h, _) = self.basis_graph(k).relabel_legs(sigma);
                self.class_of(&h).expect("relabeling preserves type")
            })
            .collect();
        let a = Arc::new(cols);
        self.actions.lock().expect("action cache").insert(sigma.to_vec(), a.clone());
        a
    }

    /// Leg relabeling on basis coordinates.
    pub fn sn_act(&self, sigma: &[usize], coords: &[Rational]) -> Vec<Rational> {
        if sigma.iter().enumerate().all(|(i, &j)| i == j) {
            return coords.to_vec();
        }
        let cols = self.action(sigma);
        let mut out = vec![Rational::zero(); self.dim()];
        for (x, col) in coords.iter().zip(cols.iter()) {
            if x.is_zero() {
                continue;
            }
            for (o, y) in out.iter_mut().zip(col) {
                if !y.is_zero() {
                    *o += x * y;
                }
            }
        }
        out
    }

    /// Action of `σ` as a matrix on basis coordinates.
    pub fn action_matrix(&self, sigma: &[usize]) -> QMatrix {
        let cols = self.action(sigma);
        QMatrix::from_columns(self.dim(), &cols).expect("square action")
    }

    /// Basis of the subspace fixed by the group generated by `gens`.
    pub fn invariant_subspace(&self, gens: &[Perm]) -> Vec<Vec<Rational>> {
        let group = symmetric::closure(self.n, gens);
        let dim = self.dim();
        let mut cols = Vec::with_capacity(dim);
        for k in 0..dim {
            let mut avg = vec![Rational::zero(); dim];
            for s in &group {
                for (a, b) in avg.iter_mut().zip(self.action(s)[k].iter()) {
                    *a += b;
                }
            }
            cols.push(avg);
        }
        Subspace::span(dim, &cols).basis().to_vec()
    }

    /// Coinvariants of the group generated by `gens`.
    pub fn coinvariant_quotient(&self, gens: &[Perm]) -> Coinvariants {
        let dim = self.dim();
        let mut rel = Vec::new();
        for s in gens {
            for (k, col) in self.action(s).iter().enumerate() {
                let mut v = col.clone();
                v[k] -= Rational::one();
                rel.push(v);
            }
        }
        let unit = |k: usize| {
            let mut v = vec![Rational::zero(); dim];
            v[k] = Rational::one();
            v
        };
        let ambient: Vec<Vec<Rational>> = (0..dim).map(unit).collect();
        let mut complement = Vec::new();
        let mut columns = Vec::new();
        for k in 0..dim {
            let (comp, c) = quotient_coords(&ambient, &rel, &ambient[k]).expect("unit vector in ambient");
            complement = comp;
            columns.push(c);
        }
        let q = complement.len();
        let projection = QMatrix::from_columns(q, &columns).expect("consistent quotient dimension");
        Coinvariants { complement, projection }
    }
}

/// A coinvariant quotient: a complement of basis vectors and the projection
/// onto it.
#[derive(Clone, Debug)]
pub struct Coinvariants {
    pub complement: Vec<usize>,
    pub projection: QMatrix,
}

impl Coinvariants {
    pub fn dim(&self) -> usize {
        self.complement.len()
    }
}

// ---------------------------------------------------------------------------
// Atlas and gluing
// ---------------------------------------------------------------------------

type Key = (u32, usize, usize);

fn atlas() -> &'static Mutex<HashMap<Key, Arc<StrataPresentation>>> {
    static ATLAS: OnceLock<Mutex<HashMap<Key, Arc<StrataPresentation>>>> = OnceLock::new();
    ATLAS.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The (cached) presentation of `H_d(M̄_{g,n})`.
pub fn presentation(g: u32, n: usize, d: usize) -> Result<Arc<StrataPresentation>, StrataError> {
    if let Some(p) = atlas().lock().expect("atlas").get(&(g, n, d)) {
        return Ok(p.clone());
    }
    let p = Arc::new(StrataPresentation::build(g, n, d)?);
    let mut map = atlas().lock().expect("atlas");
    Ok(map.entry((g, n, d)).or_insert(p).clone())
}

/// Same as [`presentation`] but builds a fresh, uncached copy.
pub fn build_presentation(g: u32, n: usize, d: usize) -> Result<StrataPresentation, StrataError> {
    StrataPresentation::build(g, n, d)
}

/// A homology class: degree and basis coordinates in that presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Class {
    pub d: usize,
    pub coords: Vec<Rational>,
}

impl Class {
    /// The fundamental class of M̄_{g,n}.
    pub fn fundamental(g: u32, n: usize) -> Class {
        Class { d: top_degree(g, n), coords: vec![Rational::one()] }
    }

    /// A basis vector.
    pub fn basis(dim: usize, d: usize, k: usize) -> Class {
        let mut coords = vec![Rational::zero(); dim];
        coords[k] = Rational::one();
        Class { d, coords }
    }
}

type GlueKey = (ModularGraph, Vec<(usize, usize)>);

fn glue_cache() -> &'static Mutex<HashMap<GlueKey, (usize, usize)>> {
    static CACHE: OnceLock<Mutex<HashMap<GlueKey, (usize, usize)>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Glues generators: vertex `v` of `outer` carries generator `parts[v].1` of
/// degree `parts[v].0`. Returns the target degree and generator index.
pub fn glue_generators(outer: &ModularGraph, parts: &[(usize, usize)]) -> Result<(usize, usize), StrataError> {
    let key = (outer.clone(), parts.to_vec());
    if let Some(&r) = glue_cache().lock().expect("glue cache").get(&key) {
        return Ok(r);
    }
    if parts.len() != outer.num_vertices() {
        return Err(StrataError::TypeMismatch("one class per vertex required".into()));
    }
    let mut inner = Vec::with_capacity(parts.len());
    let mut d = 0;
    for (v, &(dv, j)) in parts.iter().enumerate() {
        let (gv, nv) = outer.vertex_type(v);
        let p = presentation(gv, nv, dv)?;
        inner.push(p.generator(j).clone());
        d += dv;
    }
    let (g, n) = outer.graph_type();
    let glued = outer.substitute(&inner)?.graph;
    let target = presentation(g, n, d)?;
    let c = canonicalize(&glued, true).graph;
    let j = target.generator_index(&c).ok_or_else(|| StrataError::TypeMismatch("glued graph not a generator".into()))?;
    glue_cache().lock().expect("glue cache").insert(key, (d, j));
    Ok((d, j))
}

/// Operadic composition along `outer`, extended multilinearly.
pub fn glue(outer: &ModularGraph, classes: &[Class]) -> Result<Class, StrataError> {
    if classes.len() != outer.num_vertices() {
        return Err(StrataError::TypeMismatch("one class per vertex required".into()));
    }
    let mut pres = Vec::with_capacity(classes.len());
    for (v, c) in classes.iter().enumerate() {
        let (gv, nv) = outer.vertex_type(v);
        let p = presentation(gv, nv, c.d)?;
        if p.dim() != c.coords.len() {
            return Err(StrataError::TypeMismatch(format!("vertex {v}: coordinate length")));
        }
        pres.push(p);
    }
    let d: usize = classes.iter().map(|c| c.d).sum();
    let (g, n) = outer.graph_type();
    let target = presentation(g, n, d)?;
    let mut out = vec![Rational::zero(); target.dim()];
    // Iterate over tuples of nonzero coordinates.
    let supports: Vec<Vec<usize>> =
        classes.iter().map(|c| (0..c.coords.len()).filter(|&k| !c.coords[k].is_zero()).collect()).collect();
    let mut idx = vec![0usize; classes.len()];
    if supports.iter().any(Vec::is_empty) {
        return Ok(Class { d, coords: out });
    }
    loop {
        let mut coeff = Rational::one();
        let mut parts = Vec::with_capacity(classes.len());
        for (v, c) in classes.iter().enumerate() {
            let k = supports[v][idx[v]];
            coeff *= &c.coords[k];
            parts.push((c.d, pres[v].basis()[k]));
        }
        let (_, j) = glue_generators(outer, &parts)?;
        for (o, r) in out.iter_mut().zip(target.reduce_generator(j)) {
            if !r.is_zero() {
                *o += &coeff * r;
            }
        }
        // advance
        let mut v = 0;
        loop {
            if v == idx.len() {
                return Ok(Class { d, coords: out });
            }
            idx[v] += 1;
            if idx[v] < supports[v].len() {
                break;
            }
            idx[v] = 0;
            v += 1;
        }
    }
}

/// Dimension of `H_d(M̄_{g,n})` from the presentation.
pub fn betti(g: u32, n: usize, d: usize) -> Result<usize, StrataError> {
    Ok(presentation(g, n, d)?.dim())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_dimensions() {
        assert_eq!(betti(0, 4, 2).unwrap(), 1);
        assert_eq!(betti(0, 4, 0).unwrap(), 1);
        assert_eq!(strata_generators(0, 4, 0).unwrap().len(), 3);
        assert_eq!(betti(0, 5, 2).unwrap(), 5);
        assert_eq!(strata_generators(1, 1, 0).unwrap().len(), 1);
        assert_eq!(betti(1, 2, 2).unwrap(), 2);
    }

    #[test]
    fn range_errors() {
        assert_eq!(betti(2, 1, 0), Err(StrataError::Unsupported(2, 1)));
        assert!(matches!(betti(0, 4, 3), Err(StrataError::BadDegree { .. })));
        assert!(matches!(betti(0, 4, 4), Err(StrataError::BadDegree { .. })));
    }

    #[test]
    fn labeling_counts() {
        let counts: Vec<usize> = Delta::ALL.iter().map(|d| distinct_labelings(&d.template()).len()).collect();
        assert_eq!(counts, vec![3, 12, 4, 6, 1, 4, 6, 4, 3]);
    }

    #[test]
    fn glue_two_points() {
        let tree = ModularGraph::new(vec![0, 0], vec![(0, 1)], vec![0, 0, 1, 1]).unwrap();
        let p = Class::fundamental(0, 3);
        let c = glue(&tree, &[p.clone(), p]).unwrap();
        assert_eq!(c.d, 0);
        assert_eq!(c.coords, vec![int(1)]);
    }

    #[test]
    fn reduction_is_a_projection() {
        let p = presentation(0, 5, 2).unwrap();
        for j in 0..p.num_generators() {
            let c = p.reduce_generator(j).to_vec();
            let mut v = vec![Rational::zero(); p.num_generators()];
            for (k, &b) in p.basis().iter().enumerate() {
                v[b] = c[k].clone();
            }
            assert_eq!(p.reduce(&v), c);
        }
    }
}
