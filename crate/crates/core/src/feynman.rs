//! Bigraded complexes of graphs labeled by strata classes.
//!
//! The contraction complex `C(g,n)` has, in bidegree `(r, s)`, one summand
//! per leg-labeled stable graph `γ` with `r` edges: the `Aut(γ)`-coinvariants
//! of `det(E(γ)) ⊗ ⊗_v H(M̄_v)` in total degree `s`. Its differential sums
//! edge contractions, gluing the two classes at the ends of the contracted
//! edge. The Feynman transform is the linear dual, with the transposed
//! differential raising the number of edges.
//!
//! Orientation: each canonical graph orders its edges canonically. The term
//! contracting edge `k` of `r` carries `(−1)^{r−1−k}`, the sign of moving it
//! to the last position; transporting along an isomorphism contributes the
//! parity of the induced edge permutation.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exactq::{fmt_rational, int, trace_on_invariant_subspace, QMatrix, Rational, Subspace};
use crate::modgraph::{automorphisms, canonicalize, enumerate_stable, Flag, Isomorphism, ModularGraph, Nest};
use crate::strata::{glue, presentation, top_degree, Class, StrataError, StrataPresentation};
use crate::symmetric::{self, ClassFunction, Perm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FeynmanError {
    #[error(transparent)]
    Strata(#[from] StrataError),
    #[error("d∘d ≠ 0 at bidegree (r={r}, s={s})")]
    NotAComplex { r: usize, s: usize },
    #[error("non-integral multiplicity of {0:?} at bidegree (r={1}, s={2})")]
    NonIntegral(Vec<usize>, usize, usize),
}

/// A label tuple: `(degree, basis index)` at each vertex.
pub type Tuple = Vec<(usize, usize)>;

/// One homology class per vertex: (degree, basis coordinates).
pub type VertexClasses = Vec<(usize, Vec<Rational>)>;

/// Pure tensors of classes, one per vertex, expanded into labeled tuples.
fn expand(per_vertex: &[(usize, Vec<Rational>)]) -> Vec<(Tuple, Rational)> {
    let mut acc: Vec<(Tuple, Rational)> = vec![(Vec::new(), Rational::one())];
    for (d, v) in per_vertex {
        let mut next = Vec::new();
        for (t, c) in &acc {
            for (k, x) in v.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let mut t2 = t.clone();
                t2.push((*d, k));
                next.push((t2, c * x));
            }
        }
        acc = next;
    }
    acc
}

/// Degree distributions over vertices summing to `s`.
fn distributions(tops: &[usize], s: usize) -> Vec<Vec<usize>> {
    fn rec(tops: &[usize], s: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let Some((&t, rest)) = tops.split_first() else {
            if s == 0 {
                out.push(cur.clone());
            }
            return;
        };
        let max_rest: usize = rest.iter().sum();
        for d in (0..=t.min(s)).step_by(2) {
            if s - d > max_rest {
                continue;
            }
            cur.push(d);
            rec(rest, s - d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(tops, s, &mut Vec::new(), &mut out);
    out
}

/// Transport the class sitting at vertex `v` of `src` along an isomorphism.
fn transport_class(iso: &Isomorphism, src: &ModularGraph, dst: &ModularGraph, v: usize, d: usize, coords: &[Rational]) -> Result<Vec<Rational>, StrataError> {
    let p = iso.flag_perm(src, dst, v);
    let (g, n) = src.vertex_type(v);
    Ok(presentation(g, n, d)?.sn_act(&p, coords))
}

fn unit(dim: usize, k: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); dim];
    v[k] = Rational::one();
    v
}

/// The labeled tensor space of one graph in one internal degree, with its
/// `Aut`-coinvariant basis.
#[derive(Debug)]
pub struct LabeledSpace {
    pub tuples: Vec<Tuple>,
    index: HashMap<Tuple, usize>,
    /// Tuples whose classes represent the coinvariant basis.
    pub pivots: Vec<usize>,
    /// Coinvariant coordinates of each labeled tuple (`pivots.len()` rows).
    coords: QMatrix,
}

impl LabeledSpace {
    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    /// Coinvariant coordinates of a labeled vector given sparsely.
    pub fn project(&self, terms: &[(Tuple, Rational)]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim()];
        for (t, c) in terms {
            let i = self.index[t];
            for (o, row) in out.iter_mut().zip(self.coords.rows_iter()) {
                let x = &row[i];
                if !x.is_zero() {
                    *o += c * x;
                }
            }
        }
        out
    }
}

/// One summand of the complex: a canonical labeled graph with its spaces.
#[derive(Debug)]
pub struct Block {
    pub graph: ModularGraph,
    pub automorphisms: Vec<Isomorphism>,
    pub spaces: BTreeMap<usize, LabeledSpace>,
}

impl Block {
    fn build(graph: ModularGraph, s_values: &[usize]) -> Result<Block, StrataError> {
        let auts = automorphisms(&graph, true);
        let nv = graph.num_vertices();
        let tops: Vec<usize> = (0..nv).map(|v| {
            let (g, n) = graph.vertex_type(v);
            top_degree(g, n)
        }).collect();
        let mut spaces = BTreeMap::new();
        for &s in s_values {
            let mut tuples = Vec::new();
            for dist in distributions(&tops, s) {
                let dims: Vec<usize> = (0..nv)
                    .map(|v| {
                        let (g, n) = graph.vertex_type(v);
                        presentation(g, n, dist[v]).map(|p| p.dim())
                    })
                    .collect::<Result<_, _>>()?;
                let basis_vecs: Vec<(usize, Vec<Rational>)> = (0..nv).map(|v| (dist[v], vec![int(1); dims[v]])).collect();
                tuples.extend(expand(&basis_vecs).into_iter().map(|(t, _)| t));
            }
            if tuples.is_empty() {
                continue;
            }
            let index: HashMap<Tuple, usize> = tuples.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
            let l = tuples.len();
            // Projector P = (1/|Aut|) Σ sign(φ) ρ(φ), built column by column.
            let mut p = QMatrix::zeros(l, l);
            let scale = Rational::new(One::one(), (auts.len() as i64).into());
            for (j, t) in tuples.iter().enumerate() {
                for phi in &auts {
                    let sign = int(phi.edge_parity() as i64);
                    let mut per_vertex = vec![(0usize, Vec::new()); nv];
                    for v in 0..nv {
                        let (d, k) = t[v];
                        let (g, n) = graph.vertex_type(v);
                        let dim = presentation(g, n, d)?.dim();
                        let moved = transport_class(phi, &graph, &graph, v, d, &unit(dim, k))?;
                        per_vertex[phi.vertex[v]] = (d, moved);
                    }
                    for (t2, c) in expand(&per_vertex) {
                        p.add_at(index[&t2], j, &(&c * &sign * &scale));
                    }
                }
            }
            let (rref, pivots) = p.rref();
            let rows: Vec<Vec<Rational>> = (0..pivots.len()).map(|i| rref.row(i).to_vec()).collect();
            let coords = QMatrix::from_rows(l, rows).expect("row length");
            spaces.insert(s, LabeledSpace { tuples, index, pivots, coords });
        }
        Ok(Block { graph, automorphisms: auts, spaces })
    }
}

/// A generator of the coinvariant complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub block: usize,
    /// Index into the block space's pivots.
    pub local: usize,
}

/// Which way the differential goes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// `(r, s) → (r − 1, s)`: edge contraction.
    Contract,
    /// `(r, s) → (r + 1, s)`: the Feynman transform.
    Expand,
}

/// A bigraded complex with exact differentials, keyed by source bidegree.
#[derive(Clone, Debug)]
pub struct BigradedComplex {
    pub g: u32,
    pub n: usize,
    pub direction: Direction,
    pub dims: BTreeMap<(usize, usize), usize>,
    pub diffs: BTreeMap<(usize, usize), QMatrix>,
}

impl BigradedComplex {
    pub fn dim(&self, r: usize, s: usize) -> usize {
        self.dims.get(&(r, s)).copied().unwrap_or(0)
    }

    fn target(&self, r: usize) -> Option<usize> {
        match self.direction {
            Direction::Contract => r.checked_sub(1),
            Direction::Expand => Some(r + 1),
        }
    }

    fn source(&self, r: usize) -> Option<usize> {
        match self.direction {
            Direction::Contract => Some(r + 1),
            Direction::Expand => r.checked_sub(1),
        }
    }

    /// Differential out of `(r, s)`, or a zero matrix of the right shape.
    pub fn differential(&self, r: usize, s: usize) -> QMatrix {
        if let Some(m) = self.diffs.get(&(r, s)) {
            return m.clone();
        }
        let rows = self.target(r).map_or(0, |t| self.dim(t, s));
        QMatrix::zeros(rows, self.dim(r, s))
    }

    pub fn s_values(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.dims.keys().map(|&(_, s)| s).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn r_values(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.dims.keys().map(|&(r, _)| r).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// The linear dual: every differential transposed, direction reversed.
    pub fn dualize(&self) -> BigradedComplex {
        let direction = match self.direction {
            Direction::Contract => Direction::Expand,
            Direction::Expand => Direction::Contract,
        };
        let mut diffs = BTreeMap::new();
        for (&(r, s), m) in &self.diffs {
            if let Some(t) = self.target(r) {
                diffs.insert((t, s), m.transpose());
            }
        }
        BigradedComplex { g: self.g, n: self.n, direction, dims: self.dims.clone(), diffs }
    }

    /// Checks `d∘d = 0` in every bidegree.
    pub fn check_d_squared(&self) -> Result<(), FeynmanError> {
        for (&(r, s), m) in &self.diffs {
            let Some(t) = self.target(r) else { continue };
            if let Some(m2) = self.diffs.get(&(t, s)) {
                let prod = m2.mul(m).expect("composable");
                if !prod.is_zero() {
                    return Err(FeynmanError::NotAComplex { r, s });
                }
            }
        }
        Ok(())
    }

    /// Homology dimensions, keyed by `(r, s)`; zeros omitted.
    pub fn homology_dims(&self) -> Result<BTreeMap<(usize, usize), usize>, FeynmanError> {
        self.check_d_squared()?;
        let mut out = BTreeMap::new();
        for (&(r, s), &dim) in &self.dims {
            let out_rank = self.diffs.get(&(r, s)).map_or(0, QMatrix::rank);
            let in_rank = self.source(r).and_then(|src| self.diffs.get(&(src, s))).map_or(0, QMatrix::rank);
            let h = dim - out_rank - in_rank;
            if h > 0 {
                out.insert((r, s), h);
            }
        }
        Ok(out)
    }

    /// `Σ_r (−1)^r dim` along a row.
    pub fn row_euler_characteristic(&self, s: usize) -> i64 {
        self.dims.iter().filter(|((_, s2), _)| *s2 == s).map(|(&(r, _), &d)| if r % 2 == 0 { d as i64 } else { -(d as i64) }).sum()
    }

    /// Every nonzero bidegree satisfies `r ≤ (6g + 2n − 6 − s)/2`.
    pub fn support_bound_holds(&self) -> bool {
        let top = top_degree(self.g, self.n);
        self.dims.iter().all(|(&(r, s), &d)| d == 0 || (s <= top && 2 * r <= top - s))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut bidegrees = Vec::new();
        for (&(r, s), &dim) in &self.dims {
            let mut entry = serde_json::json!({ "r": r, "s": s, "dim": dim });
            if let Some(m) = self.diffs.get(&(r, s)) {
                entry["differential"] = m.to_json();
            }
            bidegrees.push(entry);
        }
        serde_json::json!({
            "g": self.g,
            "n": self.n,
            "direction": self.direction,
            "bidegrees": bidegrees,
        })
    }
}

/// The contraction complex with the data needed to act on it.
#[derive(Debug)]
pub struct CoComplex {
    pub complex: BigradedComplex,
    /// Blocks by number of edges.
    pub blocks: BTreeMap<usize, Vec<Block>>,
    block_index: HashMap<ModularGraph, (usize, usize)>,
    /// Generators by bidegree.
    pub generators: BTreeMap<(usize, usize), Vec<Generator>>,
    offsets: HashMap<(usize, usize, usize), usize>,
}

impl CoComplex {
    pub fn g(&self) -> u32 {
        self.complex.g
    }

    pub fn n(&self) -> usize {
        self.complex.n
    }

    pub fn block(&self, r: usize, b: usize) -> &Block {
        &self.blocks[&r][b]
    }

    /// `(r, block index)` of a canonical labeled graph.
    pub fn find_block(&self, canonical: &ModularGraph) -> Option<(usize, usize)> {
        self.block_index.get(canonical).copied()
    }

    /// Offset of a block's coordinates inside bidegree `(r, s)`.
    pub fn offset(&self, r: usize, s: usize, b: usize) -> Option<usize> {
        self.offsets.get(&(r, s, b)).copied()
    }

    /// The labeled tuple representing a generator.
    pub fn generator_tuple(&self, r: usize, s: usize, i: usize) -> (&ModularGraph, &Tuple) {
        let gen = &self.generators[&(r, s)][i];
        let block = self.block(r, gen.block);
        let space = &block.spaces[&s];
        (&block.graph, &space.tuples[space.pivots[gen.local]])
    }

    /// Coordinates in bidegree `(r, s)` of a labeled graph (not necessarily
    /// canonical) carrying one class per vertex, with the orientation given
    /// by the graph's own edge order.
    pub fn coords_of(&self, graph: &ModularGraph, classes: &[(usize, Vec<Rational>)]) -> Result<Vec<Rational>, FeynmanError> {
        self.coords_of_oriented(graph, classes, true)
    }

    /// As [`CoComplex::coords_of`]; with `twisted` false the parity of the
    /// edge permutation is ignored when transporting to canonical form.
    pub fn coords_of_oriented(
        &self,
        graph: &ModularGraph,
        classes: &[(usize, Vec<Rational>)],
        twisted: bool,
    ) -> Result<Vec<Rational>, FeynmanError> {
        let r = graph.num_edges();
        let s: usize = classes.iter().map(|c| c.0).sum();
        let total = self.complex.dim(r, s);
        let mut out = vec![Rational::zero(); total];
        let cf = canonicalize(graph, true);
        let Some((_, b)) = self.find_block(&cf.graph) else {
            return Ok(out);
        };
        let Some(off) = self.offset(r, s, b) else {
            return Ok(out);
        };
        let block = self.block(r, b);
        let space = &block.spaces[&s];
        let mut moved = vec![(0usize, Vec::new()); graph.num_vertices()];
        for v in 0..graph.num_vertices() {
            let (d, c) = &classes[v];
            moved[cf.iso.vertex[v]] = (*d, transport_class(&cf.iso, graph, &cf.graph, v, *d, c)?);
        }
        let sign = int(if twisted { cf.iso.edge_parity() as i64 } else { 1 });
        let local = space.project(&expand(&moved));
        for (i, x) in local.into_iter().enumerate() {
            out[off + i] = x * &sign;
        }
        Ok(out)
    }

    /// Contraction differential applied to a labeled graph with classes.
    pub fn contract_all(&self, graph: &ModularGraph, classes: &[(usize, Vec<Rational>)]) -> Result<Vec<Rational>, FeynmanError> {
        let r = graph.num_edges();
        let s: usize = classes.iter().map(|c| c.0).sum();
        let mut out = vec![Rational::zero(); self.complex.dim(r.saturating_sub(1), s)];
        if r == 0 {
            return Ok(out);
        }
        for k in 0..r {
            let (contracted, cls) = contract_labeled(graph, classes, k)?;
            let sign = if (r - 1 - k).is_multiple_of(2) { int(1) } else { int(-1) };
            let v = self.coords_of(&contracted, &cls)?;
            for (o, x) in out.iter_mut().zip(v) {
                if !x.is_zero() {
                    *o += x * &sign;
                }
            }
        }
        Ok(out)
    }

    /// Leg relabeling by `σ` as a matrix on bidegree `(r, s)`.
    pub fn action_matrix(&self, sigma: &[usize], r: usize, s: usize) -> Result<QMatrix, FeynmanError> {
        let dim = self.complex.dim(r, s);
        let cols: Vec<Result<Vec<Rational>, FeynmanError>> = crate::par::map_range(dim, |i| {
            let (graph, tuple) = self.generator_tuple(r, s, i);
            let (moved, iso) = graph.relabel_legs(sigma);
            let classes = self.transport_tuple(graph, &moved, &iso, tuple)?;
            self.coords_of(&moved, &classes)
        });
        let cols = cols.into_iter().collect::<Result<Vec<_>, _>>()?;
        Ok(QMatrix::from_columns(dim, &cols).expect("square"))
    }

    fn transport_tuple(&self, src: &ModularGraph, dst: &ModularGraph, iso: &Isomorphism, tuple: &Tuple) -> Result<VertexClasses, FeynmanError> {
        let mut out = vec![(0usize, Vec::new()); src.num_vertices()];
        for v in 0..src.num_vertices() {
            let (d, k) = tuple[v];
            let (g, n) = src.vertex_type(v);
            let dim = presentation(g, n, d)?.dim();
            out[iso.vertex[v]] = (d, transport_class(iso, src, dst, v, d, &unit(dim, k))?);
        }
        Ok(out)
    }

    /// Character of the S_n action on homology at `(r, s)`, by cycle type.
    pub fn homology_character(&self, r: usize, s: usize) -> Result<ClassFunction, FeynmanError> {
        let n = self.n();
        let mut chi = ClassFunction::new();
        let d_out = self.complex.differential(r, s);
        let im_out = column_space(&d_out);
        let d_in = if self.complex.dim(r + 1, s) > 0 { Some(self.complex.differential(r + 1, s)) } else { None };
        let im_in = d_in.as_ref().map(column_space).unwrap_or_default();
        for mu in symmetric::partitions(n) {
            let sigma = symmetric::class_representative(&mu);
            let here = self.action_matrix(&sigma, r, s)?;
            let mut tr = Rational::zero();
            for i in 0..here.nrows() {
                tr += here.get(i, i);
            }
            if !im_out.is_empty() {
                let below = self.action_matrix(&sigma, r - 1, s)?;
                tr -= trace_on_invariant_subspace(&below, &im_out).expect("image is stable");
            }
            if !im_in.is_empty() {
                tr -= trace_on_invariant_subspace(&here, &im_in).expect("image is stable");
            }
            chi.insert(mu, tr);
        }
        Ok(chi)
    }

    /// Decomposition of homology at `(r, s)` into irreducibles.
    pub fn homology_decomposition(&self, r: usize, s: usize) -> Result<Vec<(Vec<usize>, u64)>, FeynmanError> {
        let chi = self.homology_character(r, s)?;
        symmetric::decompose(self.n(), &chi).map_err(|lam| FeynmanError::NonIntegral(lam, r, s))
    }

    /// Dimension of the S_n-coinvariants of the chains at `(r, s)`.
    pub fn coinvariant_dim(&self, r: usize, s: usize) -> Result<usize, FeynmanError> {
        let n = self.n();
        let mut total = Rational::zero();
        let mut order = Rational::zero();
        for mu in symmetric::partitions(n) {
            let sigma = symmetric::class_representative(&mu);
            let m = self.action_matrix(&sigma, r, s)?;
            let mut tr = Rational::zero();
            for i in 0..m.nrows() {
                tr += m.get(i, i);
            }
            let size = Rational::from_integer(symmetric::class_size(&mu));
            total += tr * &size;
            order += size;
        }
        let q = total / order;
        Ok(q.to_integer().try_into().expect("dimension fits"))
    }
}

/// Independent columns spanning the image, as an echelon basis.
fn column_space(m: &QMatrix) -> Vec<Vec<Rational>> {
    let cols: Vec<Vec<Rational>> = (0..m.ncols()).map(|j| m.column(j)).collect();
    Subspace::span(m.nrows(), &cols).basis().to_vec()
}

/// The flag permutation taking the flags of `v` in `g` to the flags of the
/// corresponding vertex of a nest closure.
fn closure_perm(g: &ModularGraph, nest: &Nest, origin: &[Flag], hat: &ModularGraph, local: usize, v: usize) -> Perm {
    let target = hat.flags(local);
    let pos: HashMap<Flag, usize> = target.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let leg_of: HashMap<Flag, usize> = origin.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    g.flags(v)
        .into_iter()
        .map(|f| {
            let mapped = match f {
                Flag::Half(h) if nest.edges.contains(&(h / 2)) => {
                    let j = nest.edges.iter().position(|&e| e == h / 2).expect("nest edge");
                    Flag::Half(2 * j + h % 2)
                }
                other => Flag::Leg(leg_of[&other]),
            };
            pos[&mapped]
        })
        .collect()
}

/// Contracts edge `k` of a labeled graph, gluing the classes at its ends.
/// Returns the contracted graph (inherited edge order) and its classes.
pub fn contract_labeled(graph: &ModularGraph, classes: &[(usize, Vec<Rational>)], k: usize) -> Result<(ModularGraph, VertexClasses), FeynmanError> {
    let nest = Nest::new(vec![k]);
    let (hat, origin) = graph.nest_closure(&nest).map_err(StrataError::from)?;
    let verts = graph.nest_vertices(&nest);
    let mut hat_classes = Vec::with_capacity(verts.len());
    for (local, &v) in verts.iter().enumerate() {
        let (d, c) = &classes[v];
        let p = closure_perm(graph, &nest, &origin, &hat, local, v);
        let (g, n) = graph.vertex_type(v);
        hat_classes.push(Class { d: *d, coords: presentation(g, n, *d)?.sn_act(&p, c) });
    }
    let glued = glue(&hat, &hat_classes)?;
    let contraction = graph.contract_edge(k).map_err(StrataError::from)?;
    let merged = contraction.vertex_map[verts[0]];
    let mut out = vec![(0usize, Vec::new()); contraction.graph.num_vertices()];
    for v in 0..graph.num_vertices() {
        if !verts.contains(&v) {
            out[contraction.vertex_map[v]] = classes[v].clone();
        }
    }
    out[merged] = (glued.d, glued.coords);
    Ok((contraction.graph, out))
}

/// Builds the contraction complex of type `(g, n)`.
pub fn build_co_complex(g: u32, n: usize) -> Result<CoComplex, FeynmanError> {
    let top = top_degree(g, n);
    let s_values: Vec<usize> = (0..=top).step_by(2).collect();
    let max_r = top / 2;
    let mut blocks = BTreeMap::new();
    let mut block_index = HashMap::new();
    for r in 0..=max_r {
        let graphs = enumerate_stable(g, n, r, true);
        let built = crate::par::map(&graphs, |x| Block::build(x.clone(), &s_values));
        let built = built.into_iter().collect::<Result<Vec<_>, _>>()?;
        for (b, blk) in built.iter().enumerate() {
            block_index.insert(blk.graph.clone(), (r, b));
        }
        blocks.insert(r, built);
    }
    let mut generators = BTreeMap::new();
    let mut offsets = HashMap::new();
    let mut dims = BTreeMap::new();
    for (&r, bl) in &blocks {
        for &s in &s_values {
            let mut gens = Vec::new();
            for (b, blk) in bl.iter().enumerate() {
                if let Some(space) = blk.spaces.get(&s) {
                    if space.dim() > 0 {
                        offsets.insert((r, s, b), gens.len());
                        gens.extend((0..space.dim()).map(|local| Generator { block: b, local }));
                    }
                }
            }
            if !gens.is_empty() {
                dims.insert((r, s), gens.len());
                generators.insert((r, s), gens);
            }
        }
    }
    let complex = BigradedComplex { g, n, direction: Direction::Contract, dims, diffs: BTreeMap::new() };
    let mut co = CoComplex { complex, blocks, block_index, generators, offsets };
    let keys: Vec<(usize, usize)> = co.complex.dims.keys().copied().filter(|&(r, _)| r > 0).collect();
    let mut diffs = BTreeMap::new();
    for (r, s) in keys {
        let dim = co.complex.dim(r, s);
        let cols = crate::par::map_range(dim, |i| {
            let (graph, tuple) = co.generator_tuple(r, s, i);
            let classes = tuple_classes(graph, tuple)?;
            co.contract_all(graph, &classes)
        });
        let cols = cols.into_iter().collect::<Result<Vec<_>, _>>()?;
        let rows = co.complex.dim(r - 1, s);
        diffs.insert((r, s), QMatrix::from_columns(rows, &cols).expect("consistent"));
    }
    co.complex.diffs = diffs;
    Ok(co)
}

/// Unit classes described by a tuple.
pub fn tuple_classes(graph: &ModularGraph, tuple: &Tuple) -> Result<VertexClasses, FeynmanError> {
    (0..graph.num_vertices())
        .map(|v| {
            let (d, k) = tuple[v];
            let (g, n) = graph.vertex_type(v);
            let p: Arc<StrataPresentation> = presentation(g, n, d)?;
            Ok((d, unit(p.dim(), k)))
        })
        .collect()
}

/// The Feynman transform proper: the dual of the contraction complex.
pub fn feynman_transform(g: u32, n: usize) -> Result<BigradedComplex, FeynmanError> {
    Ok(build_co_complex(g, n)?.complex.dualize())
}

/// Outcome of the row-two check.
#[derive(Clone, Debug, Serialize)]
pub struct Row2Report {
    pub g: u32,
    pub n: usize,
    pub r: usize,
    pub s: usize,
    pub cycles: usize,
    pub boundaries: usize,
    pub good: usize,
    pub holds: bool,
}

/// In the Feynman transform at `(r, s) = (3g + n − 4, 2)`, checks that every
/// cycle is a boundary plus a combination of generators on graphs with no
/// loops, no parallel edges and only genus-zero vertices.
pub fn row2_property_check(co: &CoComplex) -> Row2Report {
    let (g, n) = (co.g(), co.n());
    let r = 3 * g as usize + n - 4;
    let s = 2;
    let dim = co.complex.dim(r, s);
    // FT differential out of (r,s) is the transpose of contraction into it.
    let out = co.complex.differential(r + 1, s).transpose();
    let cycles = out.nullspace_basis();
    let inc = co.complex.differential(r, s).transpose();
    let mut span: Vec<Vec<Rational>> = (0..inc.ncols()).map(|j| inc.column(j)).collect();
    let boundaries = Subspace::span(dim, &span).dim();
    let mut good = 0;
    for (i, gen) in co.generators.get(&(r, s)).into_iter().flatten().enumerate() {
        let graph = &co.block(r, gen.block).graph;
        let is_good = !graph.has_loop() && !graph.has_parallel_edges() && graph.genera().iter().all(|&x| x == 0);
        if is_good {
            good += 1;
            span.push(unit(dim, i));
        }
    }
    let total = Subspace::span(dim, &span);
    let holds = cycles.iter().all(|z| total.contains(z));
    Row2Report { g, n, r, s, cycles: cycles.len(), boundaries, good, holds }
}

/// Human-readable matrix listing for dumps.
pub fn matrix_csv(m: &QMatrix) -> String {
    m.to_csv()
}

/// Entry formatting shared with dumps.
pub fn entry(q: &Rational) -> String {
    fmt_rational(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distributions_respect_tops() {
        assert_eq!(distributions(&[2, 2], 2), vec![vec![0, 2], vec![2, 0]]);
        assert!(distributions(&[0, 0], 2).is_empty());
    }

    #[test]
    fn m04_complex() {
        let co = build_co_complex(0, 4).unwrap();
        assert_eq!(co.complex.dim(0, 0), 1);
        assert_eq!(co.complex.dim(0, 2), 1);
        assert_eq!(co.complex.dim(1, 0), 3);
        let d = co.complex.differential(1, 0);
        assert_eq!(d.nrows(), 1);
        assert_eq!(d.rank(), 1);
        co.complex.check_d_squared().unwrap();
    }
}
