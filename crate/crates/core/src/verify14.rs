//! Named checks for type (1,4): the S_4-invariant complex `Q = Q_6 → Q_5 →
//! Q_4` at internal degree 4, its dual in the `λ` basis, the norm functional,
//! the Massey structure, the ∞-morphism `f`, the gravity presentation of
//! `H_1(M_{0,6})` and the ∞-isomorphism `g`.
//!
//! Every check returns `Err(residue)` on the first discrepancy; the runner in
//! [`full_report`] turns these into a [`VerificationReport`].

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactq::{fmt_rational, int, rat, solve_in_basis, LinalgError, ParamScalar, QMatrix, Rational, Subspace};
use crate::feynman::{build_co_complex, contract_labeled, CoComplex, FeynmanError};
use crate::modgraph::{canonicalize, enumerate_stable, marked_edge_key, GraphError, ModularGraph, Nest};
use crate::report::{run_check, VerificationReport};
use crate::strata::{self, glue, presentation, top_degree, Class, Delta, OneEdge, StrataError};
use crate::symmetric::{self, Perm};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Feynman(#[from] FeynmanError),
    #[error(transparent)]
    Strata(#[from] StrataError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{0}")]
    Mismatch(String),
}

/// Internal degree of the Q-complex.
pub const S: usize = 4;

/// The two edges of a two-edge template.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Edge {
    I,
    II,
}

impl Edge {
    pub fn index(self) -> usize {
        match self {
            Edge::I => 0,
            Edge::II => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Edge::I => "I",
            Edge::II => "II",
        }
    }
}

/// Column headings of both tables: the basis of `Q_5`, and the index set of
/// `λ_1 … λ_14`.
pub const LAMBDA: [(Delta, Edge); 14] = [
    (Delta::D34, Edge::II),
    (Delta::D24, Edge::II),
    (Delta::D04, Edge::I),
    (Delta::D03, Edge::I),
    (Delta::D34, Edge::I),
    (Delta::D23, Edge::II),
    (Delta::D24, Edge::I),
    (Delta::D02, Edge::I),
    (Delta::D23, Edge::I),
    (Delta::D22, Edge::I),
    (Delta::D04, Edge::II),
    (Delta::D03, Edge::II),
    (Delta::D02, Edge::II),
    (Delta::Beta, Edge::II),
];

/// Rows of the first table: the basis of `Q_6`.
pub const ETA_ROWS: [Delta; 6] = [Delta::D23, Delta::D34, Delta::D24, Delta::D04, Delta::D03, Delta::D02];

/// Rows of the second table: the basis of `Q_4`.
pub const Q4_ROWS: [Delta; 7] = [Delta::D22, Delta::D23, Delta::D34, Delta::D24, Delta::D04, Delta::D03, Delta::D02];

/// The five nested graphs on the loop graph `D`, as (graph, nested edge).
pub const XI: [(Delta, Edge); 5] =
    [(Delta::D04, Edge::II), (Delta::D03, Edge::II), (Delta::D02, Edge::II), (Delta::Beta, Edge::II), (Delta::Alpha, Edge::II)];

/// Which one-edge graph carries each heading: columns 1–3 on `A`, 4–6 on
/// `B`, 7–10 on `C`, 11–14 on `D`.
pub const SUMMANDS: [(OneEdge, std::ops::Range<usize>); 4] =
    [(OneEdge::A, 0..3), (OneEdge::B, 3..6), (OneEdge::C, 6..10), (OneEdge::D, 10..14)];

pub const GOLDEN_Q6_Q5: &str = include_str!("../golden/q6_q5.csv");
pub const GOLDEN_Q5_Q4_T: &str = include_str!("../golden/q5_q4_transpose.csv");

fn heading_name(h: (Delta, Edge)) -> String {
    format!("{}^{}", h.0.name(), h.1.name())
}

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

/// All scalar data entering the checks. [`Params::default`] holds the
/// published values; tests mutate single entries.
#[derive(Clone, Debug)]
pub struct Params {
    /// `c_•(e, w)`, the coefficient of `ω` in `μ_•(1)`.
    pub massey: BTreeMap<Delta, ParamScalar>,
    /// `f̄^ω(λ_i) = t_i ω`.
    pub t: [ParamScalar; 14],
    /// `f_D(ξ_j) = c_j ω`.
    pub f_d: [ParamScalar; 5],
    /// `g_D` on the six kinds of tree symbol, in the order of [`TreeKind::ALL`].
    pub g_d: [ParamScalar; 6],
    /// Whether graph orientations carry the sign of the edge permutation.
    pub twisted: bool,
}

fn pe(a: i64, b: i64) -> ParamScalar {
    ParamScalar::ew(int(a), int(b))
}

fn pq(a: Rational, b: Rational) -> ParamScalar {
    ParamScalar::ew(a, b)
}

impl Default for Params {
    fn default() -> Self {
        let massey = BTreeMap::from([
            (Delta::D22, pe(12, 0)),
            (Delta::D23, pe(-4, 0)),
            (Delta::D34, pe(6, 0)),
            (Delta::D24, pe(-2, 0)),
            (Delta::D04, pe(1, 6)),
            (Delta::D03, pe(1, 3)),
            (Delta::D02, pe(0, 1)),
            (Delta::Alpha, pe(0, -3)),
            (Delta::Beta, pe(-2, -4)),
        ]);
        let h = rat(-1, 2);
        let t = [
            pe(-3, 0),
            pe(1, 0),
            pq(h.clone(), int(0)),
            pq(h.clone(), int(0)),
            pe(-3, 0),
            pe(2, 0),
            pe(1, 0),
            pe(0, 0),
            pe(2, 0),
            pe(-6, 0),
            pq(h.clone(), int(0)),
            pq(h, int(0)),
            pe(0, 0),
            pe(2, 0),
        ];
        let f_d = [pq(rat(1, 2), int(6)), pq(rat(1, 2), int(3)), pe(0, 1), pe(-1, -2), pq(int(0), rat(-3, 2))];
        let d = ParamScalar::w() - ParamScalar::w2();
        let g_d = [int(3), int(-2), rat(-3, 2), int(1), int(6), rat(-3, 2)].map(|k| d.scale(&k));
        Params { massey, t, f_d, g_d, twisted: true }
    }
}

impl Params {
    /// Every coefficient of `ω` multiplied by `k`, i.e. `ω` replaced by `ω/k`.
    pub fn rescaled(&self, k: &Rational) -> Params {
        Params {
            massey: self.massey.iter().map(|(d, c)| (*d, c.scale(k))).collect(),
            t: self.t.clone().map(|x| x.scale(k)),
            f_d: self.f_d.clone().map(|x| x.scale(k)),
            g_d: self.g_d.clone().map(|x| x.scale(k)),
            twisted: self.twisted,
        }
    }
}

/// `c(e, w′)`: the same form with `w` renamed.
fn at_w_prime(c: &ParamScalar) -> ParamScalar {
    ParamScalar::new(c.c0.clone(), c.ce.clone(), Rational::zero(), &c.cw + &c.cw2)
}

// ---------------------------------------------------------------------------
// Small vector helpers
// ---------------------------------------------------------------------------

fn zeros(n: usize) -> Vec<Rational> {
    vec![Rational::zero(); n]
}

fn add_into(acc: &mut [Rational], v: &[Rational], k: &Rational) {
    for (a, x) in acc.iter_mut().zip(v) {
        if !x.is_zero() {
            *a += x * k;
        }
    }
}

fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

fn fmt_vec(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(fmt_rational).collect();
    format!("[{}]", parts.join(", "))
}

fn coords(basis: &[Vec<Rational>], v: &[Rational], what: &str) -> Result<Vec<Rational>, VerifyError> {
    solve_in_basis(basis, v).map_err(|e| VerifyError::Mismatch(format!("{what}: {e}")))
}

/// Pairs a rational vector with parameter values.
fn pair(r: &[Rational], vals: &[ParamScalar]) -> ParamScalar {
    let mut acc = ParamScalar::zero();
    for (x, v) in r.iter().zip(vals) {
        if !x.is_zero() {
            acc += &(x * v);
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// Labelings
// ---------------------------------------------------------------------------

/// Leg labelings of a template that differ as graphs with both edges marked.
pub fn marked_labelings(t: &ModularGraph) -> Vec<ModularGraph> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for sigma in symmetric::all_perms(t.num_legs()) {
        let (h, _) = t.relabel_legs(&sigma);
        let marked: Vec<usize> = (0..h.num_edges()).collect();
        if seen.insert(marked_edge_key(&h, &marked, true)) {
            out.push(h);
        }
    }
    out
}

/// Leg labelings of a template that differ as graphs.
pub fn plain_labelings(t: &ModularGraph) -> Vec<ModularGraph> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for sigma in symmetric::all_perms(t.num_legs()) {
        let (h, _) = t.relabel_legs(&sigma);
        if seen.insert(canonicalize(&h, true).graph) {
            out.push(h);
        }
    }
    out
}

/// Fundamental classes at every vertex.
pub fn fundamental_classes(g: &ModularGraph) -> Vec<(usize, Vec<Rational>)> {
    (0..g.num_vertices())
        .map(|v| {
            let (gv, nv) = g.vertex_type(v);
            (top_degree(gv, nv), vec![Rational::one()])
        })
        .collect()
}

// ---------------------------------------------------------------------------
// The Q-complex
// ---------------------------------------------------------------------------

/// `Q_r = C_{r,4}(1,4)^{S_4}` with the named vectors, all in the coordinates
/// of the contraction complex.
#[derive(Debug)]
pub struct QComplex {
    pub co: CoComplex,
    /// Averaging projectors over S_4 on `C_{r,4}`, `r = 0, 1, 2`.
    pub reynolds: [QMatrix; 3],
    /// Bases of `Q_4, Q_5, Q_6` (indexed by `r`).
    pub invariants: [Subspace; 3],
    pub eta: BTreeMap<Delta, Vec<Rational>>,
    pub delta_i: BTreeMap<Delta, Vec<Rational>>,
    pub delta_ii: BTreeMap<Delta, Vec<Rational>>,
    pub delta: BTreeMap<Delta, Vec<Rational>>,
}

impl QComplex {
    pub fn dim(&self, r: usize) -> usize {
        self.invariants[r].dim()
    }

    pub fn heading(&self, h: (Delta, Edge)) -> &Vec<Rational> {
        match h.1 {
            Edge::I => &self.delta_i[&h.0],
            Edge::II => &self.delta_ii[&h.0],
        }
    }

    pub fn q5_basis(&self) -> Vec<Vec<Rational>> {
        LAMBDA.iter().map(|&h| self.heading(h).clone()).collect()
    }

    pub fn q6_basis(&self) -> Vec<Vec<Rational>> {
        ETA_ROWS.iter().map(|d| self.eta[d].clone()).collect()
    }

    pub fn q4_basis(&self) -> Vec<Vec<Rational>> {
        Q4_ROWS.iter().map(|d| self.delta[d].clone()).collect()
    }

    /// The differential `Q_6 → Q_5` (rows `η`, columns the headings).
    pub fn d6(&self) -> Result<QMatrix, VerifyError> {
        let d = self.co.complex.differential(2, S);
        let b5 = self.q5_basis();
        let mut rows = Vec::new();
        for x in ETA_ROWS {
            let img = d.mul_vec(&self.eta[&x])?;
            rows.push(coords(&b5, &img, &format!("d(eta_{})", &x.name()[6..]))?);
        }
        Ok(QMatrix::from_rows(14, rows)?)
    }

    /// The transpose of `Q_5 → Q_4` (rows `δ`, columns the headings).
    pub fn d5_transpose(&self) -> Result<QMatrix, VerifyError> {
        let d = self.co.complex.differential(1, S);
        let b4 = self.q4_basis();
        let mut cols = Vec::new();
        for h in LAMBDA {
            let img = d.mul_vec(self.heading(h))?;
            cols.push(coords(&b4, &img, &format!("d({})", heading_name(h)))?);
        }
        Ok(QMatrix::from_columns(7, &cols)?)
    }

    /// Functionals on `C_{r,4}` representing the dual basis of the named
    /// basis of `Q_r`, composed with averaging. Row `i` is the `i`-th one.
    pub fn dual_functionals(&self, r: usize) -> Result<QMatrix, VerifyError> {
        let basis = match r {
            0 => self.q4_basis(),
            1 => self.q5_basis(),
            _ => self.q6_basis(),
        };
        let rey = &self.reynolds[r];
        let mut cols = Vec::new();
        for j in 0..rey.ncols() {
            cols.push(coords(&basis, &rey.column(j), "averaged unit vector")?);
        }
        Ok(QMatrix::from_columns(basis.len(), &cols)?)
    }
}

/// S_4-average of the leg action on `C_{r,s}`.
fn reynolds(co: &CoComplex, r: usize, s: usize) -> Result<QMatrix, VerifyError> {
    let dim = co.complex.dim(r, s);
    let perms = symmetric::all_perms(co.n());
    let mats: Vec<Result<QMatrix, FeynmanError>> = crate::par::map(&perms, |p| co.action_matrix(p, r, s));
    let mut acc = QMatrix::zeros(dim, dim);
    let k = rat(1, perms.len() as i64);
    for m in mats {
        let m = m?;
        for i in 0..dim {
            for j in 0..dim {
                let x = m.get(i, j);
                if !x.is_zero() {
                    acc.add_at(i, j, &(x * &k));
                }
            }
        }
    }
    Ok(acc)
}

/// Builds the Q-complex. With `twisted` false the `η` vectors are formed
/// without orientation signs, which is the sign mutation used in tests.
pub fn build_q_complex(twisted: bool) -> Result<QComplex, VerifyError> {
    let co = build_co_complex(1, 4)?;
    let reynolds = [reynolds(&co, 0, S)?, reynolds(&co, 1, S)?, reynolds(&co, 2, S)?];
    let invariants = [0, 1, 2].map(|r| {
        let m = &reynolds[r];
        let cols: Vec<Vec<Rational>> = (0..m.ncols()).map(|j| m.column(j)).collect();
        Subspace::span(m.nrows(), &cols)
    });
    let (d2, d1, d0) = (co.complex.dim(2, S), co.complex.dim(1, S), co.complex.dim(0, S));
    let mut eta = BTreeMap::new();
    let mut delta_i = BTreeMap::new();
    let mut delta_ii = BTreeMap::new();
    let mut delta = BTreeMap::new();
    let one = Rational::one();
    for x in Delta::ALL {
        let t = x.template();
        let mut e = zeros(d2);
        let mut di = zeros(d1);
        let mut dii = zeros(d1);
        for h in marked_labelings(&t) {
            let fund = fundamental_classes(&h);
            add_into(&mut e, &co.coords_of_oriented(&h, &fund, twisted)?, &one);
            for (edge, acc) in [(Edge::I, &mut di), (Edge::II, &mut dii)] {
                let (g1, c1) = contract_labeled(&h, &fund, edge.index())?;
                add_into(acc, &co.coords_of(&g1, &c1)?, &one);
            }
        }
        let mut d = zeros(d0);
        for h in plain_labelings(&t) {
            let classes: Vec<Class> =
                fundamental_classes(&h).into_iter().map(|(d, coords)| Class { d, coords }).collect();
            let c = glue(&h, &classes)?;
            add_into(&mut d, &co.coords_of(&ModularGraph::corolla(1, 4), &[(c.d, c.coords)])?, &one);
        }
        eta.insert(x, e);
        delta_i.insert(x, di);
        delta_ii.insert(x, dii);
        delta.insert(x, d);
    }
    Ok(QComplex { co, reynolds, invariants, eta, delta_i, delta_ii, delta })
}

/// The two differential matrices in the named bases.
pub fn q_matrices(q: &QComplex) -> Result<(QMatrix, QMatrix), VerifyError> {
    Ok((q.d6()?, q.d5_transpose()?))
}

pub fn golden_matrices() -> (QMatrix, QMatrix) {
    (
        QMatrix::from_csv(GOLDEN_Q6_Q5).expect("golden table parses"),
        QMatrix::from_csv(GOLDEN_Q5_Q4_T).expect("golden table parses"),
    )
}

fn compare(name: &str, got: &QMatrix, want: &QMatrix) -> Result<(), String> {
    if got.nrows() != want.nrows() || got.ncols() != want.ncols() {
        return Err(format!("{name}: shape {}x{} != {}x{}", got.nrows(), got.ncols(), want.nrows(), want.ncols()));
    }
    for i in 0..got.nrows() {
        for j in 0..got.ncols() {
            if got.get(i, j) != want.get(i, j) {
                return Err(format!(
                    "{name}: entry ({}, {}) is {}, expected {}",
                    i + 1,
                    j + 1,
                    fmt_rational(got.get(i, j)),
                    fmt_rational(want.get(i, j))
                ));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// The norm functional
// ---------------------------------------------------------------------------

/// Coefficients of `|ε|/e` on `r_1 … r_14`.
pub const NORM: [i64; 14] = [-6, 2, -1, -1, 0, 4, 0, 0, 0, -6, 0, 0, 0, 2];

/// `|ε|` for `ε = Σ r_i λ_i`.
pub fn norm_functional(r: &[Rational]) -> ParamScalar {
    let mut acc = Rational::zero();
    for (x, &k) in r.iter().zip(&NORM) {
        acc += x * int(k);
    }
    ParamScalar::ew(acc, Rational::zero())
}

/// Pairs of indices (1-based) equal on cycles.
pub const CYCLE_CONDITIONS: [(usize, usize); 6] = [(1, 5), (2, 7), (3, 11), (4, 12), (6, 9), (8, 13)];

/// The preimage `Σ a_δ δ*` of a boundary `Σ r_i λ_i`, in the row order of
/// the second table.
pub fn preimage(r: &[Rational]) -> Vec<Rational> {
    // δ22, δ23, δ34, δ24, δ04, δ03, δ02
    vec![&r[9] / int(2), r[5].clone(), r[0].clone(), r[1].clone(), r[2].clone(), r[3].clone(), r[7].clone()]
}

// ---------------------------------------------------------------------------
// Genus-zero trees with six legs
// ---------------------------------------------------------------------------

/// One-edge trees of type (0,6) used for the `D` summand. Labels 5 and 6
/// (indices 4, 5) are the legs glued into the loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Tree {
    T1,
    T2,
    T3,
    T4,
    T5a,
    T5b,
}

impl Tree {
    pub const ALL: [Tree; 6] = [Tree::T1, Tree::T2, Tree::T3, Tree::T4, Tree::T5a, Tree::T5b];

    pub fn name(self) -> &'static str {
        match self {
            Tree::T1 => "{56|1234}",
            Tree::T2 => "{56i|jkl}",
            Tree::T3 => "{56ij|kl}",
            Tree::T4 => "{ij5|kl6}",
            Tree::T5a => "{i5|jkl6}",
            Tree::T5b => "{i6|jkl5}",
        }
    }

    pub fn template(self) -> ModularGraph {
        let legs = match self {
            Tree::T1 => vec![1, 1, 1, 1, 0, 0],
            Tree::T2 => vec![0, 1, 1, 1, 0, 0],
            Tree::T3 => vec![0, 0, 1, 1, 0, 0],
            Tree::T4 => vec![0, 0, 1, 1, 0, 1],
            Tree::T5a => vec![0, 1, 1, 1, 0, 1],
            Tree::T5b => vec![0, 1, 1, 1, 1, 0],
        };
        ModularGraph::new(vec![0, 0], vec![(0, 1)], legs).expect("stable tree")
    }

    /// Sum over the distinct S_4-relabelings of legs 1–4, as a class in
    /// `H_4(M̄_{0,6})`.
    pub fn rho(self) -> Result<Vec<Rational>, VerifyError> {
        let pres = presentation(0, 6, 4)?;
        let mut seen = BTreeSet::new();
        let mut acc = zeros(pres.dim());
        for p in symmetric::all_perms(4) {
            let sigma: Perm = p.iter().copied().chain([4, 5]).collect();
            let (h, _) = self.template().relabel_legs(&sigma);
            if seen.insert(canonicalize(&h, true).graph) {
                add_into(&mut acc, &pres.class_of(&h)?, &Rational::one());
            }
        }
        Ok(acc)
    }

    /// Joins legs 5 and 6 into an edge; the tree edge stays edge 0.
    pub fn glue_loop(self) -> ModularGraph {
        let t = self.template();
        let (a, b) = (t.legs()[4], t.legs()[5]);
        ModularGraph::new(t.genera().to_vec(), vec![(0, 1), (a.min(b), a.max(b))], t.legs()[..4].to_vec())
            .expect("glued graph is stable")
    }
}

/// `(56)` acting on six labels.
pub const SWAP56: [usize; 6] = [0, 1, 2, 3, 5, 4];

/// Coefficients of `ρ_5^2` in the basis `ρ_1, ρ_2, ρ_3, ρ_4, ρ_5^1`.
pub fn rho_relation() -> Result<Vec<Rational>, VerifyError> {
    let basis: Vec<Vec<Rational>> =
        [Tree::T1, Tree::T2, Tree::T3, Tree::T4, Tree::T5a].iter().map(|t| t.rho()).collect::<Result<_, _>>()?;
    coords(&basis, &Tree::T5b.rho()?, "rho_5^2")
}

/// `d̂(λ_i)` for `i = 11 … 14` in the basis `ξ_1 … ξ_5` (rows `i`).
pub fn dhat_d_rows() -> Result<Vec<Vec<Rational>>, VerifyError> {
    let pres = presentation(0, 6, 4)?;
    let rhos: Vec<Vec<Rational>> = Tree::ALL.iter().map(|t| t.rho()).collect::<Result<_, _>>()?;
    let basis: Vec<Vec<Rational>> = rhos[..5].to_vec();
    // Which ξ each tree glues to.
    let xi_keys: Vec<_> = XI.iter().map(|&(d, e)| marked_edge_key(&d.template(), &[e.index()], false)).collect();
    let mut tree_xi = Vec::new();
    for t in Tree::ALL {
        let glued = t.glue_loop();
        let key = marked_edge_key(&glued, &[0], false);
        let j = xi_keys
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| VerifyError::Mismatch(format!("tree {} glues to no xi", t.name())))?;
        tree_xi.push(j);
    }
    // d̂(∘56 ρ_j^*) = Σ_T ρ_j^*(ρ_T) ξ(T), for j = 1..4.
    let mut dhat_rho = vec![zeros(5); 4];
    for (ti, rho) in rhos.iter().enumerate() {
        let c = coords(&basis, rho, "rho in rho basis")?;
        for (j, row) in dhat_rho.iter_mut().enumerate() {
            row[tree_xi[ti]] += &c[j];
        }
    }
    // ∘56(ρ_j^*) = Σ_x M[j][x] λ_{10+x}: evaluate ρ_j^* on the averaged cut
    // of each heading on D.
    let mut m = QMatrix::zeros(4, 4);
    for x in 0..4 {
        let (dx, edge) = LAMBDA[10 + x];
        let mut cut = zeros(pres.dim());
        for h in marked_labelings(&dx.template()) {
            let fund = fundamental_classes(&h);
            let (g1, c1) = contract_labeled(&h, &fund, edge.index())?;
            if OneEdge::identify(&g1) != Some(OneEdge::D) {
                return Err(VerifyError::Mismatch(format!("{} is not on D", heading_name(LAMBDA[10 + x]))));
            }
            add_into(&mut cut, &c1[0].1, &Rational::one());
        }
        let mut avg = cut.clone();
        add_into(&mut avg, &pres.sn_act(&SWAP56, &cut), &Rational::one());
        let avg: Vec<Rational> = avg.iter().map(|v| v / int(2)).collect();
        let c = coords(&basis, &avg, "averaged cut")?;
        for (j, cj) in c.iter().take(4).enumerate() {
            m.set(j, x, cj.clone());
        }
    }
    // λ_{10+x} = Σ_j (M^{-1})[x][j] ∘56(ρ_j^*).
    let cols: Vec<Vec<Rational>> = (0..4).map(|j| m.row(j).to_vec()).collect();
    let mut rows = Vec::new();
    for x in 0..4 {
        let mut ex = zeros(4);
        ex[x] = Rational::one();
        // Solve Σ_j a_j M[j][·] = e_x.
        let a = coords(&cols, &ex, "inverting the cut pairing")?;
        let mut out = zeros(5);
        for (j, aj) in a.iter().enumerate() {
            add_into(&mut out, &dhat_rho[j], aj);
        }
        rows.push(out);
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Gravity
// ---------------------------------------------------------------------------

/// A one-edge tree with six labeled leaves, rooted at leaf 6; `a` is the
/// vertex next to the root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TreeSymbol {
    /// `a` carries `{i, j, 6}`.
    X(usize, usize),
    /// the far vertex carries `{i, j}`.
    Y(usize, usize),
    /// `a` carries `{i, 6}`.
    Z(usize),
}

impl TreeSymbol {
    /// From the set of labels at the root vertex (which contains 6).
    pub fn from_root_side(a: &BTreeSet<usize>) -> TreeSymbol {
        assert!(a.contains(&6), "root side contains 6");
        let rest: Vec<usize> = a.iter().copied().filter(|&x| x != 6).collect();
        match rest.len() {
            1 => TreeSymbol::Z(rest[0]),
            2 => TreeSymbol::X(rest[0], rest[1]),
            3 => {
                let b: Vec<usize> = (1..=5).filter(|x| !a.contains(x)).collect();
                TreeSymbol::Y(b[0], b[1])
            }
            _ => panic!("not a stable one-edge tree"),
        }
    }

    pub fn root_side(self) -> BTreeSet<usize> {
        match self {
            TreeSymbol::X(i, j) => BTreeSet::from([i, j, 6]),
            TreeSymbol::Y(i, j) => (1..=6).filter(|&x| x != i && x != j).collect(),
            TreeSymbol::Z(i) => BTreeSet::from([i, 6]),
        }
    }

    /// Relabels by a permutation of `0..6` acting on labels `1..=6`.
    pub fn act(self, sigma: &[usize]) -> TreeSymbol {
        let a: BTreeSet<usize> = self.root_side().iter().map(|&x| sigma[x - 1] + 1).collect();
        let a = if a.contains(&6) { a } else { (1..=6).filter(|x| !a.contains(x)).collect() };
        TreeSymbol::from_root_side(&a)
    }

    pub fn name(self) -> String {
        match self {
            TreeSymbol::X(i, j) => format!("X_{i}{j}"),
            TreeSymbol::Y(i, j) => format!("Y_{i}{j}"),
            TreeSymbol::Z(i) => format!("Z_{i}"),
        }
    }

    /// Representative of the `(56)`-orbit.
    pub fn coinvariant(self) -> TreeSymbol {
        self.min(self.act(&SWAP56))
    }
}

/// `H_1(M_{0,6})` presented by the 25 tree symbols and 16 relations.
#[derive(Clone, Debug)]
pub struct GravitySpace {
    pub symbols: Vec<TreeSymbol>,
    pub relations: Vec<Vec<Rational>>,
}

impl GravitySpace {
    pub fn build() -> GravitySpace {
        let mut symbols = Vec::new();
        for i in 1..=5 {
            for j in i + 1..=5 {
                symbols.push(TreeSymbol::X(i, j));
            }
        }
        for i in 1..=5 {
            for j in i + 1..=5 {
                symbols.push(TreeSymbol::Y(i, j));
            }
        }
        symbols.extend((1..=5).map(TreeSymbol::Z));
        let mut g = GravitySpace { symbols, relations: Vec::new() };
        let y = |a: usize, b: usize| TreeSymbol::Y(a.min(b), a.max(b));
        let mut rels = Vec::new();
        let mut sum_y = zeros(25);
        for s in &g.symbols {
            if matches!(s, TreeSymbol::Y(..)) {
                sum_y[g.index(*s)] = Rational::one();
            }
        }
        rels.push(sum_y);
        for i in 1..=5 {
            let o: Vec<usize> = (1..=5).filter(|&x| x != i).collect();
            let mut r = zeros(25);
            r[g.index(TreeSymbol::Z(i))] += int(1);
            for a in 0..4 {
                for b in a + 1..4 {
                    r[g.index(y(o[a], o[b]))] -= int(1);
                }
            }
            rels.push(r);
        }
        for i in 1..=5 {
            for j in i + 1..=5 {
                let o: Vec<usize> = (1..=5).filter(|&x| x != i && x != j).collect();
                let mut r = zeros(25);
                r[g.index(TreeSymbol::X(i, j))] += int(1);
                for (a, b) in [(0, 1), (1, 2), (0, 2)] {
                    r[g.index(y(o[a], o[b]))] -= int(1);
                }
                rels.push(r);
            }
        }
        g.relations = rels;
        g
    }

    pub fn index(&self, s: TreeSymbol) -> usize {
        self.symbols.iter().position(|&x| x == s).expect("known symbol")
    }

    pub fn dim(&self) -> usize {
        self.symbols.len() - QMatrix::from_rows(25, self.relations.clone()).expect("rows").rank()
    }
}

/// The six `S_4 × S_2`-orbits of tree symbols on which `g_D` is specified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TreeKind {
    XI5,
    XIJ,
    YI5,
    YIJ,
    Z5,
    ZI,
}

impl TreeKind {
    pub const ALL: [TreeKind; 6] = [TreeKind::XI5, TreeKind::XIJ, TreeKind::YI5, TreeKind::YIJ, TreeKind::Z5, TreeKind::ZI];

    pub fn of(s: TreeSymbol) -> TreeKind {
        match s {
            TreeSymbol::X(_, 5) => TreeKind::XI5,
            TreeSymbol::X(..) => TreeKind::XIJ,
            TreeSymbol::Y(_, 5) => TreeKind::YI5,
            TreeSymbol::Y(..) => TreeKind::YIJ,
            TreeSymbol::Z(5) => TreeKind::Z5,
            TreeSymbol::Z(_) => TreeKind::ZI,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TreeKind::XI5 => "X_i5",
            TreeKind::XIJ => "X_ij",
            TreeKind::YI5 => "Y_i5",
            TreeKind::YIJ => "Y_ij",
            TreeKind::Z5 => "Z_5",
            TreeKind::ZI => "Z_i",
        }
    }
}

/// `g_D` on a tree symbol, as a multiple of `ω` in `w, w′`.
pub fn g_d(p: &Params, s: TreeSymbol) -> ParamScalar {
    let k = TreeKind::of(s);
    p.g_d[TreeKind::ALL.iter().position(|&x| x == k).expect("listed")].clone()
}

/// Gravity symbols `μ_N` for the nests `N` of a two-edge graph with
/// `γ/N = D`, read off from the nest closure with the loop legs labeled 5, 6.
pub fn mu_symbols(t: &ModularGraph) -> Result<Vec<TreeSymbol>, VerifyError> {
    let mut out = Vec::new();
    for e in 0..t.num_edges() {
        let c = t.contract_edge(e)?;
        if OneEdge::identify(&c.graph) != Some(OneEdge::D) {
            continue;
        }
        let (hat, _) = t.nest_closure(&Nest::new(vec![e]))?;
        let root = hat.legs()[5];
        let a: BTreeSet<usize> = (0..6).filter(|&i| hat.legs()[i] == root).map(|i| i + 1).collect();
        out.push(TreeSymbol::from_root_side(&a));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

pub type CheckResultT = Result<(), String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn expect_eq<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> CheckResultT {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, expected {want:?}"))
    }
}

/// Shared, lazily built inputs of the checks.
pub struct Context {
    pub params: Params,
    q: Arc<OnceLock<Result<QComplex, String>>>,
}

impl Context {
    pub fn new(params: Params) -> Context {
        Context { params, q: Arc::new(OnceLock::new()) }
    }

    /// Same Q-complex, other scalars. The complex depends only on the
    /// orientation convention, so that must agree.
    pub fn with_params(&self, params: Params) -> Context {
        if params.twisted == self.params.twisted {
            Context { params, q: Arc::clone(&self.q) }
        } else {
            Context::new(params)
        }
    }

    pub fn q(&self) -> Result<&QComplex, String> {
        self.q.get_or_init(|| build_q_complex(self.params.twisted).map_err(err)).as_ref().map_err(Clone::clone)
    }

    /// The computed tables, or the first error.
    pub fn tables(&self) -> Result<(QMatrix, QMatrix), String> {
        q_matrices(self.q()?).map_err(err)
    }
}

pub fn check_graphs(_: &Context) -> CheckResultT {
    let two = enumerate_stable(1, 4, 2, false);
    expect_eq("unlabeled two-edge (1,4) graphs", two.len(), 9)?;
    let mut named: Vec<Delta> = two.iter().filter_map(Delta::identify).collect();
    named.sort();
    expect_eq("two-edge shapes", named, Delta::ALL.to_vec())?;
    let one = enumerate_stable(1, 4, 1, false);
    expect_eq("unlabeled one-edge (1,4) graphs", one.len(), 4)?;
    let mut named: Vec<OneEdge> = one.iter().filter_map(OneEdge::identify).collect();
    named.sort();
    expect_eq("one-edge shapes", named, OneEdge::ALL.to_vec())?;
    let counts: Vec<usize> = Delta::ALL.iter().map(|d| strata::distinct_labelings(&d.template()).len()).collect();
    expect_eq("labelings per two-edge graph", counts, vec![3, 12, 4, 6, 1, 4, 6, 4, 3])
}

pub fn check_strata_dims(_: &Context) -> CheckResultT {
    let b = |g, n, d| strata::betti(g, n, d).map_err(err);
    expect_eq("dim H_2(M_1,4)", b(1, 4, 2)?, 12)?;
    expect_eq("dim H_4(M_1,4)", b(1, 4, 4)?, 23)?;
    expect_eq("dim H_2(M_1,2)", b(1, 2, 2)?, 2)?;
    for &(g, n) in &strata::SUPPORTED {
        expect_eq(&format!("dim H_0(M_{g},{n})"), b(g, n, 0)?, 1)?;
    }
    let p13 = presentation(1, 3, 4).map_err(err)?;
    expect_eq("dim H_4(M_1,3)^S2", p13.invariant_subspace(&[symmetric::transposition(3, 0, 1)]).len(), 4)?;
    let p06 = presentation(0, 6, 4).map_err(err)?;
    let gens: Vec<Perm> = [(4, 5), (0, 1), (1, 2), (2, 3)].iter().map(|&(a, b)| symmetric::transposition(6, a, b)).collect();
    expect_eq("dim (H_4(M_0,6)_S56)^S4", p06.invariant_subspace(&gens).len(), 4)
}

pub fn check_complexes(_: &Context) -> CheckResultT {
    for &(g, n) in &strata::SUPPORTED {
        if (g, n) == (0, 3) {
            continue;
        }
        let co = build_co_complex(g, n).map_err(err)?;
        co.complex.check_d_squared().map_err(err)?;
        if !co.complex.support_bound_holds() {
            return Err(format!("support bound fails for ({g},{n})"));
        }
        if (g, n) == (1, 4) {
            let row = |s| (0..=4).map(|r| co.complex.dim(r, s)).filter(|&d| d > 0).collect::<Vec<_>>();
            expect_eq("s=4 row", row(4), vec![23, 60, 36])?;
            expect_eq("s=2 row", row(2), vec![12, 60, 91, 46])?;
        }
    }
    Ok(())
}

pub fn check_coinvariant_dims(cx: &Context) -> CheckResultT {
    let q = cx.q()?;
    let dims: Vec<usize> = (0..3).map(|r| q.co.coinvariant_dim(r, S)).collect::<Result<_, _>>().map_err(err)?;
    expect_eq("S4-coinvariant dims at s=4", dims, vec![7, 14, 6])
}

pub fn check_homology(_: &Context) -> CheckResultT {
    for &(g, n) in &strata::SUPPORTED {
        if (g, n) == (0, 3) {
            continue;
        }
        let co = build_co_complex(g, n).map_err(err)?;
        let h = co.complex.homology_dims().map_err(err)?;
        if (g, n) == (1, 4) {
            let want = BTreeMap::from([((0, 8), 1), ((1, 4), 1), ((3, 2), 3), ((4, 0), 3)]);
            expect_eq("homology of (1,4)", h, want)?;
        } else {
            let top = top_degree(g, n);
            if let Some(&(r, s)) = h.keys().find(|&&(r, s)| 2 * r + s != top) {
                return Err(format!("({g},{n}) has homology off the line 2r+s={top} at ({r},{s})"));
            }
        }
    }
    Ok(())
}

pub fn check_characters(cx: &Context) -> CheckResultT {
    let co = &cx.q()?.co;
    for ((r, s), want) in [((4, 0), vec![3, 1]), ((3, 2), vec![2, 1, 1]), ((1, 4), vec![4]), ((0, 8), vec![4])] {
        let dec = co.homology_decomposition(r, s).map_err(err)?;
        expect_eq(&format!("character at ({r},{s})"), dec, vec![(want, 1)])?;
    }
    Ok(())
}

pub fn check_row2(cx: &Context) -> CheckResultT {
    let co13 = build_co_complex(1, 3).map_err(err)?;
    for rep in [crate::feynman::row2_property_check(&co13), crate::feynman::row2_property_check(&cx.q()?.co)] {
        if !rep.holds {
            return Err(format!("row-two property fails for ({},{})", rep.g, rep.n));
        }
    }
    Ok(())
}

pub fn check_q_dims(cx: &Context) -> CheckResultT {
    let q = cx.q()?;
    expect_eq("dims (Q6, Q5, Q4)", (q.dim(2), q.dim(1), q.dim(0)), (6, 14, 7))?;
    // Every named vector is invariant.
    for (r, vs) in [(2, &q.eta), (1, &q.delta_i), (1, &q.delta_ii), (0, &q.delta)] {
        for (d, v) in vs.iter() {
            if !q.invariants[r].contains(v) {
                return Err(format!("{} vector in degree {} is not S4-invariant", d.name(), r));
            }
        }
    }
    // The named bases are bases.
    for (r, b) in [(2, q.q6_basis()), (1, q.q5_basis()), (0, q.q4_basis())] {
        let span = Subspace::span(b[0].len(), &b);
        expect_eq(&format!("rank of named basis in degree {r}"), span.dim(), q.dim(r))?;
    }
    // d∘d = 0 on Q.
    let d2 = q.co.complex.differential(2, S);
    let d1 = q.co.complex.differential(1, S);
    for x in ETA_ROWS {
        let v = d1.mul_vec(&d2.mul_vec(&q.eta[&x]).map_err(err)?).map_err(err)?;
        if !is_zero_vec(&v) {
            return Err(format!("d(d(eta)) != 0 for {}", x.name()));
        }
    }
    Ok(())
}

pub fn check_q_relations(cx: &Context) -> CheckResultT {
    let q = cx.q()?;
    for d in [Delta::D22, Delta::Alpha, Delta::Beta] {
        if !is_zero_vec(&q.eta[&d]) {
            return Err(format!("eta for {} is nonzero: {}", d.name(), fmt_vec(&q.eta[&d])));
        }
    }
    for d in [Delta::D22, Delta::Alpha, Delta::Beta] {
        if q.delta_i[&d] != q.delta_ii[&d] {
            return Err(format!("{}^I != {}^II", d.name(), d.name()));
        }
    }
    let combo = |vs: &BTreeMap<Delta, Vec<Rational>>, terms: &[(Delta, i64)]| {
        let mut acc = zeros(vs[&Delta::D22].len());
        for &(d, k) in terms {
            add_into(&mut acc, &vs[&d], &int(k));
        }
        acc
    };
    let wdvv = [(Delta::D02, 1), (Delta::D03, 3), (Delta::D04, 6), (Delta::Alpha, -3), (Delta::Beta, -4)];
    let r = combo(&q.delta_ii, &wdvv);
    if !is_zero_vec(&r) {
        return Err(format!("relation 2(b) residue {}", fmt_vec(&r)));
    }
    let r = combo(&q.delta, &wdvv);
    if !is_zero_vec(&r) {
        return Err(format!("relation 3(a) residue {}", fmt_vec(&r)));
    }
    let getzler: Vec<(Delta, i64)> = Delta::ALL.iter().map(|&d| (d, d.getzler_coefficient())).collect();
    let r = combo(&q.delta, &getzler);
    if !is_zero_vec(&r) {
        return Err(format!("relation 3(b) residue {}", fmt_vec(&r)));
    }
    // Completeness: the listed relations account for the whole kernel.
    let rank = |vs: Vec<Vec<Rational>>| Subspace::span(vs[0].len(), &vs).dim();
    expect_eq("rank of the nine eta", rank(q.eta.values().cloned().collect()), 9 - 3)?;
    let eighteen: Vec<Vec<Rational>> = q.delta_i.values().chain(q.delta_ii.values()).cloned().collect();
    expect_eq("rank of the eighteen delta^I, delta^II", rank(eighteen), 18 - 4)?;
    expect_eq("rank of the nine delta", rank(q.delta.values().cloned().collect()), 9 - 2)
}

pub fn check_q6_table(cx: &Context) -> CheckResultT {
    let (t1, _) = cx.tables()?;
    compare("Q6 -> Q5", &t1, &golden_matrices().0)
}

pub fn check_q5_table(cx: &Context) -> CheckResultT {
    let (_, t2) = cx.tables()?;
    compare("(Q5 -> Q4)^T", &t2, &golden_matrices().1)
}

pub fn check_summands(cx: &Context) -> CheckResultT {
    let q = cx.q()?;
    let co = &q.co;
    let gens = &co.generators[&(1, S)];
    let kind: Vec<Option<OneEdge>> = gens.iter().map(|g| OneEdge::identify(&co.block(1, g.block).graph)).collect();
    for (summand, range) in SUMMANDS {
        let restrict = |v: &Vec<Rational>| -> Vec<Rational> {
            v.iter().zip(&kind).map(|(x, k)| if *k == Some(summand) { x.clone() } else { Rational::zero() }).collect()
        };
        for (i, &h) in LAMBDA.iter().enumerate() {
            let v = q.heading(h);
            let inside = restrict(v) == *v;
            if inside != range.contains(&i) {
                return Err(format!("{} misplaced relative to summand {}", heading_name(h), summand.name()));
            }
        }
        let part: Vec<Vec<Rational>> = q.invariants[1].basis().iter().map(restrict).collect();
        let dim = Subspace::span(part[0].len(), &part).dim();
        let heads: Vec<Vec<Rational>> = range.clone().map(|i| q.heading(LAMBDA[i]).clone()).collect();
        let rank = Subspace::span(heads[0].len(), &heads).dim();
        expect_eq(&format!("summand {} dim/rank", summand.name()), (dim, rank), (range.len(), range.len()))?;
    }
    Ok(())
}

pub fn check_lambda_basis(cx: &Context) -> CheckResultT {
    let q = cx.q()?;
    let (t1, t2) = cx.tables()?;
    let l4 = q.dual_functionals(0).map_err(err)?;
    let l5 = q.dual_functionals(1).map_err(err)?;
    let l6 = q.dual_functionals(2).map_err(err)?;
    let d2 = q.co.complex.differential(2, S);
    let d1 = q.co.complex.differential(1, S);
    // d_FT(λ_i) = λ_i ∘ d must equal Σ_x T1[x][i] η_x^*.
    let dl = l5.mul(&d2).map_err(err)?;
    let want = t1.transpose().mul(&l6).map_err(err)?;
    if dl != want {
        return Err("d_FT on lambda differs from the first table".into());
    }
    let dd = l4.mul(&d1).map_err(err)?;
    let want = t2.mul(&l5).map_err(err)?;
    if dd != want {
        return Err("d_FT on delta* differs from the second table".into());
    }
    if !dd.mul(&d2).map_err(err)?.is_zero() {
        return Err("d_FT o d_FT != 0".into());
    }
    Ok(())
}

pub fn check_normlem(cx: &Context) -> CheckResultT {
    let (t1, t2) = cx.tables()?;
    // ε = Σ r_i λ_i is a cycle iff T1 r = 0.
    let cycles = Subspace::span(14, &t1.nullspace_basis());
    let mut cond_rows = Vec::new();
    for &(a, b) in &CYCLE_CONDITIONS {
        let mut v = zeros(14);
        v[a - 1] = int(1);
        v[b - 1] = int(-1);
        cond_rows.push(v);
    }
    let stated = Subspace::span(14, &QMatrix::from_rows(14, cond_rows.clone()).map_err(err)?.nullspace_basis());
    if !(cycles.contains_all(&stated) && stated.contains_all(&cycles)) {
        return Err("cycle conditions do not describe ker d".into());
    }
    // Boundaries: rows of T2.
    let rows: Vec<Vec<Rational>> = t2.rows_iter().cloned().collect();
    let boundaries = Subspace::span(14, &rows);
    let norm: Vec<Rational> = NORM.iter().map(|&k| int(k)).collect();
    let mut with_norm = t1.rows_iter().cloned().collect::<Vec<_>>();
    with_norm.push(norm.clone());
    let target = Subspace::span(14, &QMatrix::from_rows(14, with_norm).map_err(err)?.nullspace_basis());
    if !(boundaries.contains_all(&target) && target.contains_all(&boundaries)) {
        return Err("image d != ker d ∩ ker |.|".into());
    }
    expect_eq("coinvariant homology at (-1,-4)", cycles.dim() - boundaries.dim(), 1)?;
    for (k, row) in rows.iter().enumerate() {
        if !norm_functional(row).is_zero() {
            return Err(format!("|d_FT({}^*)| != 0", Q4_ROWS[k].name()));
        }
    }
    // Preimage formula on a basis of the boundaries.
    for r in target.basis() {
        let a = preimage(r);
        let img = t2.transpose().mul_vec(&a).map_err(err)?;
        if img != *r {
            return Err(format!("preimage formula fails on {}", fmt_vec(r)));
        }
    }
    // On cycles, f̄^ω(ε) = |ε| ω.
    for r in cycles.basis() {
        let f = pair(r, &cx.params.t);
        let n = norm_functional(r);
        if f != n {
            return Err(format!("cycle {}: f(eps) = {f}, |eps| = {n}", fmt_vec(r)));
        }
    }
    // λ_1 + λ_5 generates homology; ω is normalized by ε_0 = −(λ_1 + λ_5)/6.
    let mut eps = zeros(14);
    eps[0] = int(1);
    eps[4] = int(1);
    if !cycles.contains(&eps) || boundaries.contains(&eps) {
        return Err("lambda_1 + lambda_5 is not a non-boundary cycle".into());
    }
    expect_eq("|lambda_1 + lambda_5|", norm_functional(&eps), ParamScalar::ew(int(-6), int(0)))?;
    let eps0: Vec<Rational> = eps.iter().map(|x| x * rat(-1, 6)).collect();
    expect_eq("f(eps_0)", pair(&eps0, &cx.params.t), ParamScalar::e())
}

pub fn check_massey_table(cx: &Context) -> CheckResultT {
    for (d, c) in &cx.params.massey {
        if !c.c0.is_zero() || !c.cw2.is_zero() {
            return Err(format!("c for {} is not linear in (e, w): {c}", d.name()));
        }
    }
    let at = |d: Delta| cx.params.massey[&d].eval(&int(1), &int(0), &int(0));
    expect_eq("c_02 at (e,w) = (1,0)", at(Delta::D02), int(0))?;
    // The coefficients of e are proportional to the elliptic relation.
    let k = &cx.params.massey[&Delta::D22].ce / int(12);
    if k.is_zero() {
        return Err("e-part of c vanishes".into());
    }
    for d in Delta::ALL {
        let want = &k * int(d.getzler_coefficient());
        expect_eq(&format!("e-part of c for {}", d.name()), cx.params.massey[&d].ce.clone(), want)?;
    }
    Ok(())
}

pub fn check_corolla(cx: &Context) -> CheckResultT {
    let (_, t2) = cx.tables()?;
    for (k, row) in t2.rows_iter().enumerate() {
        let v = pair(row, &cx.params.t);
        if !v.is_zero() {
            return Err(format!("f(d_FT({}^*)) = {v}", Q4_ROWS[k].name()));
        }
    }
    Ok(())
}

pub fn check_rho_identity(_: &Context) -> CheckResultT {
    let c = rho_relation().map_err(err)?;
    // ρ_5^2 = 4ρ_1 + 2ρ_2 + (2/3)ρ_3 − (4/3)ρ_4 − ρ_5^1
    let want = vec![int(4), int(2), rat(2, 3), rat(-4, 3), int(-1)];
    expect_eq("rho_5^2 in the rho basis", c, want)?;
    // The five vectors span the S4-invariants.
    let pres = presentation(0, 6, 4).map_err(err)?;
    let gens: Vec<Perm> = [(0, 1), (1, 2), (2, 3)].iter().map(|&(a, b)| symmetric::transposition(6, a, b)).collect();
    expect_eq("dim H_4(M_0,6)^S4", pres.invariant_subspace(&gens).len(), 5)
}

/// Expected `d̂(λ_i)`, `i = 11 … 14`, on `ξ_1 … ξ_5`.
pub fn dhat_expected() -> Vec<Vec<Rational>> {
    let z = || int(0);
    vec![
        vec![int(1), z(), z(), z(), int(4)],
        vec![z(), int(1), z(), z(), int(2)],
        vec![z(), z(), int(1), z(), rat(2, 3)],
        vec![z(), z(), z(), int(2), rat(-8, 3)],
    ]
}

pub fn check_dhat(_: &Context) -> CheckResultT {
    // Fifteen (graph, distinguished edge) pairs index the one-edge space.
    let mut keys = BTreeSet::new();
    for d in Delta::ALL {
        for e in [Edge::I, Edge::II] {
            keys.insert(marked_edge_key(&d.template(), &[e.index()], false));
        }
    }
    expect_eq("dimension of the one-edge source", keys.len(), 15)?;
    let ten = &LAMBDA[..10];
    let distinct: BTreeSet<_> = ten.iter().map(|&(d, e)| marked_edge_key(&d.template(), &[e.index()], false)).collect();
    expect_eq("distinct Lambda_1..10", distinct.len(), 10)?;
    let rows = dhat_d_rows().map_err(err)?;
    for (k, (got, want)) in rows.iter().zip(dhat_expected()).enumerate() {
        if *got != want {
            return Err(format!("dhat(lambda_{}) = {} on xi, expected {}", 11 + k, fmt_vec(got), fmt_vec(&want)));
        }
    }
    Ok(())
}

/// `f̄` on the one-edge basis: `Λ_i ↦ −t_i`, `ξ_j ↦ c_j`.
fn f_bar_lambda(p: &Params, i: usize) -> ParamScalar {
    -p.t[i].clone()
}

pub fn check_one_edge(cx: &Context) -> CheckResultT {
    let p = &cx.params;
    let rows = dhat_d_rows().map_err(err)?;
    for i in 0..14 {
        let f = if i < 10 { f_bar_lambda(p, i) } else { pair(&rows[i - 10], &p.f_d) };
        let total = f + p.t[i].clone();
        if !total.is_zero() {
            return Err(format!("one-edge condition for lambda_{}: residue {total}", i + 1));
        }
    }
    Ok(())
}

/// What `ν_X` produces for edge `X` of a two-edge graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NuImage {
    Lambda(usize),
    Xi(usize),
}

impl std::fmt::Display for NuImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NuImage::Lambda(i) => write!(f, "Lambda_{}", i + 1),
            NuImage::Xi(j) => write!(f, "xi_{}", j + 1),
        }
    }
}

pub fn nu_image(d: Delta, e: Edge) -> Result<NuImage, VerifyError> {
    let t = d.template();
    let key = marked_edge_key(&t, &[e.index()], false);
    let quotient = t.contract_edge(e.index())?.graph;
    if OneEdge::identify(&quotient) == Some(OneEdge::D) {
        XI.iter()
            .position(|&(x, xe)| marked_edge_key(&x.template(), &[xe.index()], false) == key)
            .map(NuImage::Xi)
            .ok_or_else(|| VerifyError::Mismatch(format!("no xi for {}^{}", d.name(), e.name())))
    } else {
        LAMBDA[..10]
            .iter()
            .position(|&(x, xe)| marked_edge_key(&x.template(), &[xe.index()], false) == key)
            .map(NuImage::Lambda)
            .ok_or_else(|| VerifyError::Mismatch(format!("no Lambda for {}^{}", d.name(), e.name())))
    }
}

/// One row of the two-edge table.
#[derive(Clone, Debug)]
pub struct TwoEdgeRow {
    pub delta: Delta,
    pub coefficient: ParamScalar,
    pub nu: [(NuImage, ParamScalar); 2],
}

pub fn two_edge_table(p: &Params) -> Result<Vec<TwoEdgeRow>, VerifyError> {
    let f = |n: &NuImage| match n {
        NuImage::Lambda(i) => f_bar_lambda(p, *i),
        NuImage::Xi(j) => p.f_d[*j].clone(),
    };
    let mut out = Vec::new();
    for d in Delta::ALL {
        let a = nu_image(d, Edge::I)?;
        let b = nu_image(d, Edge::II)?;
        let (fa, fb) = (f(&a), f(&b));
        out.push(TwoEdgeRow { delta: d, coefficient: p.massey[&d].clone(), nu: [(a, fa), (b, fb)] });
    }
    Ok(out)
}

pub fn check_two_edge(cx: &Context) -> CheckResultT {
    let rows = two_edge_table(&cx.params).map_err(err)?;
    let expected: [(Delta, NuImage, NuImage); 9] = [
        (Delta::D22, NuImage::Lambda(9), NuImage::Lambda(9)),
        (Delta::D23, NuImage::Lambda(8), NuImage::Lambda(5)),
        (Delta::D34, NuImage::Lambda(4), NuImage::Lambda(0)),
        (Delta::D24, NuImage::Lambda(6), NuImage::Lambda(1)),
        (Delta::D04, NuImage::Lambda(2), NuImage::Xi(0)),
        (Delta::D03, NuImage::Lambda(3), NuImage::Xi(1)),
        (Delta::D02, NuImage::Lambda(7), NuImage::Xi(2)),
        (Delta::Alpha, NuImage::Xi(4), NuImage::Xi(4)),
        (Delta::Beta, NuImage::Xi(3), NuImage::Xi(3)),
    ];
    for row in &rows {
        let (_, a, b) = expected.iter().find(|x| x.0 == row.delta).expect("all nine rows");
        if row.nu[0].0 != *a || row.nu[1].0 != *b {
            return Err(format!("{}: nu gives {}, {}; expected {a}, {b}", row.delta.name(), row.nu[0].0, row.nu[1].0));
        }
        let sum = row.nu[0].1.clone() + row.nu[1].1.clone();
        if sum != row.coefficient {
            return Err(format!("row {}: {} + {} != {}", row.delta.name(), row.nu[0].1, row.nu[1].1, row.coefficient));
        }
    }
    Ok(())
}

pub fn check_gravity(_: &Context) -> CheckResultT {
    let gs = GravitySpace::build();
    expect_eq("number of relations", gs.relations.len(), 16)?;
    expect_eq("dim H_1(M_0,6)", gs.dim(), 9)?;
    // The relation span is stable under permutations of 1..5.
    let rel = Subspace::span(25, &gs.relations);
    for p in symmetric::all_perms(5) {
        let sigma: Perm = p.iter().copied().chain([5]).collect();
        for r in &gs.relations {
            let mut moved = zeros(25);
            for (k, x) in r.iter().enumerate() {
                if !x.is_zero() {
                    moved[gs.index(gs.symbols[k].act(&sigma))] += x;
                }
            }
            if !rel.contains(&moved) {
                return Err("relations are not S5-stable".into());
            }
        }
    }
    // Same dimension as the homology of the (0,6) complex in that degree.
    let h = build_co_complex(0, 6).map_err(err)?.complex.homology_dims().map_err(err)?;
    expect_eq("FT(0,6) homology at (1,4)", h.get(&(1, 4)).copied(), Some(9))?;
    // (56) on trees.
    for i in 1..=4 {
        expect_eq("(56)Y_i5", TreeSymbol::Y(i, 5).act(&SWAP56), TreeSymbol::Z(i))?;
        expect_eq("(56)X_i5", TreeSymbol::X(i, 5).act(&SWAP56), TreeSymbol::X(i, 5))?;
        for j in i + 1..=4 {
            let o: Vec<usize> = (1..=4).filter(|&x| x != i && x != j).collect();
            expect_eq("(56)X_ij", TreeSymbol::X(i, j).act(&SWAP56), TreeSymbol::X(o[0], o[1]))?;
            expect_eq("(56)Y_ij", TreeSymbol::Y(i, j).act(&SWAP56), TreeSymbol::Y(i, j))?;
        }
    }
    expect_eq("(56)Z_5", TreeSymbol::Z(5).act(&SWAP56), TreeSymbol::Z(5))
}

pub fn check_g_d(cx: &Context) -> CheckResultT {
    let gs = GravitySpace::build();
    let vals: Vec<ParamScalar> = gs.symbols.iter().map(|&s| g_d(&cx.params, s)).collect();
    for (k, r) in gs.relations.iter().enumerate() {
        let v = pair(r, &vals);
        if !v.is_zero() {
            return Err(format!("relation {} maps to {v}", k + 1));
        }
    }
    let mut group: Vec<Perm> = symmetric::all_perms(4).into_iter().map(|p| p.into_iter().chain([4, 5]).collect()).collect();
    group.push(SWAP56.to_vec());
    for s in &gs.symbols {
        for sigma in &group {
            let t = s.act(sigma);
            if g_d(&cx.params, t) != g_d(&cx.params, *s) {
                return Err(format!("g_D({}) != g_D({})", t.name(), s.name()));
            }
        }
        if !g_d(&cx.params, *s).identify_w2_with_w().is_zero() {
            return Err(format!("g_D({}) survives w = w'", s.name()));
        }
    }
    Ok(())
}

pub fn check_g_two_edge(cx: &Context) -> CheckResultT {
    use TreeSymbol::*;
    let class = |s: TreeSymbol| s.coinvariant();
    // Symbols as printed, one per nest.
    let printed: BTreeMap<Delta, Vec<TreeSymbol>> = BTreeMap::from([
        (Delta::D02, vec![Y(1, 2)]),
        (Delta::D03, vec![X(1, 5)]),
        (Delta::D04, vec![Z(5)]),
        (Delta::Alpha, vec![Y(1, 5), Z(1)]),
        (Delta::Beta, vec![X(1, 2), X(3, 4)]),
    ]);
    for d in Delta::ALL {
        let syms = mu_symbols(&d.template()).map_err(err)?;
        let want = printed.get(&d).cloned().unwrap_or_default();
        // Compare up to S4 relabeling and (56).
        let kinds = |v: &[TreeSymbol]| {
            let mut k: Vec<TreeKind> = v.iter().map(|&s| TreeKind::of(class(s))).collect();
            k.sort();
            k
        };
        expect_eq(&format!("mu_N for {}", d.name()), kinds(&syms), kinds(&want))?;
        let c = &cx.params.massey[&d];
        let lhs = c.clone() - at_w_prime(c);
        let mut rhs = ParamScalar::zero();
        for s in &syms {
            rhs += &g_d(&cx.params, *s);
        }
        if lhs != rhs {
            return Err(format!("{}: c(e,w) - c(e,w') = {lhs}, sum of g_D = {rhs}", d.name()));
        }
    }
    Ok(())
}

pub fn check_omega_rescaling(cx: &Context) -> CheckResultT {
    for k in [int(3), rat(-2, 5)] {
        let scaled = cx.with_params(cx.params.rescaled(&k));
        for (name, f) in [
            ("massey_table", check_massey_table as fn(&Context) -> CheckResultT),
            ("corolla", check_corolla),
            ("one_edge", check_one_edge),
            ("two_edge", check_two_edge),
            ("g_d", check_g_d),
            ("g_two_edge", check_g_two_edge),
        ] {
            f(&scaled).map_err(|e| format!("after rescaling by {}: {name}: {e}", fmt_rational(&k)))?;
        }
    }
    Ok(())
}

/// Check names in report order.
pub type CheckFn = fn(&Context) -> CheckResultT;

pub const CHECKS: &[(&str, CheckFn)] = &[
    ("graphs", check_graphs),
    ("strata_dims", check_strata_dims),
    ("complexes", check_complexes),
    ("coinvariant_dims", check_coinvariant_dims),
    ("homology", check_homology),
    ("characters", check_characters),
    ("row2", check_row2),
    ("qcomplex_dims", check_q_dims),
    ("qcomplex_relations", check_q_relations),
    ("q6_q5_table", check_q6_table),
    ("q5_q4_table", check_q5_table),
    ("summands", check_summands),
    ("lambda_basis", check_lambda_basis),
    ("normlem", check_normlem),
    ("massey_table", check_massey_table),
    ("corolla", check_corolla),
    ("rho_identity", check_rho_identity),
    ("dhat_table", check_dhat),
    ("one_edge", check_one_edge),
    ("two_edge", check_two_edge),
    ("gravity", check_gravity),
    ("g_d", check_g_d),
    ("g_two_edge", check_g_two_edge),
    ("omega_rescaling", check_omega_rescaling),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

/// Runs the selected checks (all when `only` is empty) in report order.
pub fn run_checks(cx: &Context, only: &[String]) -> VerificationReport {
    let mut report = VerificationReport::default();
    for (name, f) in CHECKS {
        if only.is_empty() || only.iter().any(|o| o == name) {
            report.push(run_check(name, || f(cx)));
        }
    }
    report
}

/// Every check with the given parameters.
pub fn full_report(params: Params) -> VerificationReport {
    run_checks(&Context::new(params), &[])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_symbols_round_trip() {
        let gs = GravitySpace::build();
        assert_eq!(gs.symbols.len(), 25);
        for &s in &gs.symbols {
            assert_eq!(TreeSymbol::from_root_side(&s.root_side()), s);
            assert_eq!(s.act(&SWAP56).act(&SWAP56), s);
        }
        assert_eq!(TreeSymbol::Y(2, 5).coinvariant(), TreeSymbol::Z(2).coinvariant());
    }

    #[test]
    fn norm_and_preimage_agree_on_examples() {
        // r = d_FT(δ22*) has r_10 = 2 and nothing else among the preimage slots.
        let mut r = zeros(14);
        r[9] = int(2);
        assert_eq!(preimage(&r)[0], int(1));
        let mut eps = zeros(14);
        eps[0] = int(1);
        eps[4] = int(1);
        assert_eq!(norm_functional(&eps), ParamScalar::ew(int(-6), int(0)));
    }

    #[test]
    fn rescaling_keeps_ratios() {
        let p = Params::default();
        let q = p.rescaled(&int(2));
        assert_eq!(q.t[0], p.t[0].scale(&int(2)));
        assert_eq!(q.g_d[4], p.g_d[4].scale(&int(2)));
    }

    #[test]
    fn nu_images_cover_fifteen_pairs() {
        let mut seen = BTreeSet::new();
        for d in Delta::ALL {
            for e in [Edge::I, Edge::II] {
                seen.insert(nu_image(d, e).unwrap().to_string());
            }
        }
        assert_eq!(seen.len(), 15);
    }

    #[test]
    fn gravity_and_g_d_without_the_q_complex() {
        let cx = Context::new(Params::default());
        check_gravity(&cx).unwrap();
        check_g_d(&cx).unwrap();
        check_rho_identity(&cx).unwrap();
    }

    #[test]
    fn mutated_scalars_fail() {
        let cx = Context::new(Params::default());
        let mut p = Params::default();
        p.massey.insert(Delta::D22, pe(11, 0));
        let m = cx.with_params(p);
        assert!(check_two_edge(&m).is_err());

        let mut p = Params::default();
        p.g_d[0] = p.g_d[0].scale(&int(2));
        assert!(check_g_d(&cx.with_params(p)).is_err());
    }
}
