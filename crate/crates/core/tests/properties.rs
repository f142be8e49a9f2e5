//! Property tests for the graph, linear-algebra and symmetry layers.

use std::sync::OnceLock;

use proptest::prelude::*;

use ftmbar::exactq::{int, ParamScalar, QMatrix, Rational, Subspace};
use ftmbar::feynman::{build_co_complex, CoComplex};
use ftmbar::modgraph::{canonicalize, enumerate_stable, marked_edge_key, ModularGraph};
use ftmbar::strata::presentation;
use ftmbar::symmetric;

fn graphs_14() -> &'static Vec<ModularGraph> {
    static G: OnceLock<Vec<ModularGraph>> = OnceLock::new();
    G.get_or_init(|| (0..=3).flat_map(|r| enumerate_stable(1, 4, r, true)).collect())
}

fn co_13() -> &'static CoComplex {
    static C: OnceLock<CoComplex> = OnceLock::new();
    C.get_or_init(|| build_co_complex(1, 3).unwrap())
}

fn shuffle(n: usize, seed: u64) -> Vec<usize> {
    let perms = symmetric::all_perms(n);
    perms[(seed as usize) % perms.len()].clone()
}

/// Same graph with vertices, edges and half-edge orientations scrambled.
fn scramble(g: &ModularGraph, seed: u64) -> ModularGraph {
    let vp = shuffle(g.num_vertices(), seed);
    let ep = shuffle(g.num_edges(), seed / 7);
    let mut genus = vec![0; g.num_vertices()];
    for v in 0..g.num_vertices() {
        genus[vp[v]] = g.genus_of(v);
    }
    let mut edges = vec![(0, 0); g.num_edges()];
    for (k, &(a, b)) in g.edges().iter().enumerate() {
        let (a, b) = (vp[a], vp[b]);
        edges[ep[k]] = if (seed >> k) & 1 == 1 { (b, a) } else { (a, b) };
    }
    let legs = g.legs().iter().map(|&v| vp[v]).collect();
    ModularGraph::new(genus, edges, legs).unwrap()
}

fn small_matrix() -> impl Strategy<Value = QMatrix> {
    (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(-3i64..4, c), r).prop_map(move |rows| {
            QMatrix::from_rows(c, rows.into_iter().map(|row| row.into_iter().map(int).collect()).collect()).unwrap()
        })
    })
}

fn param() -> impl Strategy<Value = ParamScalar> {
    (-5i64..6, -5i64..6, -5i64..6, -5i64..6).prop_map(|(a, b, c, d)| ParamScalar::new(int(a), int(b), int(c), int(d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_ignores_presentation(i in 0usize..1000, seed in any::<u64>()) {
        let gs = graphs_14();
        let g = &gs[i % gs.len()];
        let h = scramble(g, seed);
        prop_assert_eq!(canonicalize(&h, true).graph, canonicalize(g, true).graph);
        let cf = canonicalize(&h, true);
        prop_assert!(cf.iso.is_isomorphism(&h, &cf.graph));
    }

    #[test]
    fn leg_relabeling_round_trips(i in 0usize..1000, seed in any::<u64>()) {
        let gs = graphs_14();
        let g = &gs[i % gs.len()];
        let sigma = shuffle(4, seed);
        let (h, _) = g.relabel_legs(&sigma);
        let (back, _) = h.relabel_legs(&symmetric::inverse(&sigma));
        prop_assert_eq!(canonicalize(&back, true).graph, canonicalize(g, true).graph);
        prop_assert_eq!(canonicalize(&h, false).graph, canonicalize(g, false).graph);
    }

    #[test]
    fn contraction_is_undone_by_some_expansion(i in 0usize..1000, e in 0usize..3) {
        let gs: Vec<&ModularGraph> = graphs_14().iter().filter(|g| g.num_edges() > 0).collect();
        let g = gs[i % gs.len()];
        let e = e % g.num_edges();
        let c = g.contract_edge(e).unwrap().graph;
        let key = marked_edge_key(g, &[e], true);
        prop_assert!(c.expansions(true).iter().any(|(x, k)| marked_edge_key(x, &[*k], true) == key));
    }

    #[test]
    fn row_rank_equals_column_rank(m in small_matrix()) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn rref_keeps_row_space_and_nullspace_is_killed(m in small_matrix()) {
        let (r, pivots) = m.rref();
        let rows: Vec<Vec<Rational>> = m.rows_iter().cloned().collect();
        let reduced: Vec<Vec<Rational>> = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        let a = Subspace::span(m.ncols(), &rows);
        let b = Subspace::span(m.ncols(), &reduced);
        prop_assert!(a.contains_all(&b) && b.contains_all(&a));
        let null = m.nullspace_basis();
        prop_assert_eq!(null.len(), m.ncols() - m.rank());
        for v in &null {
            prop_assert!(m.mul_vec(v).unwrap().iter().all(|x| *x == int(0)));
        }
    }

    #[test]
    fn param_scalars_form_a_vector_space(a in param(), b in param(), k in -4i64..5) {
        prop_assert_eq!(a.clone() + b.clone(), b.clone() + a.clone());
        prop_assert_eq!((a.clone() + b.clone()).scale(&int(k)), a.scale(&int(k)) + b.scale(&int(k)));
        prop_assert!((a.clone() - a.clone()).is_zero());
        prop_assert_eq!(a.swap_w().swap_w(), a);
    }

    #[test]
    fn strata_action_is_a_homomorphism(s in any::<u64>(), t in any::<u64>()) {
        for (g, n, d) in [(0, 5, 2), (1, 3, 2), (1, 3, 4)] {
            let p = presentation(g, n, d).unwrap();
            let (a, b) = (shuffle(n, s), shuffle(n, t));
            let lhs = p.action_matrix(&a).mul(&p.action_matrix(&b)).unwrap();
            prop_assert_eq!(lhs, p.action_matrix(&symmetric::compose(&a, &b)));
        }
    }

    #[test]
    fn contraction_commutes_with_leg_relabeling(seed in any::<u64>()) {
        let co = co_13();
        let sigma = shuffle(3, seed);
        for &(r, s) in co.complex.dims.keys() {
            if r == 0 {
                continue;
            }
            let d = co.complex.differential(r, s);
            let lhs = co.action_matrix(&sigma, r - 1, s).unwrap().mul(&d).unwrap();
            let rhs = d.mul(&co.action_matrix(&sigma, r, s).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs, "bidegree ({}, {})", r, s);
        }
    }
}
