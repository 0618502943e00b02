mod common;

use domainminer::dte::counts;
use domainminer::oracle;
use domainminer::reductions::{
    db_to_dtepm, gadget, is_three_colorable, three_color_to_db, three_color_to_dbpm, three_coloring, DbpmLayout,
    UndirectedGraph,
};
use domainminer::summary::indistinguishable;
use domainminer::{Cell, Digraph, PartialMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn path3() -> UndirectedGraph {
    UndirectedGraph::new(3, [(0, 1), (1, 2)]).unwrap()
}

#[test]
fn dbpm_instance_shape() {
    for h in [UndirectedGraph::new(1, []).unwrap(), path3(), UndirectedGraph::complete(4)] {
        let (m, psm) = three_color_to_dbpm(&h).unwrap();
        let (v, e) = (h.vertex_count(), h.edges().len());
        assert_eq!(m, 3 * v);
        assert_eq!(psm.n(), 4 * v + 3 * e);
        assert_eq!(psm.k(), v + e);
    }
}

#[test]
fn dbpm_specified_cells_follow_the_construction() {
    let h = path3();
    let (_, psm) = three_color_to_dbpm(&h).unwrap();
    let lay = DbpmLayout { vertices: 3, edges: 2 };
    // count ones: 3 per vertex (x), 1 per vertex (y), 3 per edge (z)
    let ones = psm.cells().iter().filter(|&&c| c == Cell::One).count();
    assert_eq!(ones, 3 * 3 + 3 + 3 * 2);
    assert_eq!(psm.get(lay.z(1, 0), lay.b(1), lay.z(1, 0)), Cell::One);
    assert_eq!(psm.get(lay.z(1, 0), lay.a(0), lay.z(1, 0)), Cell::Zero);
    assert_eq!(psm.get(lay.z(1, 0), lay.a(1), lay.z(1, 0)), Cell::Star);
    assert_eq!(psm.get(lay.z(1, 0), lay.a(2), lay.x(2, 1)), Cell::Zero);
    assert_eq!(psm.get(lay.x(2, 1), lay.a(2), lay.z(1, 0)), Cell::Zero);
    assert_eq!(psm.get(lay.z(1, 0), lay.a(2), lay.x(2, 0)), Cell::Star);
    assert_eq!(psm.get(lay.y(0), lay.b(0), lay.y(0)), Cell::Zero);
    assert_eq!(psm.get(lay.y(2), lay.b(0), lay.y(2)), Cell::Star);
}

/// Colour-option entities stay pairwise distinguishable in every fill.
#[test]
fn colour_options_never_merge() {
    let h = UndirectedGraph::new(2, [(0, 1)]).unwrap();
    let (_, psm) = three_color_to_dbpm(&h).unwrap();
    let xs: Vec<usize> = (0..6).collect();
    let stars: Vec<_> = psm.stars().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for trial in 0..2000 {
        let fill: Vec<bool> = stars.iter().map(|_| rng.gen_bool(if trial % 2 == 0 { 0.5 } else { 0.1 })).collect();
        let g = psm.instantiate(&fill).unwrap();
        for &u in &xs {
            for &v in &xs {
                if u != v {
                    assert!(!indistinguishable(&g, u, v));
                }
            }
        }
    }
    // no fill of the x block collapses it below six classes
    let mut sub = PartialMatrix::filled(6, psm.k(), Cell::Zero).unwrap();
    for u in 0..6 {
        for a in 0..psm.k() {
            for v in 0..6 {
                sub.set(u, a, v, psm.get(u, a, v));
            }
        }
    }
    assert!(!oracle::dbpm_feasible(&sub, 5));
    assert!(oracle::dbpm_feasible(&sub, 6));
}

#[test]
fn db_instance_shape() {
    let h = path3();
    let (m, psm) = three_color_to_db(&h).unwrap();
    assert_eq!(m, 3);
    let n = 3 + 3 + 3 * 2;
    assert_eq!((psm.n(), psm.k()), (n, 1));
    for row in 0..n {
        for col in 6..n {
            assert_eq!(psm.get(row, 0, col), Cell::Zero);
        }
    }
    // second edge (1, 2): rows 9, 10, 11 at vertex columns 4 and 5
    let pats: Vec<(Cell, Cell)> = (9..12).map(|r| (psm.get(r, 0, 4), psm.get(r, 0, 5))).collect();
    assert_eq!(pats, vec![(Cell::One, Cell::Zero), (Cell::Zero, Cell::One), (Cell::Zero, Cell::Zero)]);
    assert_eq!(psm.get(9, 0, 3), Cell::Star);
}

#[test]
fn db_decider_tracks_colourability() {
    for h in [path3(), UndirectedGraph::complete(3), UndirectedGraph::complete(4), UndirectedGraph::petersen()] {
        let (m, psm) = three_color_to_db(&h).unwrap();
        assert_eq!(oracle::db_feasible(&psm, m), is_three_colorable(&h).unwrap());
    }
}

#[test]
fn coloring_is_proper() {
    let h = UndirectedGraph::petersen();
    let c = three_coloring(&h).unwrap().unwrap();
    assert!(h.edges().iter().all(|&(u, v)| c[u] != c[v]));
    // chromatic number is exactly 3: the outer 5-cycle is odd
    let cycle = UndirectedGraph::new(5, (0..5).map(|i| (i, (i + 1) % 5))).unwrap();
    assert!(is_three_colorable(&cycle).unwrap());
}

#[test]
fn gadget_counts() {
    for n in 1..=8 {
        let rows = gadget(n);
        let g = Digraph::from_edges(
            2 * n + 1,
            1,
            rows.iter().enumerate().flat_map(|(i, r)| r.iter().enumerate().filter(|(_, &b)| b).map(move |(j, _)| (i, 0, j))),
        )
        .unwrap();
        assert_eq!(common::dedup_rows_cols(&g), (2 * n + 1, n + 1));
    }
}

#[test]
fn dtepm_embedding_shifts_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let n = rng.gen_range(1..=6);
        let g = common::random_digraph(&mut rng, n, 1, 0.5);
        let (_, big) = db_to_dtepm(0, &PartialMatrix::from_digraph(&g)).unwrap();
        assert_eq!(big.n(), 3 * n + 1);
        let gg = big.to_digraph().unwrap();
        let (r, c) = common::dedup_rows_cols(&g);
        let (r2, c2) = common::dedup_rows_cols(&gg);
        assert_eq!((r2, c2), (r + 2 * n + 1, c + n + 1));
        let cnt = counts(&gg);
        assert_eq!((cnt.rows, cnt.cols), (r2, c2));
        assert!(cnt.rows > cnt.cols);
    }
}

#[test]
fn db_and_dtepm_answers_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..60 {
        let n = rng.gen_range(1..=3);
        let psm = common::random_psm(&mut rng, n, 1, 5);
        let (shift, big) = db_to_dtepm(0, &psm).unwrap();
        let db = oracle::db_optimum(&psm).unwrap();
        let dtepm = oracle::dtepm_optimum(&big).unwrap();
        assert_eq!(dtepm, db + shift);
        for m in 1..=n {
            let (m2, _) = db_to_dtepm(m, &psm).unwrap();
            assert_eq!(db <= m, dtepm <= m2);
        }
    }
}
