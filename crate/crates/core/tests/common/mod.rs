//! Strategies shared by the property suites and the acceptance run.
#![allow(dead_code)]

use obstruct_core::linalg::IntMatrix;
use obstruct_core::plumbing::WeightedForest;
use proptest::prelude::*;
use proptest::sample::Index;

pub fn odd(lo: i64, hi: i64) -> impl Strategy<Value = i64> + Clone {
    (lo / 2..=hi / 2).prop_map(|k| 2 * k + 1)
}

pub fn matrix(max: usize, entry: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max, 1..=max).prop_flat_map(move |(r, c)| {
        prop::collection::vec(-entry..=entry, r * c)
            .prop_map(move |data| IntMatrix::new(r, c, data).unwrap())
    })
}

/// Incidence matrix of a random tree with weights in `[−w, −1]`, kept to
/// determinants that fit in `i64`.
pub fn plumbing(max: usize, w: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max)
        .prop_flat_map(move |n| {
            (
                prop::collection::vec(any::<Index>(), n - 1),
                prop::collection::vec(-w..=-1, n),
            )
                .prop_map(move |(parents, weights)| {
                    let mut m = IntMatrix::diagonal(&weights);
                    for (i, ix) in parents.iter().enumerate() {
                        let (a, b) = (ix.index(i + 1), i + 1);
                        m[(a, b)] = 1;
                        m[(b, a)] = 1;
                    }
                    m
                })
        })
        .prop_filter("determinant fits i64", |m| m.det().is_ok())
}

pub fn minus_two_path(n: usize) -> IntMatrix {
    let mut m = IntMatrix::diagonal(&vec![-2; n]);
    for i in 0..n - 1 {
        m[(i, i + 1)] = 1;
        m[(i + 1, i)] = 1;
    }
    m
}

/// A tree whose weights satisfy `w ≤ −valence`, strictly at the root, so the
/// incidence matrix is negative definite.
pub fn definite_tree(max: usize) -> impl Strategy<Value = WeightedForest> {
    (1..=max).prop_flat_map(|n| {
        (
            prop::collection::vec(any::<Index>(), n - 1),
            prop::collection::vec(0i64..=1, n),
            1i64..=2,
        )
            .prop_map(move |(parents, extra, root_extra)| {
                let edges: Vec<(usize, usize)> = parents
                    .iter()
                    .enumerate()
                    .map(|(i, ix)| (ix.index(i + 1), i + 1))
                    .collect();
                let mut valence = vec![0i64; n];
                for &(a, b) in &edges {
                    valence[a] += 1;
                    valence[b] += 1;
                }
                let weights = (0..n)
                    .map(|v| -valence[v] - if v == 0 { root_extra } else { extra[v] })
                    .collect();
                WeightedForest::new(weights, edges).unwrap()
            })
    })
}

pub fn odd_det(f: &WeightedForest) -> bool {
    f.incidence_matrix().det().unwrap() % 2 != 0
}

#[derive(Debug, Clone)]
pub enum BlowUp {
    Edge(Index),
    Leaf(Index),
    Isolated,
}

pub fn blow_up(f: &WeightedForest, how: &BlowUp) -> WeightedForest {
    let mut weights = f.weights().to_vec();
    let mut edges = f.edges().to_vec();
    let e = weights.len();
    weights.push(-1);
    match how {
        BlowUp::Edge(ix) if !edges.is_empty() => {
            let (a, b) = edges.remove(ix.index(edges.len()));
            weights[a] -= 1;
            weights[b] -= 1;
            edges.extend([(a, e), (e, b)]);
        }
        BlowUp::Edge(ix) | BlowUp::Leaf(ix) => {
            let u = ix.index(e);
            weights[u] -= 1;
            edges.push((u, e));
        }
        BlowUp::Isolated => {}
    }
    WeightedForest::new(weights, edges).unwrap()
}

pub fn blow_up_strategy() -> impl Strategy<Value = BlowUp> {
    prop_oneof![
        any::<Index>().prop_map(BlowUp::Edge),
        any::<Index>().prop_map(BlowUp::Leaf),
        Just(BlowUp::Isolated),
    ]
}
