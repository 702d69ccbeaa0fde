//! Weighted plumbing forests and their incidence lattices.
//!
//! The branched double cover `Y(p,q,r)` of an odd pretzel knot bounds the
//! plumbing on a star-shaped tree: a central `-3` vertex with three arms read
//! off from the negative continued fractions of `p/(p-1)`, `q/(q-1)` and
//! `r/(r-1)`. When `q < 0` the `q`-arm starts with a `-1` vertex; blowing it
//! down gives the reduced graph used throughout the obstruction pipeline.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::rational::{self, Rational};
use crate::linalg::{IntMatrix, LinalgError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlumbingError {
    #[error("continued fraction has a zero denominator")]
    DivisionByZero,
    #[error("invalid fraction {num}/{den}")]
    InvalidFraction { num: i64, den: i64 },
    #[error("parameter {0} is even")]
    EvenParameter(i64),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("vertex {0} cannot be blown down")]
    NotBlowDownable(usize),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

type Result<T, E = PlumbingError> = std::result::Result<T, E>;

/// `[x₁, …, xₙ] = x₁ − 1/(x₂ − 1/(⋯ − 1/xₙ))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ContinuedFraction {
    coefficients: Vec<i64>,
}

impl ContinuedFraction {
    pub fn new(coefficients: Vec<i64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(PlumbingError::InvalidGraph(
                "empty continued fraction".into(),
            ));
        }
        Ok(ContinuedFraction { coefficients })
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    pub fn eval(&self) -> Result<Rational> {
        let mut it = self.coefficients.iter().rev();
        let mut value = rational::int(*it.next().expect("nonempty"));
        for &x in it {
            if value.is_zero() {
                return Err(PlumbingError::DivisionByZero);
            }
            value = rational::sub(&rational::int(x), &value.recip())?;
        }
        Ok(value)
    }

    /// The expansion with ceiling quotients: every coefficient after the
    /// first is at least 2, and all are when `num/den > 1`.
    ///
    /// A negative denominator is normalised by negating both terms.
    pub fn expand(num: i64, den: i64) -> Result<Self> {
        let (mut n, mut d) = match den {
            0 => return Err(PlumbingError::InvalidFraction { num, den }),
            d if d < 0 => (-(num as i128), -(d as i128)),
            d => (num as i128, d as i128),
        };
        if num_integer::gcd(n, d) != 1 {
            return Err(PlumbingError::InvalidFraction { num, den });
        }
        let mut coefficients = Vec::new();
        loop {
            let x = num_integer::div_ceil(n, d);
            coefficients.push(i64::try_from(x).map_err(|_| LinalgError::Overflow)?);
            let rem = x * d - n;
            if rem == 0 {
                break;
            }
            (n, d) = (d, rem);
        }
        Ok(ContinuedFraction { coefficients })
    }
}

/// Vertex-weighted simple forest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphFile", into = "GraphFile")]
pub struct WeightedForest {
    weights: Vec<i64>,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

/// On-disk layout: `{"vertices": [w₀, …], "edges": [[i, j], …]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: Vec<i64>,
    pub edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphFile> for WeightedForest {
    type Error = PlumbingError;
    fn try_from(g: GraphFile) -> Result<Self> {
        WeightedForest::new(g.vertices, g.edges.iter().map(|e| (e[0], e[1])).collect())
    }
}

impl From<WeightedForest> for GraphFile {
    fn from(f: WeightedForest) -> Self {
        GraphFile {
            vertices: f.weights,
            edges: f.edges.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

impl WeightedForest {
    /// Rejects self-loops, repeated edges, out-of-range indices and cycles.
    pub fn new(weights: Vec<i64>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = weights.len();
        let mut seen = BTreeSet::new();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &edges {
            if a >= n || b >= n {
                return Err(PlumbingError::InvalidGraph(format!(
                    "edge ({a},{b}) refers to a missing vertex"
                )));
            }
            if a == b {
                return Err(PlumbingError::InvalidGraph(format!("self-loop at {a}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(PlumbingError::InvalidGraph(format!(
                    "duplicate edge ({a},{b})"
                )));
            }
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return Err(PlumbingError::InvalidGraph(format!(
                    "edge ({a},{b}) closes a cycle"
                )));
            }
            parent[ra] = rb;
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        Ok(WeightedForest {
            weights,
            edges,
            adjacency,
        })
    }

    /// Reads a forest back from a symmetric matrix with off-diagonal
    /// entries in `{0, 1}`.
    pub fn from_incidence(m: &IntMatrix) -> Result<Self> {
        if !m.is_square() || !m.is_symmetric() {
            return Err(PlumbingError::InvalidGraph(
                "incidence matrix must be symmetric".into(),
            ));
        }
        let mut edges = Vec::new();
        for i in 0..m.rows() {
            for j in i + 1..m.cols() {
                match m[(i, j)] {
                    0 => {}
                    1 => edges.push((i, j)),
                    x => {
                        return Err(PlumbingError::InvalidGraph(format!(
                            "entry ({i},{j}) = {x} is not an edge count of a simple graph"
                        )))
                    }
                }
            }
        }
        WeightedForest::new(m.diagonal_entries(), edges)
    }

    pub fn empty() -> Self {
        WeightedForest {
            weights: Vec::new(),
            edges: Vec::new(),
            adjacency: Vec::new(),
        }
    }

    pub fn from_json(s: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serialisation cannot fail")
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn weight(&self, v: usize) -> i64 {
        self.weights[v]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn valence(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn incidence_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::diagonal(&self.weights);
        for &(a, b) in &self.edges {
            m[(a, b)] = 1;
            m[(b, a)] = 1;
        }
        m
    }

    /// Vertices with `-valence < weight`.
    pub fn overweight_vertices(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&v| -(self.valence(v) as i64) < self.weights[v])
            .collect()
    }

    /// Connected components, each as a sorted vertex list, ordered by
    /// smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut label = vec![usize::MAX; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if label[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![start];
            let mut comp = Vec::new();
            label[start] = id;
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &w in &self.adjacency[v] {
                    if label[w] == usize::MAX {
                        label[w] = id;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Restriction to a vertex subset, renumbered in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Self {
        let mut index = vec![usize::MAX; self.len()];
        for (k, &v) in vertices.iter().enumerate() {
            index[v] = k;
        }
        let weights = vertices.iter().map(|&v| self.weights[v]).collect();
        let edges = self
            .edges
            .iter()
            .filter(|(a, b)| index[*a] != usize::MAX && index[*b] != usize::MAX)
            .map(|&(a, b)| (index[a], index[b]))
            .collect();
        WeightedForest::new(weights, edges).expect("subgraph of a forest is a forest")
    }

    /// Index-shifted union; block-diagonal incidence matrix.
    pub fn disjoint_union(forests: &[&WeightedForest]) -> Self {
        let mut weights = Vec::new();
        let mut edges = Vec::new();
        for f in forests {
            let shift = weights.len();
            weights.extend_from_slice(&f.weights);
            edges.extend(f.edges.iter().map(|&(a, b)| (a + shift, b + shift)));
        }
        WeightedForest::new(weights, edges).expect("union of forests is a forest")
    }

    /// Removes a `-1` vertex of valence at most two, raising each neighbour's
    /// weight by one and joining the neighbours when there are two.
    pub fn blow_down(&self, v: usize) -> Result<BlowDown> {
        if v >= self.len() || self.weights[v] != -1 || self.valence(v) > 2 {
            return Err(PlumbingError::NotBlowDownable(v));
        }
        let neighbors = self.adjacency[v].clone();
        let new_index: Vec<Option<usize>> = (0..self.len())
            .map(|u| match u.cmp(&v) {
                std::cmp::Ordering::Less => Some(u),
                std::cmp::Ordering::Equal => None,
                std::cmp::Ordering::Greater => Some(u - 1),
            })
            .collect();
        let weights = (0..self.len())
            .filter(|&u| u != v)
            .map(|u| self.weights[u] + neighbors.contains(&u) as i64)
            .collect();
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter(|&&(a, b)| a != v && b != v)
            .map(|&(a, b)| (new_index[a].unwrap(), new_index[b].unwrap()))
            .collect();
        if let [a, b] = neighbors[..] {
            edges.push((new_index[a].unwrap(), new_index[b].unwrap()));
        }
        Ok(BlowDown {
            forest: WeightedForest::new(weights, edges)?,
            removed: v,
            neighbors,
            new_index,
        })
    }

    /// Weighted isomorphism test via canonical encodings of rooted trees.
    pub fn is_isomorphic(&self, other: &Self) -> bool {
        self.len() == other.len() && self.canonical_encoding() == other.canonical_encoding()
    }

    fn canonical_encoding(&self) -> Vec<String> {
        let mut codes: Vec<String> = self
            .components()
            .iter()
            .map(|comp| {
                let tree = self.induced(comp);
                tree.centers()
                    .into_iter()
                    .map(|c| tree.rooted_code(c, usize::MAX))
                    .min()
                    .expect("nonempty tree has a center")
            })
            .collect();
        codes.sort();
        codes
    }

    fn centers(&self) -> Vec<usize> {
        let n = self.len();
        if n <= 2 {
            return (0..n).collect();
        }
        let mut degree: Vec<usize> = (0..n).map(|v| self.valence(v)).collect();
        let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
        let mut remaining = n;
        while remaining > 2 {
            remaining -= layer.len();
            let mut next = Vec::new();
            for &leaf in &layer {
                for &w in &self.adjacency[leaf] {
                    degree[w] -= 1;
                    if degree[w] == 1 {
                        next.push(w);
                    }
                }
            }
            layer = next;
        }
        layer
    }

    fn rooted_code(&self, v: usize, parent: usize) -> String {
        let mut children: Vec<String> = self.adjacency[v]
            .iter()
            .filter(|&&w| w != parent)
            .map(|&w| self.rooted_code(w, v))
            .collect();
        children.sort();
        format!("({}{})", self.weights[v], children.concat())
    }
}

impl fmt::Display for WeightedForest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

/// Result of a blow-down, with the bookkeeping needed to move covectors
/// (and hence spin^c classes) across it.
#[derive(Debug, Clone)]
pub struct BlowDown {
    pub forest: WeightedForest,
    pub removed: usize,
    pub neighbors: Vec<usize>,
    new_index: Vec<Option<usize>>,
}

impl BlowDown {
    /// Image of a covector on the original graph: the removed vertex's value
    /// is added to each of its neighbours, then dropped.
    ///
    /// This is evaluation on the basis `{u + e : u ~ e} ∪ {others}` that splits
    /// off the `-1` sphere `e`, so characteristic covectors and classes in
    /// the cokernel are carried across.
    pub fn push_covector(&self, v: &[i64]) -> Vec<i64> {
        let mut out = vec![0; self.forest.len()];
        for (u, &x) in v.iter().enumerate() {
            if let Some(k) = self.new_index[u] {
                out[k] = x + if self.neighbors.contains(&u) {
                    v[self.removed]
                } else {
                    0
                };
            }
        }
        out
    }
}

fn require_odd(x: i64) -> Result<()> {
    if x % 2 == 0 {
        Err(PlumbingError::EvenParameter(x))
    } else {
        Ok(())
    }
}

/// Star-shaped plumbing tree for `Y(p,q,r)`.
///
/// Vertex 0 is the central `-3`; then the `p`, `q` and `r` arms follow, each
/// listed outward from the centre with the negated coefficients of
/// `x/(x-1)`.
pub fn pretzel_graph(p: i64, q: i64, r: i64) -> Result<WeightedForest> {
    let mut weights = vec![-3];
    let mut edges = Vec::new();
    for x in [p, q, r] {
        require_odd(x)?;
        if x == 1 {
            return Err(PlumbingError::OutOfRange(
                "a parameter equal to 1 has no arm".into(),
            ));
        }
        let arm = ContinuedFraction::expand(x, x - 1)?;
        let mut prev = 0;
        for &c in arm.coefficients() {
            weights.push(-c);
            let v = weights.len() - 1;
            edges.push((prev, v));
            prev = v;
        }
    }
    WeightedForest::new(weights, edges)
}

/// The blown-down graph for `p, r ≥ 3`, `q ≤ -3`: a path of `p+r-1`
/// vertices of weight `-2`, plus a `q` vertex attached to the `p`-th one.
///
/// Path vertices come first, left to right; the `q` vertex is last.
pub fn reduced_pretzel_graph(p: i64, q: i64, r: i64) -> Result<WeightedForest> {
    for x in [p, q, r] {
        require_odd(x)?;
    }
    if p < 3 || r < 3 || q > -3 {
        return Err(PlumbingError::OutOfRange(format!(
            "reduced graph needs p, r >= 3 and q <= -3, got ({p},{q},{r})"
        )));
    }
    let path = (p + r - 1) as usize;
    let mut weights = vec![-2; path];
    weights.push(q);
    let mut edges: Vec<(usize, usize)> = (0..path - 1).map(|i| (i, i + 1)).collect();
    edges.push((p as usize - 1, path));
    WeightedForest::new(weights, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::int;

    #[test]
    fn continued_fraction_values() {
        let cf = ContinuedFraction::new(vec![2, 2, 2, 2]).unwrap();
        assert_eq!(cf.eval().unwrap(), Rational::new(5, 4));
        let cf = ContinuedFraction::new(vec![1, 6]).unwrap();
        assert_eq!(cf.eval().unwrap(), Rational::new(5, 6));
        assert_eq!(
            ContinuedFraction::new(vec![7]).unwrap().eval().unwrap(),
            int(7)
        );
        let bad = ContinuedFraction::new(vec![3, 1, 1]).unwrap();
        assert_eq!(bad.eval(), Err(PlumbingError::DivisionByZero));
    }

    #[test]
    fn continued_fraction_expansions() {
        assert_eq!(
            ContinuedFraction::expand(5, 4).unwrap().coefficients(),
            &[2, 2, 2, 2]
        );
        assert_eq!(
            ContinuedFraction::expand(7, 1).unwrap().coefficients(),
            &[7]
        );
        assert_eq!(
            ContinuedFraction::expand(-5, -6).unwrap().coefficients(),
            &[1, 6]
        );
        assert!(ContinuedFraction::expand(4, 6).is_err());
        assert!(ContinuedFraction::expand(1, 0).is_err());
    }

    #[test]
    fn star_graph_arms() {
        let g = pretzel_graph(3, -3, 3).unwrap();
        assert_eq!(g.weights(), &[-3, -2, -2, -1, -4, -2, -2]);
        assert_eq!(g.valence(0), 3);
        let g = pretzel_graph(3, -5, 3).unwrap();
        assert_eq!(&g.weights()[3..5], &[-1, -6]);
        let g = pretzel_graph(5, -3, 3).unwrap();
        assert_eq!(&g.weights()[1..5], &[-2, -2, -2, -2]);
        assert_eq!(
            pretzel_graph(4, -3, 3),
            Err(PlumbingError::EvenParameter(4))
        );
    }

    #[test]
    fn reduced_graph_shape() {
        let g = reduced_pretzel_graph(3, -3, 3).unwrap();
        assert_eq!(g.weights(), &[-2, -2, -2, -2, -2, -3]);
        assert_eq!(g.neighbors(5), &[2]);
        let g = reduced_pretzel_graph(3, -5, 5).unwrap();
        assert_eq!(g.len(), 8);
        assert_eq!(g.neighbors(7), &[2]);
        assert!(reduced_pretzel_graph(1, -3, 3).is_err());
        assert!(reduced_pretzel_graph(3, 3, 3).is_err());
    }

    #[test]
    fn blow_down_of_star_is_reduced_graph() {
        for (p, q, r) in [(3, -3, 3), (5, -7, 3), (3, -9, 7)] {
            let g = pretzel_graph(p, q, r).unwrap();
            let minus_one = g.weights().iter().position(|&w| w == -1).unwrap();
            let b = g.blow_down(minus_one).unwrap();
            assert!(b
                .forest
                .is_isomorphic(&reduced_pretzel_graph(p, q, r).unwrap()));
        }
    }

    #[test]
    fn blow_down_edge_cases() {
        let single = WeightedForest::new(vec![-1, -2], vec![]).unwrap();
        let b = single.blow_down(0).unwrap();
        assert_eq!(b.forest.weights(), &[-2]);
        let pair = WeightedForest::new(vec![-1, -2], vec![(0, 1)]).unwrap();
        assert_eq!(pair.blow_down(0).unwrap().forest.weights(), &[-1]);
        assert_eq!(
            pair.blow_down(1).unwrap_err(),
            PlumbingError::NotBlowDownable(1)
        );
        let star = WeightedForest::new(vec![-1, -2, -2, -2], vec![(0, 1), (0, 2), (0, 3)]).unwrap();
        assert!(star.blow_down(0).is_err());
    }

    #[test]
    fn incidence_matrices() {
        let g = reduced_pretzel_graph(3, -3, 3).unwrap();
        assert_eq!(g.incidence_matrix().det().unwrap(), 9);
        let single = WeightedForest::new(vec![-7], vec![]).unwrap();
        assert_eq!(single.incidence_matrix(), IntMatrix::diagonal(&[-7]));
        let pair = WeightedForest::new(vec![-2, -2], vec![(0, 1)]).unwrap();
        assert_eq!(
            pair.incidence_matrix(),
            IntMatrix::from_rows(&[[-2, 1], [1, -2]]).unwrap()
        );
    }

    #[test]
    fn overweight() {
        // only the trivalent -2 vertex
        assert_eq!(
            reduced_pretzel_graph(3, -5, 3)
                .unwrap()
                .overweight_vertices(),
            vec![2]
        );
        let single = WeightedForest::new(vec![-1], vec![]).unwrap();
        assert!(single.overweight_vertices().is_empty());
        let path = WeightedForest::new(vec![-2, -1, -2], vec![(0, 1), (1, 2)]).unwrap();
        assert_eq!(path.overweight_vertices(), vec![1]);
    }

    #[test]
    fn incidence_round_trip() {
        let g = reduced_pretzel_graph(3, -7, 5).unwrap();
        let back = WeightedForest::from_incidence(&g.incidence_matrix()).unwrap();
        assert_eq!(back.incidence_matrix(), g.incidence_matrix());
        let cycle = IntMatrix::from_rows(&[[-2, 1, 1], [1, -2, 1], [1, 1, -2]]).unwrap();
        assert!(WeightedForest::from_incidence(&cycle).is_err());
        let double = IntMatrix::from_rows(&[[-2, 2], [2, -2]]).unwrap();
        assert!(WeightedForest::from_incidence(&double).is_err());
    }

    #[test]
    fn unions() {
        let g = reduced_pretzel_graph(3, -9, 3).unwrap();
        let u = WeightedForest::disjoint_union(&[&g, &g]);
        assert_eq!(u.len(), 12);
        let m = g.incidence_matrix();
        assert_eq!(u.incidence_matrix(), IntMatrix::direct_sum(&[&m, &m]));
        assert_eq!(u.incidence_matrix().det().unwrap(), m.det().unwrap().pow(2));
        assert_eq!(u.components().len(), 2);
        let e = WeightedForest::empty();
        assert_eq!(WeightedForest::disjoint_union(&[&g, &e]), g);
    }

    #[test]
    fn graph_validation() {
        assert!(WeightedForest::new(vec![-2, -2, -2], vec![(0, 1), (1, 2), (2, 0)]).is_err());
        assert!(WeightedForest::new(vec![-2], vec![(0, 0)]).is_err());
        assert!(WeightedForest::new(vec![-2, -2], vec![(0, 1), (1, 0)]).is_err());
        assert!(WeightedForest::new(vec![-2], vec![(0, 3)]).is_err());
    }

    #[test]
    fn json_format() {
        let g = WeightedForest::from_json(r#"{"vertices":[-2,-3],"edges":[[0,1]]}"#).unwrap();
        assert_eq!(
            g.incidence_matrix(),
            IntMatrix::from_rows(&[[-2, 1], [1, -3]]).unwrap()
        );
        assert_eq!(WeightedForest::from_json(&g.to_json()).unwrap(), g);
        let cyclic = r#"{"vertices":[-2,-2,-2],"edges":[[0,1],[1,2],[0,2]]}"#;
        assert!(WeightedForest::from_json(cyclic).is_err());
    }

    #[test]
    fn isomorphism_respects_weights() {
        let a = WeightedForest::new(vec![-2, -3, -4], vec![(0, 1), (1, 2)]).unwrap();
        let b = WeightedForest::new(vec![-4, -3, -2], vec![(2, 1), (1, 0)]).unwrap();
        let c = WeightedForest::new(vec![-3, -2, -4], vec![(0, 1), (1, 2)]).unwrap();
        assert!(a.is_isomorphic(&b));
        assert!(!a.is_isomorphic(&c));
    }
}
