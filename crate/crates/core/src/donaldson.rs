//! Embeddings of definite lattices into the standard diagonal lattice.
//!
//! If `Y(p,q,r)` bounds a rational ball, gluing it to the negative definite
//! plumbing gives a closed definite manifold, and Donaldson's theorem forces
//! `(Zⁿ, G)` to embed in `(Zⁿ, −Id)`. This module searches for such
//! embeddings in general and solves the pretzel case in closed form.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{isqrt, IntMatrix, LinalgError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DonaldsonError {
    #[error("parameters out of range: {0}")]
    OutOfRange(String),
    #[error("form is not negative definite")]
    NotNegativeDefinite,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

type Result<T, E = DonaldsonError> = std::result::Result<T, E>;

/// Largest connected-sum order accepted by the `B` search; deduplication
/// walks all `n!` permutations.
pub const MAX_B_ORDER: usize = 6;

/// Rows are the images of the basis vectors in `(Z^N, −Id)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LatticeEmbedding {
    pub matrix: IntMatrix,
}

impl LatticeEmbedding {
    /// Representative of the orbit under signed column permutations: every
    /// column is negated so its first nonzero entry is negative, then columns
    /// are sorted ascending as vectors. This is the least element in
    /// column-major lexicographic order.
    pub fn canonical(&self) -> LatticeEmbedding {
        let m = &self.matrix;
        let mut cols: Vec<Vec<i64>> = (0..m.cols())
            .map(|j| {
                let mut c = m.column(j);
                if c.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0) {
                    c.iter_mut().for_each(|x| *x = -*x);
                }
                c
            })
            .collect();
        cols.sort();
        let mut out = IntMatrix::zeros(m.rows(), m.cols());
        for (j, c) in cols.iter().enumerate() {
            for (i, &x) in c.iter().enumerate() {
                out[(i, j)] = x;
            }
        }
        LatticeEmbedding { matrix: out }
    }

    /// `−ΦΦᵀ = G`.
    pub fn realises(&self, g: &IntMatrix) -> Result<bool> {
        Ok(&self.matrix.gram()?.neg()? == g)
    }
}

/// One solution of `pλ² + r(λ+1)² = −q` and the matrix it induces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaSolution {
    pub lambda: i64,
    pub a_matrix: IntMatrix,
}

fn check_reduced(p: i64, q: i64, r: i64) -> Result<()> {
    let odd = [p, q, r].iter().all(|x| x % 2 != 0);
    if !odd || p < 3 || r < 3 || q > -3 {
        return Err(DonaldsonError::OutOfRange(format!(
            "need odd p, r >= 3 and q <= -3, got ({p},{q},{r})"
        )));
    }
    Ok(())
}

/// All integers `λ` with `pλ² + r(λ+1)² = −q`, ascending.
pub fn lambda_solutions(p: i64, q: i64, r: i64) -> Result<Vec<i64>> {
    check_reduced(p, q, r)?;
    Ok(lambda_solutions_unchecked(p, q, r))
}

/// Same equation without the range check; used for twist knots (`p = r = 1`).
pub(crate) fn lambda_solutions_unchecked(p: i64, q: i64, r: i64) -> Vec<i64> {
    let bound = 1 + isqrt(((-q).max(0) / p.min(r)) as i128) as i64;
    (-bound..=bound)
        .filter(|&l| p * l * l + r * (l + 1) * (l + 1) == -q)
        .collect()
}

/// The `(p+r)×(p+r)` matrix whose rows are `eᵢ − eᵢ₊₁` for `i < p+r−1`,
/// followed by `λ` in the first `p` columns and `λ+1` in the last `r`.
pub fn build_a(p: i64, r: i64, lambda: i64) -> Result<IntMatrix> {
    if p < 1 || r < 1 {
        return Err(DonaldsonError::OutOfRange(format!("p={p}, r={r}")));
    }
    let n = (p + r) as usize;
    let mut a = IntMatrix::zeros(n, n);
    for i in 0..n - 1 {
        a[(i, i)] = 1;
        a[(i, i + 1)] = -1;
    }
    for j in 0..n {
        a[(n - 1, j)] = if j < p as usize { lambda } else { lambda + 1 };
    }
    Ok(a)
}

pub fn lambda_factorizations(p: i64, q: i64, r: i64) -> Result<Vec<LambdaSolution>> {
    lambda_solutions(p, q, r)?
        .into_iter()
        .map(|lambda| {
            Ok(LambdaSolution {
                lambda,
                a_matrix: build_a(p, r, lambda)?,
            })
        })
        .collect()
}

/// `G = −AAᵀ` exactly.
pub fn verify_factorization(g: &IntMatrix, a: &IntMatrix) -> Result<bool> {
    if !g.is_square() || !a.is_square() || g.rows() != a.rows() {
        return Err(LinalgError::DimensionMismatch(format!(
            "G is {}x{}, A is {}x{}",
            g.rows(),
            g.cols(),
            a.rows(),
            a.cols()
        ))
        .into());
    }
    Ok(&a.gram()?.neg()? == g)
}

/// All embeddings of `(Zⁿ, G)` into `(Z^rank, −Id)` up to signed permutations
/// of the target coordinates, as sorted canonical representatives.
pub fn find_embeddings(g: &IntMatrix, rank: usize) -> Result<Vec<LatticeEmbedding>> {
    if !g.is_negative_definite()? {
        return Err(DonaldsonError::NotNegativeDefinite);
    }
    let n = g.rows();
    if rank < n {
        return Err(DonaldsonError::OutOfRange(format!(
            "target rank {rank} is smaller than the lattice rank {n}"
        )));
    }
    let mut search = EmbeddingSearch {
        g,
        rank,
        order: placement_order(g),
        rows: Vec::with_capacity(n),
        suffix: Vec::with_capacity(n),
        used: 0,
        found: BTreeSet::new(),
    };
    search.place_next();
    let found = search.found;
    for e in &found {
        debug_assert!(e.realises(g).unwrap_or(false));
    }
    Ok(found.into_iter().collect())
}

/// Smallest `|Gᵢᵢ|` first; ties go to rows adjacent to something already
/// placed, then to the lowest index.
fn placement_order(g: &IntMatrix) -> Vec<usize> {
    let n = g.rows();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let next = (0..n)
            .filter(|&i| !placed[i])
            .min_by_key(|&i| {
                let adjacent = order.iter().any(|&j: &usize| g[(i, j)] != 0);
                (g[(i, i)].abs(), !adjacent, i)
            })
            .expect("unplaced row exists");
        placed[next] = true;
        order.push(next);
    }
    order
}

struct EmbeddingSearch<'a> {
    g: &'a IntMatrix,
    rank: usize,
    order: Vec<usize>,
    rows: Vec<Vec<i64>>,
    /// `suffix[k][c]` = squared norm of placed row `k` on columns `c..`.
    suffix: Vec<Vec<i64>>,
    /// Columns `0..used` are touched by some placed row; the rest are zero.
    used: usize,
    found: BTreeSet<LatticeEmbedding>,
}

impl EmbeddingSearch<'_> {
    fn place_next(&mut self) {
        let k = self.rows.len();
        if k == self.order.len() {
            self.record();
            return;
        }
        let i = self.order[k];
        let targets: Vec<i64> = self.order[..k].iter().map(|&j| -self.g[(i, j)]).collect();
        let mut row = vec![0; self.rank];
        let mut partial = vec![0; k];
        self.fill(&targets, &mut row, &mut partial, 0, -self.g[(i, i)]);
    }

    fn fill(
        &mut self,
        targets: &[i64],
        row: &mut Vec<i64>,
        partial: &mut Vec<i64>,
        c: usize,
        remaining: i64,
    ) {
        if c == self.rank || (c >= self.used && remaining == 0) {
            if remaining == 0 && partial.iter().zip(targets).all(|(s, t)| s == t) {
                self.accept(row);
            }
            return;
        }
        let limit = isqrt(remaining as i128) as i64;
        // fresh columns are zero in every placed row, so their entries can be
        // taken positive and nonincreasing; a zero there would end the row
        let candidates = if c >= self.used {
            let prev = if c > self.used { row[c - 1] } else { limit };
            1..=prev.min(limit)
        } else {
            -limit..=limit
        };
        for x in candidates {
            let rest = remaining - x * x;
            let mut ok = true;
            for (k, placed) in self.rows.iter().enumerate() {
                let s = partial[k] + x * placed[c];
                let support = self.suffix[k].get(c + 1).copied().unwrap_or(0);
                let gap = (targets[k] - s) as i128;
                if gap * gap > rest as i128 * support as i128 {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            row[c] = x;
            for (k, placed) in self.rows.iter().enumerate() {
                partial[k] += x * placed[c];
            }
            self.fill(targets, row, partial, c + 1, rest);
            for (k, placed) in self.rows.iter().enumerate() {
                partial[k] -= x * placed[c];
            }
            row[c] = 0;
        }
    }

    fn accept(&mut self, row: &[i64]) {
        let mut suffix = vec![0; self.rank + 1];
        for c in (0..self.rank).rev() {
            suffix[c] = suffix[c + 1] + row[c] * row[c];
        }
        let saved_used = self.used;
        if let Some(last) = row.iter().rposition(|&x| x != 0) {
            self.used = self.used.max(last + 1);
        }
        self.rows.push(row.to_vec());
        self.suffix.push(suffix);
        self.place_next();
        self.rows.pop();
        self.suffix.pop();
        self.used = saved_used;
    }

    fn record(&mut self) {
        let n = self.order.len();
        let mut m = IntMatrix::zeros(n, self.rank);
        for (k, &i) in self.order.iter().enumerate() {
            for c in 0..self.rank {
                m[(i, c)] = self.rows[k][c];
            }
        }
        self.found
            .insert(LatticeEmbedding { matrix: m }.canonical());
    }
}

/// Solution of `−qI = pBBᵀ + r(B+I)(B+I)ᵀ`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BMatrix {
    pub b: IntMatrix,
}

impl BMatrix {
    pub fn order(&self) -> usize {
        self.b.rows()
    }

    pub fn satisfies(&self, p: i64, q: i64, r: i64) -> Result<bool> {
        let n = self.order();
        let shifted = self.b.add(&IntMatrix::identity(n))?;
        let lhs = IntMatrix::identity(n).scale(-q)?;
        let rhs = self.b.gram()?.scale(p)?.add(&shifted.gram()?.scale(r)?)?;
        Ok(lhs == rhs)
    }

    /// `PBPᵀ` for the permutation sending index `i` to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> BMatrix {
        let n = self.order();
        let mut out = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(perm[i], perm[j])] = self.b[(i, j)];
            }
        }
        BMatrix { b: out }
    }

    /// Least row-major representative over simultaneous row and column
    /// permutations.
    pub fn canonical(&self) -> BMatrix {
        permutations(self.order())
            .into_iter()
            .map(|perm| self.permuted(&perm))
            .min_by(|a, b| a.b.to_rows().cmp(&b.b.to_rows()))
            .expect("at least the identity permutation")
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Every entry of a solution is bounded by this, so searching with it is
/// exhaustive.
pub fn default_b_bound(p: i64, q: i64, r: i64) -> i64 {
    1 + isqrt(((-q).max(0) / p.min(r).max(1)) as i128) as i64
}

/// All solutions with entries in `[−bound, bound]`, one per orbit under
/// simultaneous permutation, sorted.
pub fn search_b_matrices(p: i64, q: i64, r: i64, n: usize, bound: i64) -> Result<Vec<BMatrix>> {
    if n == 0 || n > MAX_B_ORDER || bound < 1 || p < 1 || r < 1 {
        return Err(DonaldsonError::OutOfRange(format!(
            "need 1 <= n <= {MAX_B_ORDER}, bound >= 1, p, r >= 1; got n={n}, bound={bound}"
        )));
    }
    let mut rows: Vec<Vec<i64>> = Vec::with_capacity(n);
    let mut found = BTreeSet::new();
    b_rows(p, q, r, n, bound, &mut rows, &mut found);
    Ok(found.into_iter().collect())
}

fn b_rows(
    p: i64,
    q: i64,
    r: i64,
    n: usize,
    bound: i64,
    rows: &mut Vec<Vec<i64>>,
    found: &mut BTreeSet<BMatrix>,
) {
    let i = rows.len();
    if i == n {
        let b = BMatrix {
            b: IntMatrix::from_rows(rows).expect("square rows"),
        };
        found.insert(b.canonical());
        return;
    }
    let mut row = vec![0; n];
    b_entries(p, q, r, n, bound, i, 0, 0, &mut row, rows, found);
}

#[allow(clippy::too_many_arguments)]
fn b_entries(
    p: i64,
    q: i64,
    r: i64,
    n: usize,
    bound: i64,
    i: usize,
    j: usize,
    weight: i64,
    row: &mut Vec<i64>,
    rows: &mut Vec<Vec<i64>>,
    found: &mut BTreeSet<BMatrix>,
) {
    // weight = p|b|² + r|b + eᵢ|² over the entries chosen so far
    if weight > -q {
        return;
    }
    if j == n {
        if weight != -q {
            return;
        }
        let orthogonal = rows.iter().enumerate().all(|(k, other)| {
            let bb: i64 = row.iter().zip(other).map(|(x, y)| x * y).sum();
            p * bb + r * (bb + row[k] + other[i] + (i == k) as i64) == 0
        });
        if orthogonal {
            rows.push(row.clone());
            b_rows(p, q, r, n, bound, rows, found);
            rows.pop();
        }
        return;
    }
    for x in -bound..=bound {
        let shifted = x + (i == j) as i64;
        row[j] = x;
        b_entries(
            p,
            q,
            r,
            n,
            bound,
            i,
            j + 1,
            weight + p * x * x + r * shifted * shifted,
            row,
            rows,
            found,
        );
    }
    row[j] = 0;
}

/// `n(p+r)` square matrix for the connected sum of `n` copies, assembled
/// from `B`: block `i` has rows `eⱼ − eⱼ₊₁` inside the block, and its last
/// row is `Σⱼ bᵢⱼ·(all ones on block j)` plus ones on the last `r`
/// coordinates of block `i`.
pub fn block_a_matrix(p: i64, r: i64, b: &IntMatrix) -> Result<IntMatrix> {
    if p < 1 || r < 1 || !b.is_square() {
        return Err(DonaldsonError::OutOfRange(format!(
            "p={p}, r={r}, B not square"
        )));
    }
    let m = (p + r) as usize;
    let n = b.rows();
    let mut a = IntMatrix::zeros(n * m, n * m);
    for i in 0..n {
        let base = i * m;
        for j in 0..m - 1 {
            a[(base + j, base + j)] = 1;
            a[(base + j, base + j + 1)] = -1;
        }
        let last = base + m - 1;
        for k in 0..n {
            for c in 0..m {
                a[(last, k * m + c)] = b[(i, k)];
            }
        }
        for c in p as usize..m {
            a[(last, base + c)] += 1;
        }
    }
    Ok(a)
}
