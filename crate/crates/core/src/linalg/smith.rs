use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{IntMatrix, LinalgError, Result};

/// Dense matrix of arbitrary-precision integers.
pub type BigMatrix = Vec<Vec<BigInt>>;

/// `U · M · V = D` with `U`, `V` unimodular and `D` diagonal in Smith form.
///
/// The transforms are kept in arbitrary precision: their entries can grow far
/// past the size of `M` itself even for small sparse inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: BigMatrix,
    pub u_inv: BigMatrix,
    pub d: IntMatrix,
    pub v: BigMatrix,
    pub v_inv: BigMatrix,
    pub invariant_factors: Vec<i64>,
}

struct Work {
    a: BigMatrix,
    u: BigMatrix,
    u_inv: BigMatrix,
    v: BigMatrix,
    v_inv: BigMatrix,
}

fn identity(n: usize) -> BigMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as u8)).collect())
        .collect()
}

fn axpy(dst: &mut [BigInt], src: &[BigInt], c: &BigInt) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s * c;
    }
}

fn col_axpy(m: &mut [Vec<BigInt>], dst: usize, src: usize, c: &BigInt) {
    for row in m.iter_mut() {
        let add = &row[src] * c;
        row[dst] += add;
    }
}

impl Work {
    // row_dst += c * row_src, tracked in U and U⁻¹
    fn row_add(&mut self, dst: usize, src: usize, c: &BigInt) {
        let s = self.a[src].clone();
        axpy(&mut self.a[dst], &s, c);
        let s = self.u[src].clone();
        axpy(&mut self.u[dst], &s, c);
        col_axpy(&mut self.u_inv, src, dst, &-c);
    }

    fn col_add(&mut self, dst: usize, src: usize, c: &BigInt) {
        col_axpy(&mut self.a, dst, src, c);
        col_axpy(&mut self.v, dst, src, c);
        let s = self.v_inv[dst].clone();
        axpy(&mut self.v_inv[src], &s, &-c);
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.u.swap(i, j);
        for row in self.u_inv.iter_mut() {
            row.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in self.a.iter_mut().chain(self.v.iter_mut()) {
            row.swap(i, j);
        }
        self.v_inv.swap(i, j);
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut().chain(self.u[i].iter_mut()) {
            *x = -&*x;
        }
        for row in self.u_inv.iter_mut() {
            row[i] = -&row[i];
        }
    }

    /// Smallest nonzero |entry| in the trailing block, ties to lowest (row, col).
    fn pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(BigInt, usize, usize)> = None;
        for (i, row) in self.a.iter().enumerate().skip(t) {
            for (j, x) in row.iter().enumerate().skip(t) {
                if !x.is_zero() && best.as_ref().is_none_or(|(b, _, _)| x.abs() < *b) {
                    best = Some((x.abs(), i, j));
                }
            }
        }
        best.map(|(_, i, j)| (i, j))
    }
}

/// Quotient rounded to nearest, so remainders are at most `|p|/2`.
fn nearest(a: &BigInt, p: &BigInt) -> BigInt {
    let m = p.abs();
    let (mut q, r) = a.div_mod_floor(&m);
    if BigInt::from(2) * r > m {
        q += 1;
    }
    if p.is_negative() {
        -q
    } else {
        q
    }
}

fn narrow(x: &BigInt) -> Result<i64> {
    x.to_i64().ok_or(LinalgError::Overflow)
}

/// Exact product of two big matrices.
pub fn big_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> BigMatrix {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).map(|(x, brow)| x * &brow[j]).sum())
                .collect()
        })
        .collect()
}

/// Widens an [`IntMatrix`] to a [`BigMatrix`].
pub fn to_big(m: &IntMatrix) -> BigMatrix {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

impl SmithDecomposition {
    /// Pivot-minimising reduction; deterministic for a given input.
    ///
    /// Fails with `Overflow` only when an invariant factor itself leaves `i64`.
    pub fn compute(m: &IntMatrix) -> Result<Self> {
        let (rows, cols) = (m.rows(), m.cols());
        let mut w = Work {
            a: to_big(m),
            u: identity(rows),
            u_inv: identity(rows),
            v: identity(cols),
            v_inv: identity(cols),
        };
        for t in 0..rows.min(cols) {
            while let Some((pi, pj)) = w.pivot(t) {
                if pi != t {
                    w.swap_rows(pi, t);
                }
                if pj != t {
                    w.swap_cols(pj, t);
                }
                let p = w.a[t][t].clone();
                let mut clean = true;
                for i in t + 1..rows {
                    let q = nearest(&w.a[i][t], &p);
                    if !q.is_zero() {
                        w.row_add(i, t, &-q);
                    }
                    clean &= w.a[i][t].is_zero();
                }
                for j in t + 1..cols {
                    let q = nearest(&w.a[t][j], &p);
                    if !q.is_zero() {
                        w.col_add(j, t, &-q);
                    }
                    clean &= w.a[t][j].is_zero();
                }
                if !clean {
                    continue;
                }
                let offender =
                    (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&w.a[i][j] % &p).is_zero()));
                match offender {
                    Some(i) => w.row_add(t, i, &BigInt::one()),
                    None => break,
                }
            }
            if w.a[t][t].is_negative() {
                w.negate_row(t);
            }
        }
        let invariant_factors = (0..rows.min(cols))
            .map(|i| narrow(&w.a[i][i]))
            .collect::<Result<Vec<_>>>()?;
        let mut d = IntMatrix::zeros(rows, cols);
        for (i, &x) in invariant_factors.iter().enumerate() {
            d[(i, i)] = x;
        }
        let out = SmithDecomposition {
            u: w.u,
            u_inv: w.u_inv,
            d,
            v: w.v,
            v_inv: w.v_inv,
            invariant_factors,
        };
        debug_assert!(out.verify(m), "Smith decomposition failed verification");
        Ok(out)
    }

    /// Checks `U M V = D`, unimodularity (via `U U⁻¹ = I` and `V V⁻¹ = I`,
    /// both integral) and the divisibility chain, all exactly.
    pub fn verify(&self, m: &IntMatrix) -> bool {
        if big_mul(&big_mul(&self.u, &to_big(m)), &self.v) != to_big(&self.d) {
            return false;
        }
        let unimodular = |a: &BigMatrix, b: &BigMatrix| {
            a.iter().all(|row| row.len() == a.len()) && big_mul(a, b) == identity(a.len())
        };
        if !unimodular(&self.u, &self.u_inv) || !unimodular(&self.v, &self.v_inv) {
            return false;
        }
        let diagonal =
            (0..self.d.rows()).all(|i| (0..self.d.cols()).all(|j| i == j || self.d[(i, j)] == 0));
        let on_diagonal = self
            .invariant_factors
            .iter()
            .enumerate()
            .all(|(i, &x)| self.d[(i, i)] == x);
        let chain = self
            .invariant_factors
            .windows(2)
            .all(|w| match (w[0], w[1]) {
                (0, b) => b == 0,
                (a, b) => a > 0 && b % a == 0,
            });
        diagonal && on_diagonal && chain
    }
}

impl IntMatrix {
    pub fn smith_normal_form(&self) -> Result<SmithDecomposition> {
        SmithDecomposition::compute(self)
    }
}
