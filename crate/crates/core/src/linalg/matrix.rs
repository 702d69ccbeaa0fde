use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{self, Rational};
use super::{checked, narrow, LinalgError, Result};

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<i64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(LinalgError::Ragged);
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1; n])
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.as_ref().len() != cols {
                return Err(LinalgError::Ragged);
            }
            data.extend_from_slice(r.as_ref());
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn diagonal_entries(&self) -> Vec<i64> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn neg(&self) -> Result<Self> {
        let data = self
            .data
            .iter()
            .map(|x| x.checked_neg().ok_or(LinalgError::Overflow))
            .collect::<Result<_>>()?;
        Ok(IntMatrix { data, ..*self })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.checked_add(*b).ok_or(LinalgError::Overflow))
            .collect::<Result<_>>()?;
        Ok(IntMatrix { data, ..*self })
    }

    pub fn scale(&self, k: i64) -> Result<Self> {
        let data = self
            .data
            .iter()
            .map(|a| a.checked_mul(k).ok_or(LinalgError::Overflow))
            .collect::<Result<_>>()?;
        Ok(IntMatrix { data, ..*self })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: i128 = 0;
                for k in 0..self.cols {
                    let term = self[(i, k)] as i128 * other[(k, j)] as i128;
                    acc = checked(acc.checked_add(term))?;
                }
                out[(i, j)] = narrow(acc)?;
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} * vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        (0..self.rows)
            .map(|i| {
                let mut acc: i128 = 0;
                for (a, b) in self.row(i).iter().zip(v) {
                    acc = checked(acc.checked_add(*a as i128 * *b as i128))?;
                }
                narrow(acc)
            })
            .collect()
    }

    /// `M · Mᵀ`.
    pub fn gram(&self) -> Result<Self> {
        self.mul(&self.transpose())
    }

    /// Block-diagonal sum.
    pub fn direct_sum(blocks: &[&IntMatrix]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(r0 + i, c0 + j)] = b[(i, j)];
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// `P M Pᵀ` for the permutation sending index `i` to `perm[i]`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> Result<Self> {
        if !self.is_square() || perm.len() != self.rows {
            return Err(LinalgError::DimensionMismatch("permutation length".into()));
        }
        let mut out = Self::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(perm[i], perm[j])] = self[(i, j)];
            }
        }
        Ok(out)
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    fn wide(&self) -> Vec<Vec<i128>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|&x| x as i128).collect())
            .collect()
    }

    /// Exact determinant by Bareiss fraction-free elimination.
    pub fn det(&self) -> Result<i64> {
        self.require_square()?;
        let n = self.rows;
        if n == 0 {
            return Ok(1);
        }
        let mut a = self.wide();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(0),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let x = checked(a[i][j].checked_mul(a[k][k]))?;
                    let y = checked(a[i][k].checked_mul(a[k][j]))?;
                    // exact by Sylvester's identity
                    a[i][j] = checked(x.checked_sub(y))? / prev;
                }
                a[i][k] = 0;
            }
            prev = a[k][k];
        }
        narrow(sign * a[n - 1][n - 1])
    }

    /// Leading principal minors `det T_1, …, det T_n`.
    ///
    /// Bareiss without pivoting produces them as successive pivots; a zero
    /// pivot stops the elimination and the remaining minors are computed
    /// directly.
    pub fn leading_minors(&self) -> Result<Vec<i64>> {
        self.require_square()?;
        let n = self.rows;
        let mut out = Vec::with_capacity(n);
        let mut a = self.wide();
        let mut prev = 1i128;
        for k in 0..n {
            if a[k][k] == 0 {
                for m in k + 1..=n {
                    out.push(self.leading_block(m).det()?);
                }
                return Ok(out);
            }
            out.push(narrow(a[k][k])?);
            for i in k + 1..n {
                for j in k + 1..n {
                    let x = checked(a[i][j].checked_mul(a[k][k]))?;
                    let y = checked(a[i][k].checked_mul(a[k][j]))?;
                    a[i][j] = checked(x.checked_sub(y))? / prev;
                }
                a[i][k] = 0;
            }
            prev = a[k][k];
        }
        Ok(out)
    }

    fn leading_block(&self, m: usize) -> Self {
        let mut out = Self::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                out[(i, j)] = self[(i, j)];
            }
        }
        out
    }

    /// Sylvester's criterion: `sign(det T_k) = (-1)^k` for every leading minor.
    pub fn is_negative_definite(&self) -> Result<bool> {
        if !self.is_symmetric() {
            return Err(LinalgError::NotSymmetric);
        }
        Ok(self
            .leading_minors()?
            .iter()
            .enumerate()
            .all(|(k, &d)| if k % 2 == 0 { d < 0 } else { d > 0 }))
    }

    /// Exact inverse over the rationals (Gauss–Jordan), verified by
    /// multiplication before returning.
    pub fn rational_inverse(&self) -> Result<RationalMatrix> {
        self.require_square()?;
        let n = self.rows;
        let mut a: Vec<Vec<Rational>> = (0..n)
            .map(|i| self.row(i).iter().map(|&x| rational::int(x)).collect())
            .collect();
        let mut inv: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|j| rational::int((i == j) as i64)).collect())
            .collect();
        for k in 0..n {
            let p = (k..n)
                .find(|&i| !a[i][k].is_zero())
                .ok_or(LinalgError::SingularMatrix)?;
            a.swap(p, k);
            inv.swap(p, k);
            let pivot = a[k][k];
            for j in 0..n {
                a[k][j] = rational::div(&a[k][j], &pivot)?;
                inv[k][j] = rational::div(&inv[k][j], &pivot)?;
            }
            for i in 0..n {
                if i == k || a[i][k].is_zero() {
                    continue;
                }
                let f = a[i][k];
                for j in 0..n {
                    a[i][j] = rational::sub(&a[i][j], &rational::mul(&f, &a[k][j])?)?;
                    inv[i][j] = rational::sub(&inv[i][j], &rational::mul(&f, &inv[k][j])?)?;
                }
            }
        }
        let inverse = RationalMatrix {
            rows: n,
            cols: n,
            data: inv.into_iter().flatten().collect(),
        };
        if !inverse.is_inverse_of(self)? {
            return Err(LinalgError::SingularMatrix);
        }
        Ok(inverse)
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| format!("{x:>3}")).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Dense matrix of reduced rationals.
impl TryFrom<Vec<Vec<i64>>> for IntMatrix {
    type Error = LinalgError;
    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self> {
        IntMatrix::from_rows(&rows)
    }
}

impl From<IntMatrix> for Vec<Vec<i64>> {
    fn from(m: IntMatrix) -> Self {
        m.to_rows()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.data[i * self.cols + j]
    }

    /// `self · v`.
    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch("vector length".into()));
        }
        (0..self.rows)
            .map(|i| {
                let mut acc = Rational::zero();
                for (j, x) in v.iter().enumerate() {
                    acc = rational::add(&acc, &rational::mul(&self.get(i, j), x)?)?;
                }
                Ok(acc)
            })
            .collect()
    }

    /// `vᵀ · self · v` for an integer vector.
    pub fn quadratic_form(&self, v: &[i64]) -> Result<Rational> {
        let w: Vec<Rational> = v.iter().map(|&x| rational::int(x)).collect();
        let mw = self.mul_vec(&w)?;
        let mut acc = Rational::zero();
        for (a, b) in w.iter().zip(&mw) {
            acc = rational::add(&acc, &rational::mul(a, b)?)?;
        }
        Ok(acc)
    }

    fn is_inverse_of(&self, m: &IntMatrix) -> Result<bool> {
        let n = self.rows;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Rational::zero();
                for k in 0..n {
                    if m[(i, k)] != 0 {
                        acc = rational::add(
                            &acc,
                            &rational::mul(&rational::int(m[(i, k)]), &self.get(k, j))?,
                        )?;
                    }
                }
                let expected = if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                };
                if acc != expected {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}
