//! Brute-force correction terms for cross-checking.
//!
//! Every characteristic covector `v` with `vᵀM⁻¹v ≤ T` (`M = −G`) is listed,
//! whatever its class, by walking the ellipsoid one coordinate at a time.
//! Each class keeps the least norm seen; a class is certified once that
//! least norm is at most `T`, since every shorter characteristic vector has
//! been listed. `T` doubles until all classes are certified.
//!
//! This shares nothing with the closest-vector search of the main engine
//! beyond the cokernel presentation: it works on covectors rather than on
//! the coset parameter, uses `M⁻¹` rather than `M`, and never looks at a
//! class before a vector has been produced.

use crate::linalg::rational::{self, int, Rational};
use crate::linalg::{checked, isqrt, IntMatrix, LinalgError};

use super::{checked_cokernel, DInvariant, Decomposition, Result, SpincError};

struct Ellipsoid<'a> {
    n: usize,
    fp: Decomposition,
    adj: &'a [Vec<i128>],
    proj: Vec<(&'a [i64], i64)>,
    radix: Vec<u64>,
    parity: Vec<i64>,
    /// Bound on `vᵀM⁻¹v`.
    limit: Rational,
    det: i128,
    v: Vec<i64>,
    best: Vec<Option<(i128, Vec<i64>)>>,
}

impl Ellipsoid<'_> {
    fn walk(&mut self, level: usize, partial: Rational) -> Result<()> {
        if level == 0 {
            self.record()?;
            return Ok(());
        }
        let i = level - 1;
        // qᵢᵢ (vᵢ − u)² ≤ limit − partial with u = −Σ_{j>i} qᵢⱼ vⱼ
        let mut u = int(0);
        for j in i + 1..self.n {
            u = rational::sub(&u, &rational::mul(&self.fp.q[i][j], &int(self.v[j]))?)?;
        }
        let room = rational::sub(&self.limit, &partial)?;
        if room < int(0) {
            return Ok(());
        }
        let qii = self.fp.q[i][i];
        let (a, b) = (*u.numer(), *u.denom());
        // (b·vᵢ − a)² ≤ b²·room/qᵢᵢ
        let k = rational::div(
            &rational::mul(&room, &int(checked(b.checked_mul(b))?))?,
            &qii,
        )?;
        let m = isqrt(k.floor().to_integer());
        let mut x = num_integer::div_ceil(a - m, b);
        let hi = num_integer::div_floor(a + m, b);
        if (x - self.parity[i] as i128).rem_euclid(2) != 0 {
            x += 1;
        }
        while x <= hi {
            let e = rational::sub(&int(x), &u)?;
            let next = rational::add(&partial, &rational::mul(&qii, &rational::mul(&e, &e)?)?)?;
            if next <= self.limit {
                self.v[i] = i64::try_from(x).map_err(|_| LinalgError::Overflow)?;
                self.walk(i, next)?;
            }
            x += 2;
        }
        self.v[i] = 0;
        Ok(())
    }

    fn record(&mut self) -> Result<()> {
        // det · vᵀM⁻¹v, evaluated directly from the adjugate
        let mut norm: i128 = 0;
        for (i, row) in self.adj.iter().enumerate() {
            let mut s: i128 = 0;
            for (a, &x) in row.iter().zip(&self.v) {
                s = checked(s.checked_add(checked(a.checked_mul(x as i128))?))?;
            }
            norm = checked(norm.checked_add(checked(s.checked_mul(self.v[i] as i128))?))?;
        }
        if Rational::new(norm, self.det) > self.limit {
            return Ok(());
        }
        let mut index = 0u64;
        for ((row, d), w) in self.proj.iter().zip(&self.radix) {
            let mut key: i128 = 0;
            for (u, &x) in row.iter().zip(&self.v) {
                key = checked(key.checked_add(*u as i128 * x as i128))?;
            }
            index += key.rem_euclid(*d as i128) as u64 * w;
        }
        let slot = &mut self.best[index as usize];
        if slot.as_ref().is_none_or(|(b, _)| norm < *b) {
            *slot = Some((norm, self.v.clone()));
        }
        Ok(())
    }
}

/// Correction-term maxima for every class of a negative definite form with
/// odd determinant, in the cokernel's element order.
pub fn brute_force_d_invariants(g: &IntMatrix) -> Result<Vec<DInvariant>> {
    if !g.is_negative_definite()? {
        return Err(SpincError::UnsupportedGraph(
            "graph is not negative definite".into(),
        ));
    }
    let cokernel = checked_cokernel(g)?;
    let n = g.rows();
    let m = g.neg()?;
    let det = m.det()? as i128;
    let inv = m.rational_inverse()?;
    let adj: Vec<Vec<i128>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let x = inv.get(i, j) * Rational::from_integer(det);
                    if x.is_integer() {
                        Ok(x.to_integer())
                    } else {
                        Err(LinalgError::SingularMatrix)
                    }
                })
                .collect::<Result<_, LinalgError>>()
        })
        .collect::<Result<_, LinalgError>>()?;
    let fp = Decomposition::from_rational(
        (0..n)
            .map(|i| (0..n).map(|j| inv.get(i, j)).collect())
            .collect(),
    )?;
    let proj = cokernel.projection_rows();
    let mut radix = vec![1u64; proj.len()];
    for k in (0..proj.len().saturating_sub(1)).rev() {
        radix[k] = radix[k + 1] * proj[k + 1].1 as u64;
    }
    let order = cokernel.order() as usize;
    let mut t: i128 = 1;
    loop {
        let mut walk = Ellipsoid {
            n,
            fp: fp.clone(),
            adj: &adj,
            proj: proj.clone(),
            radix: radix.clone(),
            parity: g.diagonal_entries(),
            limit: int(t),
            det,
            v: vec![0; n],
            best: vec![None; order],
        };
        walk.walk(n, int(0))?;
        if walk.best.iter().all(Option::is_some) {
            return walk
                .best
                .into_iter()
                .enumerate()
                .map(|(k, b)| {
                    let (norm, witness) = b.expect("certified");
                    // d = (n − vᵀM⁻¹v)/4 with vᵀM⁻¹v = norm/det
                    let value =
                        rational::sub(&Rational::new(n as i128, 4), &Rational::new(norm, 4 * det))?;
                    Ok(DInvariant {
                        class: cokernel.element(k as u64),
                        value,
                        witness,
                    })
                })
                .collect();
        }
        t = checked(t.checked_mul(2))?;
    }
}
