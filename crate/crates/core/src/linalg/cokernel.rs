use std::fmt;

use serde::{Deserialize, Serialize};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::{checked, narrow, IntMatrix, LinalgError, Result};

/// `Zⁿ / im M` for a nonsingular square `M`, in Smith coordinates.
///
/// A vector `w` is sent to the residues of `(U w)ᵢ` modulo every invariant
/// factor `dᵢ > 1`; this is a homomorphism whose kernel is exactly `im M`.
/// Only residues of the transforms are kept: row `i` of `U` modulo `dᵢ`, and
/// the matching columns of `U⁻¹` modulo the exponent `e` of the group, which
/// is harmless because `e·Zⁿ ⊆ im M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CokernelPresentation {
    source: IntMatrix,
    invariant_factors: Vec<i64>,
    /// Rows of `U` for the nonunit factors, reduced into `[0, dᵢ)`.
    rows: Vec<Vec<i64>>,
    /// Columns of `U⁻¹` for the nonunit factors, reduced into `[0, e)`.
    generators: Vec<Vec<i64>>,
    moduli: Vec<i64>,
}

fn residue(x: &BigInt, d: i64) -> i64 {
    let r = x % BigInt::from(d);
    let r = r.to_i64().expect("residue is below the modulus");
    r.rem_euclid(d)
}

/// An element of a finite cokernel, stored as canonical residues.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CokernelClass {
    coords: Vec<i64>,
    moduli: Vec<i64>,
}

impl CokernelPresentation {
    pub fn new(m: &IntMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(LinalgError::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        if m.det()? == 0 {
            return Err(LinalgError::SingularMatrix);
        }
        let smith = m.smith_normal_form()?;
        let (positions, moduli): (Vec<usize>, Vec<i64>) = smith
            .invariant_factors
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > 1)
            .map(|(i, &d)| (i, d))
            .unzip();
        let exponent = moduli.last().copied().unwrap_or(1);
        let rows = positions
            .iter()
            .zip(&moduli)
            .map(|(&i, &d)| smith.u[i].iter().map(|x| residue(x, d)).collect())
            .collect();
        let generators = positions
            .iter()
            .map(|&i| {
                smith
                    .u_inv
                    .iter()
                    .map(|row| residue(&row[i], exponent))
                    .collect()
            })
            .collect();
        Ok(CokernelPresentation {
            source: m.clone(),
            invariant_factors: smith.invariant_factors,
            rows,
            generators,
            moduli,
        })
    }

    pub fn source(&self) -> &IntMatrix {
        &self.source
    }

    pub fn invariant_factors(&self) -> &[i64] {
        &self.invariant_factors
    }

    /// Nonunit invariant factors, i.e. the cyclic decomposition.
    pub fn moduli(&self) -> &[i64] {
        &self.moduli
    }

    pub fn order(&self) -> u64 {
        self.moduli.iter().map(|&d| d as u64).product()
    }

    pub fn dimension(&self) -> usize {
        self.source.rows()
    }

    pub fn zero(&self) -> CokernelClass {
        CokernelClass {
            coords: vec![0; self.moduli.len()],
            moduli: self.moduli.clone(),
        }
    }

    pub fn project(&self, w: &[i64]) -> Result<CokernelClass> {
        if w.len() != self.dimension() {
            return Err(LinalgError::DimensionMismatch(format!(
                "vector of length {} in a cokernel of rank {}",
                w.len(),
                self.dimension()
            )));
        }
        let coords = self
            .rows
            .iter()
            .zip(&self.moduli)
            .map(|(row, &d)| {
                let mut acc: i128 = 0;
                for (u, x) in row.iter().zip(w) {
                    acc = checked(acc.checked_add(*u as i128 * *x as i128))?;
                }
                narrow(acc.rem_euclid(d as i128))
            })
            .collect::<Result<_>>()?;
        Ok(CokernelClass {
            coords,
            moduli: self.moduli.clone(),
        })
    }

    /// The reduced rows of `U` used by [`project`](Self::project), each with
    /// its modulus, for callers that update projections incrementally.
    pub fn projection_rows(&self) -> Vec<(&[i64], i64)> {
        self.rows
            .iter()
            .map(Vec::as_slice)
            .zip(self.moduli.iter().copied())
            .collect()
    }

    /// Class with the given residues, reduced into range.
    pub fn class_from_residues(&self, residues: &[i128]) -> Result<CokernelClass> {
        if residues.len() != self.moduli.len() {
            return Err(LinalgError::DimensionMismatch(
                "wrong number of residues".into(),
            ));
        }
        let coords = residues
            .iter()
            .zip(&self.moduli)
            .map(|(&x, &d)| narrow(x.rem_euclid(d as i128)))
            .collect::<Result<_>>()?;
        Ok(CokernelClass {
            coords,
            moduli: self.moduli.clone(),
        })
    }

    /// A vector whose projection is `class`, with entries in `[0, e)`.
    pub fn representative(&self, class: &CokernelClass) -> Result<Vec<i64>> {
        self.check(class)?;
        let exponent = self.moduli.last().copied().unwrap_or(1) as i128;
        (0..self.dimension())
            .map(|k| {
                let mut acc: i128 = 0;
                for (g, &c) in self.generators.iter().zip(&class.coords) {
                    acc = checked(acc.checked_add(g[k] as i128 * c as i128))?;
                }
                narrow(acc.rem_euclid(exponent))
            })
            .collect()
    }

    /// All elements, in mixed-radix order over the moduli.
    pub fn elements(&self) -> impl Iterator<Item = CokernelClass> + '_ {
        (0..self.order()).map(move |k| self.element(k))
    }

    /// The `k`-th element of [`elements`](Self::elements).
    pub fn element(&self, mut k: u64) -> CokernelClass {
        let mut coords = vec![0; self.moduli.len()];
        for (c, &d) in coords.iter_mut().zip(&self.moduli).rev() {
            *c = (k % d as u64) as i64;
            k /= d as u64;
        }
        CokernelClass {
            coords,
            moduli: self.moduli.clone(),
        }
    }

    pub fn index_of(&self, class: &CokernelClass) -> Result<u64> {
        self.check(class)?;
        Ok(class
            .coords
            .iter()
            .zip(&self.moduli)
            .fold(0u64, |acc, (&c, &d)| acc * d as u64 + c as u64))
    }

    fn check(&self, class: &CokernelClass) -> Result<()> {
        if class.moduli != self.moduli {
            return Err(LinalgError::DimensionMismatch(
                "class belongs to a different cokernel".into(),
            ));
        }
        Ok(())
    }
}

impl CokernelClass {
    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn moduli(&self) -> &[i64] {
        &self.moduli
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.moduli != other.moduli {
            return Err(LinalgError::DimensionMismatch(
                "classes of different groups".into(),
            ));
        }
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .zip(&self.moduli)
            .map(|((a, b), d)| (a + b).rem_euclid(*d))
            .collect();
        Ok(CokernelClass {
            coords,
            moduli: self.moduli.clone(),
        })
    }

    pub fn neg(&self) -> Self {
        CokernelClass {
            coords: self
                .coords
                .iter()
                .zip(&self.moduli)
                .map(|(a, d)| (-a).rem_euclid(*d))
                .collect(),
            moduli: self.moduli.clone(),
        }
    }
}

impl fmt::Debug for CokernelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CokernelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_of_order_five() {
        let m = IntMatrix::from_rows(&[[-2, 1], [1, -3]]).unwrap();
        let c = CokernelPresentation::new(&m).unwrap();
        assert_eq!(c.order(), 5);
        assert_eq!(c.moduli(), &[5]);
        // columns of M project to zero
        for j in 0..2 {
            assert!(c.project(&m.column(j)).unwrap().is_zero());
        }
        let reps: Vec<_> = c.elements().collect();
        assert_eq!(reps.len(), 5);
        for (k, class) in reps.iter().enumerate() {
            let w = c.representative(class).unwrap();
            assert_eq!(&c.project(&w).unwrap(), class);
            assert_eq!(c.index_of(class).unwrap(), k as u64);
        }
    }

    #[test]
    fn identity_is_trivial() {
        let c = CokernelPresentation::new(&IntMatrix::identity(3)).unwrap();
        assert_eq!(c.order(), 1);
        assert!(c.project(&[4, -1, 7]).unwrap().is_zero());
    }

    #[test]
    fn singular_is_rejected() {
        let m = IntMatrix::from_rows(&[[1, 2], [2, 4]]).unwrap();
        assert_eq!(
            CokernelPresentation::new(&m),
            Err(LinalgError::SingularMatrix)
        );
    }

    #[test]
    fn class_arithmetic() {
        let m = IntMatrix::diagonal(&[3, 6]);
        let c = CokernelPresentation::new(&m).unwrap();
        assert_eq!(c.order(), 18);
        let a = c.project(&[1, 1]).unwrap();
        let b = c.project(&[2, 5]).unwrap();
        let sum = a.add(&b).unwrap();
        assert_eq!(sum, c.project(&[3, 6]).unwrap());
        assert!(sum.is_zero());
        assert!(a.add(&a.neg()).unwrap().is_zero());
    }
}
