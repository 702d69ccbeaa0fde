//! Spin^c structures and correction terms of plumbed rational homology
//! spheres.
//!
//! For a negative definite plumbing forest with at most two overweight
//! vertices per tree,
//!
//! ```text
//! d(Y, s) = max { (vᵀG⁻¹v + n) / 4 : v characteristic, [v] = s }
//! ```
//!
//! where `n` is the number of vertices. Spin^c structures on `Y` are
//! identified with `coker G`; when `det G` is odd, characteristic covectors
//! in a class form a single coset of `2·im G`.

pub mod oracle;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::linalg::rational::{self, int, Rational};
use crate::linalg::{
    checked, exact_sqrt, isqrt, narrow, CokernelClass, CokernelPresentation, IntMatrix,
    LinalgError, RationalMatrix,
};
use crate::plumbing::{PlumbingError, WeightedForest};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpincError {
    #[error("determinant {0} is even; spin^c structures are not identified with coker G")]
    EvenDeterminant(i64),
    #[error("form is singular")]
    Singular,
    #[error("unsupported graph: {0}")]
    UnsupportedGraph(String),
    #[error("G is not -A·Aᵀ")]
    FactorizationInvalid,
    #[error("{0} is not a perfect square")]
    NotASquare(i64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Plumbing(#[from] PlumbingError),
}

type Result<T, E = SpincError> = std::result::Result<T, E>;

/// An element of `coker G ≅ H²(Y; Z)`.
pub type SpincClass = CokernelClass;

/// `d(Y, s)` with a characteristic covector attaining the maximum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DInvariant {
    pub class: SpincClass,
    pub value: Rational,
    pub witness: Vec<i64>,
}

/// Negative definite form with odd determinant, with its cokernel.
pub(crate) fn checked_cokernel(g: &IntMatrix) -> Result<CokernelPresentation> {
    if !g.is_square() {
        return Err(LinalgError::NotSquare {
            rows: g.rows(),
            cols: g.cols(),
        }
        .into());
    }
    let det = g.det()?;
    if det == 0 {
        return Err(SpincError::Singular);
    }
    if det % 2 == 0 {
        return Err(SpincError::EvenDeterminant(det));
    }
    Ok(CokernelPresentation::new(g)?)
}

/// All `|det G|` classes, in the cokernel's mixed-radix order.
pub fn spinc_classes(g: &IntMatrix) -> Result<Vec<SpincClass>> {
    Ok(checked_cokernel(g)?.elements().collect())
}

/// Solves `Mz ≡ b (mod 2)` for `M` invertible mod 2.
fn solve_mod2(m: &IntMatrix, b: &[i64]) -> Option<Vec<i64>> {
    let n = m.rows();
    let mut a: Vec<Vec<u8>> = (0..n)
        .map(|i| {
            let mut row: Vec<u8> = m.row(i).iter().map(|x| x.rem_euclid(2) as u8).collect();
            row.push(b[i].rem_euclid(2) as u8);
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&i| a[i][col] == 1)?;
        a.swap(col, pivot);
        for i in 0..n {
            if i != col && a[i][col] == 1 {
                let src = a[col].clone();
                a[i].iter_mut().zip(&src).for_each(|(x, y)| *x ^= y);
            }
        }
    }
    Some(a.iter().map(|row| row[n] as i64).collect())
}

fn characteristic_in(
    g: &IntMatrix,
    cokernel: &CokernelPresentation,
    s: &SpincClass,
) -> Result<Vec<i64>> {
    let w = cokernel.representative(s)?;
    let defect: Vec<i64> = w
        .iter()
        .zip(g.diagonal_entries())
        .map(|(a, d)| d - a)
        .collect();
    let z = solve_mod2(g, &defect).ok_or(SpincError::EvenDeterminant(g.det()?))?;
    let gz = g.mul_vec(&z)?;
    let v: Vec<i64> = w.iter().zip(&gz).map(|(a, b)| a + b).collect();
    debug_assert!(is_characteristic(g, &v));
    Ok(v)
}

pub fn is_characteristic(g: &IntMatrix, v: &[i64]) -> bool {
    v.len() == g.rows()
        && v.iter()
            .zip(g.diagonal_entries())
            .all(|(a, d)| (a - d).rem_euclid(2) == 0)
}

/// A characteristic covector in the class `s`.
pub fn characteristic_rep(g: &IntMatrix, s: &SpincClass) -> Result<Vec<i64>> {
    let cokernel = checked_cokernel(g)?;
    characteristic_in(g, &cokernel, s)
}

/// `Q(x) = Σᵢ qᵢᵢ (xᵢ + Σ_{j>i} qᵢⱼ xⱼ)²` for a positive definite `M`.
#[derive(Debug, Clone)]
pub(crate) struct Decomposition {
    pub(crate) q: Vec<Vec<Rational>>,
}

impl Decomposition {
    fn new(m: &IntMatrix) -> Result<Self> {
        let rows = (0..m.rows())
            .map(|i| m.row(i).iter().map(|&x| int(x)).collect())
            .collect();
        Self::from_rational(rows)
    }

    pub(crate) fn from_rational(mut q: Vec<Vec<Rational>>) -> Result<Self> {
        let n = q.len();
        for i in 0..n {
            for j in i + 1..n {
                q[j][i] = q[i][j];
                q[i][j] = rational::div(&q[i][j], &q[i][i])?;
            }
            for k in i + 1..n {
                for l in k..n {
                    let t = rational::mul(&q[k][i], &q[i][l])?;
                    q[k][l] = rational::sub(&q[k][l], &t)?;
                }
            }
        }
        Ok(Decomposition { q })
    }

    fn len(&self) -> usize {
        self.q.len()
    }

    #[cfg(test)]
    fn evaluate(&self, x: &[i64]) -> Rational {
        (0..self.len())
            .map(|i| {
                let t =
                    (i + 1..self.len()).fold(int(x[i]), |acc, j| acc + self.q[i][j] * int(x[j]));
                self.q[i][i] * t * t
            })
            .sum()
    }
}

/// Minimiser of `(y − c)ᵀM(y − c)` over `Zⁿ`.
struct ClosestPoint<'a> {
    fp: &'a Decomposition,
    c: &'a [Rational],
    y: Vec<i64>,
    best: Rational,
    best_y: Vec<i64>,
}

impl ClosestPoint<'_> {
    /// Centre of coordinate `i` given the choices for `j > i`.
    fn centre(&self, i: usize) -> Result<Rational> {
        let mut u = self.c[i];
        for j in i + 1..self.fp.len() {
            let offset = rational::sub(&int(self.y[j]), &self.c[j])?;
            u = rational::sub(&u, &rational::mul(&self.fp.q[i][j], &offset)?)?;
        }
        Ok(u)
    }

    fn babai(&mut self) -> Result<()> {
        let mut total = int(0);
        for i in (0..self.fp.len()).rev() {
            let u = self.centre(i)?;
            self.y[i] = narrow(rational::round(&u))?;
            let e = rational::sub(&int(self.y[i]), &u)?;
            total = rational::add(
                &total,
                &rational::mul(&self.fp.q[i][i], &rational::mul(&e, &e)?)?,
            )?;
        }
        self.best = total;
        self.best_y = self.y.clone();
        Ok(())
    }

    /// Every integer point strictly inside the incumbent ellipsoid is
    /// visited, so the final incumbent is a true minimum.
    fn search(&mut self, level: usize, partial: Rational) -> Result<()> {
        if level == 0 {
            if partial < self.best {
                self.best = partial;
                self.best_y = self.y.clone();
            }
            return Ok(());
        }
        let i = level - 1;
        let u = self.centre(i)?;
        let qii = self.fp.q[i][i];
        let room = rational::sub(&self.best, &partial)?;
        if room <= int(0) {
            return Ok(());
        }
        // integers y with qii·(y − u)² < room: writing u = a/b, these are the
        // y with (b·y − a)² < b²·room/qii
        let (a, b) = (*u.numer(), *u.denom());
        let k = rational::div(
            &rational::mul(&room, &int(checked(b.checked_mul(b))?))?,
            &qii,
        )?;
        let ceil_k = -((-k).floor().to_integer());
        let m = isqrt(ceil_k - 1);
        let lo = num_integer::div_ceil(a - m, b);
        let hi = num_integer::div_floor(a + m, b);
        if lo > hi {
            return Ok(());
        }
        let start = rational::round(&u).clamp(lo, hi);
        let mut candidates = vec![start];
        for step in 1.. {
            let (down, up) = (start - step, start + step);
            if down < lo && up > hi {
                break;
            }
            if up <= hi {
                candidates.push(up);
            }
            if down >= lo {
                candidates.push(down);
            }
        }
        for y in candidates {
            let e = rational::sub(&int(y), &u)?;
            let next = rational::add(&partial, &rational::mul(&qii, &rational::mul(&e, &e)?)?)?;
            if next >= self.best {
                continue;
            }
            self.y[i] = narrow(y)?;
            self.search(i, next)?;
        }
        Ok(())
    }
}

/// Correction-term calculator for one negative definite plumbing forest.
#[derive(Debug, Clone)]
pub struct CorrectionTerms {
    g: IntMatrix,
    cokernel: CokernelPresentation,
    /// `(−G)⁻¹`
    m_inv: RationalMatrix,
    fp: Decomposition,
}

impl CorrectionTerms {
    /// Checks every hypothesis of the correction-term formula: `G` is the
    /// incidence matrix of a forest, negative definite, with odd determinant
    /// and at most two overweight vertices in each tree.
    pub fn new(g: &IntMatrix) -> Result<Self> {
        let forest = WeightedForest::from_incidence(g)
            .map_err(|e| SpincError::UnsupportedGraph(e.to_string()))?;
        Self::from_forest(&forest)
    }

    pub fn from_forest(forest: &WeightedForest) -> Result<Self> {
        let g = forest.incidence_matrix();
        if !g.is_negative_definite()? {
            return Err(SpincError::UnsupportedGraph(
                "graph is not negative definite".into(),
            ));
        }
        let overweight = forest.overweight_vertices();
        for tree in forest.components() {
            let bad = tree.iter().filter(|v| overweight.contains(v)).count();
            if bad > 2 {
                return Err(SpincError::UnsupportedGraph(format!(
                    "a tree has {bad} overweight vertices; at most two are allowed"
                )));
            }
        }
        Self::for_form(&g)
    }

    /// Only requires a negative definite form with odd determinant. The
    /// values are the maxima in the formula, which equal correction terms
    /// only under the hypotheses checked by [`new`](Self::new).
    pub fn for_form(g: &IntMatrix) -> Result<Self> {
        if !g.is_negative_definite()? {
            return Err(SpincError::UnsupportedGraph(
                "graph is not negative definite".into(),
            ));
        }
        let cokernel = checked_cokernel(g)?;
        let m = g.neg()?;
        Ok(CorrectionTerms {
            g: g.clone(),
            cokernel,
            m_inv: m.rational_inverse()?,
            fp: Decomposition::new(&m)?,
        })
    }

    pub fn form(&self) -> &IntMatrix {
        &self.g
    }

    pub fn cokernel(&self) -> &CokernelPresentation {
        &self.cokernel
    }

    pub fn classes(&self) -> Vec<SpincClass> {
        self.cokernel.elements().collect()
    }

    pub fn characteristic_rep(&self, s: &SpincClass) -> Result<Vec<i64>> {
        characteristic_in(&self.g, &self.cokernel, s)
    }

    /// Characteristic covectors in `s` are `v₀ + 2Gy`, and
    /// `(v₀ + 2Gy)ᵀG⁻¹(v₀ + 2Gy) = −4(y − c)ᵀM(y − c)` with `M = −G` and
    /// `c = M⁻¹v₀/2`, so the maximum is a closest-vector problem.
    pub fn d_invariant(&self, s: &SpincClass) -> Result<DInvariant> {
        let v0 = self.characteristic_rep(s)?;
        let half = Rational::new(1, 2);
        let c: Vec<Rational> = self
            .m_inv
            .mul_vec(&v0.iter().map(|&x| int(x)).collect::<Vec<_>>())?
            .iter()
            .map(|x| rational::mul(x, &half))
            .collect::<Result<_, _>>()?;
        let n = self.g.rows();
        let mut cp = ClosestPoint {
            fp: &self.fp,
            c: &c,
            y: vec![0; n],
            best: int(0),
            best_y: vec![0; n],
        };
        cp.babai()?;
        cp.search(n, int(0))?;
        let gy = self.g.mul_vec(&cp.best_y)?;
        let witness: Vec<i64> = v0.iter().zip(&gy).map(|(a, b)| a + 2 * b).collect();
        let value = rational::sub(&Rational::new(n as i128, 4), &cp.best)?;
        debug_assert_eq!(Ok(value), self.objective(&witness));
        Ok(DInvariant {
            class: s.clone(),
            value,
            witness,
        })
    }

    /// `(vᵀG⁻¹v + n)/4`.
    pub fn objective(&self, v: &[i64]) -> Result<Rational> {
        let norm = self.m_inv.quadratic_form(v)?;
        let n = int(self.g.rows() as i64);
        Ok(rational::div(&rational::sub(&n, &norm)?, &int(4))?)
    }

    pub fn all(&self) -> Result<Vec<DInvariant>> {
        self.classes().iter().map(|s| self.d_invariant(s)).collect()
    }
}

pub fn d_invariant(g: &IntMatrix, s: &SpincClass) -> Result<DInvariant> {
    CorrectionTerms::new(g)?.d_invariant(s)
}

/// Correction terms add under connected sum, i.e. over the trees of a
/// forest with the class split accordingly.
pub fn d_invariants_forest(parts: &[(&IntMatrix, &SpincClass)]) -> Result<Rational> {
    parts.iter().try_fold(int(0), |acc, (g, s)| {
        let d = d_invariant(g, s)?;
        Ok(rational::add(&acc, &d.value)?)
    })
}

/// `im A / im G` inside `coker G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VSubgroup {
    pub generators: Vec<SpincClass>,
    pub elements: Vec<SpincClass>,
}

impl VSubgroup {
    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn contains(&self, s: &SpincClass) -> bool {
        self.elements.binary_search(s).is_ok()
    }
}

fn check_factorization(g: &IntMatrix, a: &IntMatrix) -> Result<()> {
    let ok = g.is_square() && a.is_square() && g.rows() == a.rows() && &a.gram()?.neg()? == g;
    if ok {
        Ok(())
    } else {
        Err(SpincError::FactorizationInvalid)
    }
}

pub fn v_subgroup(g: &IntMatrix, a: &IntMatrix) -> Result<VSubgroup> {
    check_factorization(g, a)?;
    let cokernel = checked_cokernel(g)?;
    let mut generators: Vec<SpincClass> = (0..a.cols())
        .map(|j| cokernel.project(&a.column(j)))
        .collect::<Result<_, _>>()?;
    generators.sort();
    generators.dedup();
    let mut seen = BTreeSet::from([cokernel.zero()]);
    let mut frontier = vec![cokernel.zero()];
    while let Some(x) = frontier.pop() {
        for gen in &generators {
            let y = x.add(gen)?;
            if seen.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    Ok(VSubgroup {
        generators,
        elements: seen.into_iter().collect(),
    })
}

/// Distinct classes `[Ax]` for `x ∈ {±1}ⁿ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VanishingClasses {
    pub classes: Vec<SpincClass>,
}

impl VanishingClasses {
    pub fn count(&self) -> u64 {
        self.classes.len() as u64
    }
}

/// For the pretzel factorisation the functional `ℓ(x) = Σxᵢ` has kernel
/// spanned by the first `n−1` columns of `Aᵀ`, so `[Ax]` depends only on
/// `ℓ(x)`; the vectors `x_k` with `k` leading `−1` entries realise every
/// value `ℓ` takes on `{±1}ⁿ`.
pub fn vanishing_on_v(g: &IntMatrix, a: &IntMatrix) -> Result<VanishingClasses> {
    check_factorization(g, a)?;
    let cokernel = checked_cokernel(g)?;
    let n = g.rows();
    let mut classes = BTreeSet::new();
    for k in 0..=n {
        let x: Vec<i64> = (0..n).map(|i| if i < k { -1 } else { 1 }).collect();
        classes.insert(cokernel.project(&a.mul_vec(&x)?)?);
    }
    Ok(VanishingClasses {
        classes: classes.into_iter().collect(),
    })
}

/// `|pλ + r(λ+1)|`, the order of `V` for the pretzel factorisation.
pub fn v_order(p: i64, r: i64, lambda: i64) -> i64 {
    (p * lambda + r * (lambda + 1)).abs()
}

/// Closed form of [`vanishing_on_v`] for the pretzel factorisation:
/// `coker Aᵀ ≅ Z/D` through `ℓ`, and `ℓ(x_k) = n − 2k`.
pub fn vanishing_count(p: i64, r: i64, lambda: i64) -> u64 {
    let n = p + r;
    let d = v_order(p, r, lambda);
    let values: BTreeSet<i64> = (0..=n).map(|k| (n - 2 * k).rem_euclid(d)).collect();
    values.len() as u64
}

/// Least `|x|²` over odd `x ∈ Zⁿ` with `Σxᵢ = s` (`s ≡ n mod 2`).
fn min_odd_norm(n: i64, s: i64) -> i64 {
    // x = 2y + 1 with Σy = m; balanced y minimises Σ(2y+1)²
    let m = (s - n) / 2;
    let f = m.div_euclid(n);
    let extra = m.rem_euclid(n);
    let sq = |y: i64| (2 * y + 1) * (2 * y + 1);
    (n - extra) * sq(f) + extra * sq(f + 1)
}

/// Correction terms on `V` for `G̃(p,q,r) = −AAᵀ`: the class of `A x` with
/// `ℓ(x) ≡ t (mod D)` has `d = (n − min |x|²)/4` over odd `x`.
///
/// Returns `(t, class, d)` for `t = 0, …, D−1`.
pub fn pretzel_v_correction_terms(
    p: i64,
    r: i64,
    lambda: i64,
) -> Result<Vec<(i64, SpincClass, Rational)>> {
    let a = crate::donaldson::build_a(p, r, lambda)
        .map_err(|e| SpincError::UnsupportedGraph(e.to_string()))?;
    let g = a.gram()?.neg()?;
    let cokernel = checked_cokernel(&g)?;
    let n = p + r;
    let d = v_order(p, r, lambda);
    let first = a.column(0);
    (0..d)
        .map(|t| {
            let w: Vec<i64> = first.iter().map(|x| x * t).collect();
            let class = cokernel.project(&w)?;
            // sums s ≡ t (mod d) with s ≡ n (mod 2) form t' + 2dZ; the
            // minimal norm is nondecreasing in |s|, so the two sums nearest
            // zero suffice
            let t0 = if (t - n).rem_euclid(2) == 0 { t } else { t - d };
            let base = t0.rem_euclid(2 * d);
            let best = [base, base - 2 * d]
                .iter()
                .map(|&s| min_odd_norm(n, s))
                .min()
                .expect("two candidates");
            let value = Rational::new((n - best) as i128, 4);
            Ok((t, class, value))
        })
        .collect()
}

/// `√det` for a square determinant; a non-square means `K` is not slice.
pub fn required_vanishing(det_k: i64) -> Result<i64> {
    exact_sqrt(det_k as i128)
        .map(|s| s as i64)
        .ok_or(SpincError::NotASquare(det_k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::donaldson::build_a;
    use crate::plumbing::reduced_pretzel_graph;

    fn two_by_two() -> IntMatrix {
        IntMatrix::from_rows(&[[-2, 1], [1, -3]]).unwrap()
    }

    fn reduced(p: i64, q: i64, r: i64) -> IntMatrix {
        reduced_pretzel_graph(p, q, r).unwrap().incidence_matrix()
    }

    #[test]
    fn class_counts() {
        assert_eq!(spinc_classes(&two_by_two()).unwrap().len(), 5);
        assert_eq!(spinc_classes(&IntMatrix::diagonal(&[-1])).unwrap().len(), 1);
        assert_eq!(spinc_classes(&reduced(3, -5, 3)).unwrap().len(), 21);
        assert_eq!(
            spinc_classes(&IntMatrix::diagonal(&[-2])),
            Err(SpincError::EvenDeterminant(-2))
        );
    }

    #[test]
    fn characteristic_representatives() {
        let g = two_by_two();
        let c = CokernelPresentation::new(&g).unwrap();
        let s = c.project(&[0, 1]).unwrap();
        let v = characteristic_rep(&g, &s).unwrap();
        assert!(is_characteristic(&g, &v));
        assert_eq!(c.project(&v).unwrap(), s);
        let zero = characteristic_rep(&g, &c.zero()).unwrap();
        assert!(is_characteristic(&g, &zero));
        assert!(c.project(&zero).unwrap().is_zero());
        let id = IntMatrix::diagonal(&[-1, -1, -1]);
        let v = characteristic_rep(&id, &spinc_classes(&id).unwrap()[0]).unwrap();
        assert!(v.iter().all(|x| x % 2 != 0));
    }

    #[test]
    fn characteristic_cosets_are_cosets_of_twice_im_g() {
        // two characteristic vectors in one class differ by 2Gy
        let g = reduced(3, -5, 3);
        let c = CokernelPresentation::new(&g).unwrap();
        let inv = g.rational_inverse().unwrap();
        let mut by_class: std::collections::BTreeMap<SpincClass, Vec<i64>> = Default::default();
        for seed in 0..400i64 {
            let v: Vec<i64> = (0..g.rows())
                .map(|i| {
                    let x = (seed * 7 + i as i64 * 13 + seed * seed) % 9 - 4;
                    if (x - g[(i, i)]) % 2 == 0 {
                        x
                    } else {
                        x + 1
                    }
                })
                .collect();
            let class = c.project(&v).unwrap();
            if let Some(w) = by_class.get(&class) {
                let diff: Vec<Rational> = v.iter().zip(w).map(|(a, b)| int(a - b)).collect();
                for y in inv.mul_vec(&diff).unwrap() {
                    assert!(y.is_integer() && y.to_integer() % 2 == 0);
                }
            } else {
                by_class.insert(class, v);
            }
        }
    }

    #[test]
    fn two_by_two_values() {
        let g = two_by_two();
        let terms = CorrectionTerms::new(&g).unwrap();
        let c = terms.cokernel();
        let d = terms.d_invariant(&c.project(&[0, 1]).unwrap()).unwrap();
        assert_eq!(d.value, Rational::new(2, 5));
        let d0 = terms.d_invariant(&c.zero()).unwrap();
        assert_eq!(d0.value, int(0));
        assert_eq!(terms.objective(&[2, -1]).unwrap(), int(0));
        let one = d_invariant(
            &IntMatrix::diagonal(&[-1]),
            &spinc_classes(&IntMatrix::diagonal(&[-1])).unwrap()[0],
        );
        assert_eq!(one.unwrap().value, int(0));
    }

    #[test]
    fn hypotheses_are_enforced() {
        let pos = IntMatrix::diagonal(&[3]);
        let err = CorrectionTerms::new(&pos).unwrap_err();
        assert!(err.to_string().contains("not negative definite"));
        // three trivalent -2 vertices, kept definite by heavy leaves
        let f = WeightedForest::new(
            vec![-2, -2, -2, -9, -9, -9, -9, -9],
            vec![(0, 1), (1, 2), (0, 3), (0, 4), (1, 5), (2, 6), (2, 7)],
        )
        .unwrap();
        assert!(f.incidence_matrix().is_negative_definite().unwrap());
        assert_eq!(f.overweight_vertices(), vec![0, 1, 2]);
        let err = CorrectionTerms::from_forest(&f).unwrap_err();
        assert!(err.to_string().contains("overweight"), "{err}");
    }

    #[test]
    fn forest_additivity() {
        let g = two_by_two();
        let c = CokernelPresentation::new(&g).unwrap();
        let s = c.project(&[0, 1]).unwrap();
        let sum = d_invariants_forest(&[(&g, &s), (&g, &s)]).unwrap();
        assert_eq!(sum, Rational::new(4, 5));
        let id = IntMatrix::diagonal(&[-1]);
        let t = spinc_classes(&id).unwrap().remove(0);
        assert_eq!(
            d_invariants_forest(&[(&g, &s), (&id, &t)]).unwrap(),
            Rational::new(2, 5)
        );
        let block = IntMatrix::direct_sum(&[&g, &g]);
        let cb = CokernelPresentation::new(&block).unwrap();
        let w = c.representative(&s).unwrap();
        let joined: Vec<i64> = w.iter().chain(&w).copied().collect();
        let direct = d_invariant(&block, &cb.project(&joined).unwrap()).unwrap();
        assert_eq!(direct.value, sum);
    }

    #[test]
    fn v_subgroups() {
        let g = reduced(3, -3, 3);
        let v = v_subgroup(&g, &build_a(3, 3, 0).unwrap()).unwrap();
        assert_eq!(v.order(), 3);
        assert_eq!(CokernelPresentation::new(&g).unwrap().order(), 9);
        let g = reduced(3, -5, 5);
        let v = v_subgroup(&g, &build_a(3, 5, 0).unwrap()).unwrap();
        assert_eq!(v.order(), 5);
        let id = IntMatrix::diagonal(&[-1, -1]);
        assert_eq!(v_subgroup(&id, &IntMatrix::identity(2)).unwrap().order(), 1);
        assert_eq!(
            v_subgroup(&g, &IntMatrix::identity(8)),
            Err(SpincError::FactorizationInvalid)
        );
    }

    #[test]
    fn vanishing_counts() {
        let g = reduced(3, -3, 3);
        let a = build_a(3, 3, 0).unwrap();
        assert_eq!(vanishing_on_v(&g, &a).unwrap().count(), 3);
        assert_eq!(vanishing_count(3, 3, 0), 3);
        let g = reduced(3, -23, 5);
        let a = build_a(3, 5, 1).unwrap();
        let count = vanishing_on_v(&g, &a).unwrap().count();
        assert_eq!(count, 9);
        assert_eq!(vanishing_count(3, 5, 1), 9);
        assert!(count < v_order(3, 5, 1) as u64);
    }

    #[test]
    fn v_fast_path_matches_engine() {
        for (p, r, l) in [(3, 3, 0), (3, 3, -1), (3, 5, 0), (3, 5, 1), (5, 3, -1)] {
            let q = -(p * l * l + r * (l + 1) * (l + 1));
            let g = reduced(p, q, r);
            let terms = CorrectionTerms::new(&g).unwrap();
            let v = v_subgroup(&g, &build_a(p, r, l).unwrap()).unwrap();
            let fast = pretzel_v_correction_terms(p, r, l).unwrap();
            assert_eq!(fast.len() as u64, v.order());
            let mut zeros = BTreeSet::new();
            for (_, class, value) in &fast {
                assert!(v.contains(class));
                assert_eq!(&terms.d_invariant(class).unwrap().value, value);
                assert!(*value <= int(0));
                if *value == int(0) {
                    zeros.insert(class.clone());
                }
            }
            let vanishing = vanishing_on_v(&g, &build_a(p, r, l).unwrap()).unwrap();
            assert_eq!(zeros.into_iter().collect::<Vec<_>>(), vanishing.classes);
        }
    }

    #[test]
    fn decomposition_reproduces_form() {
        let m = reduced(3, -7, 5).neg().unwrap();
        let fp = Decomposition::new(&m).unwrap();
        for seed in 0..50i64 {
            let x: Vec<i64> = (0..m.rows())
                .map(|i| (seed * 31 + i as i64 * 17) % 7 - 3)
                .collect();
            let mx = m.mul_vec(&x).unwrap();
            let direct: i64 = x.iter().zip(&mx).map(|(a, b)| a * b).sum();
            assert_eq!(fp.evaluate(&x), int(direct));
        }
    }

    #[test]
    fn required() {
        assert_eq!(required_vanishing(25), Ok(5));
        assert_eq!(required_vanishing(21), Err(SpincError::NotASquare(21)));
        assert_eq!(required_vanishing(1), Ok(1));
    }

    #[test]
    fn odd_norms() {
        assert_eq!(min_odd_norm(6, 6), 6);
        assert_eq!(min_odd_norm(6, 0), 6);
        assert_eq!(min_odd_norm(6, 8), 14);
        assert_eq!(min_odd_norm(3, -9), 27);
    }
}
