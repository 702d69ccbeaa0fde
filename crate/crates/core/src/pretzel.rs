//! Normal forms and classical invariants of odd pretzel knots.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{IntMatrix, LinalgError, Rational};

/// Parameters beyond this magnitude are rejected so that every product used
/// downstream fits comfortably in `i64`.
pub const MAX_PARAMETER: i64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PretzelError {
    #[error("parameter {0} is even")]
    EvenParameter(i64),
    #[error("parameter is zero")]
    ZeroParameter,
    #[error("parameter {0} exceeds the supported magnitude {MAX_PARAMETER}")]
    ParameterTooLarge(i64),
    #[error("knot is outside the domain of this invariant: {0}")]
    OutOfDomain(String),
    #[error("symmetric form is singular")]
    SingularForm,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

type Result<T, E = PretzelError> = std::result::Result<T, E>;

/// A normalised odd pretzel knot `P(p,q,r)`.
///
/// After normalisation at most one parameter is negative, it sits in the
/// middle, and `p ≤ r`. When every parameter is positive they are sorted.
/// `mirrored` records that the input was the mirror image of this knot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PretzelKnot {
    pub p: i64,
    pub q: i64,
    pub r: i64,
    pub mirrored: bool,
}

pub fn check_parameter(x: i64) -> Result<()> {
    if x == 0 {
        return Err(PretzelError::ZeroParameter);
    }
    if x % 2 == 0 {
        return Err(PretzelError::EvenParameter(x));
    }
    if x.abs() > MAX_PARAMETER {
        return Err(PretzelError::ParameterTooLarge(x));
    }
    Ok(())
}

/// Uses `P(p,q,r) = P(r,p,q) = P(r,q,p)` and the mirror `P(-p,-q,-r)`.
pub fn normalize(p: i64, q: i64, r: i64) -> Result<PretzelKnot> {
    for x in [p, q, r] {
        check_parameter(x)?;
    }
    let mut v = [p, q, r];
    let mirrored = v.iter().filter(|&&x| x < 0).count() >= 2;
    if mirrored {
        v = v.map(|x| -x);
    }
    let [p, q, r] = match v.iter().position(|&x| x < 0) {
        Some(i) => {
            let mut outer: Vec<i64> = (0..3).filter(|&j| j != i).map(|j| v[j]).collect();
            outer.sort_unstable();
            [outer[0], v[i], outer[1]]
        }
        None => {
            v.sort_unstable();
            v
        }
    };
    Ok(PretzelKnot { p, q, r, mirrored })
}

impl PretzelKnot {
    pub fn new(p: i64, q: i64, r: i64) -> Result<Self> {
        normalize(p, q, r)
    }

    pub fn params(&self) -> (i64, i64, i64) {
        (self.p, self.q, self.r)
    }

    /// `pq + qr + pr`, the determinant of the symmetric form `S` below.
    pub fn sigma_form_det(&self) -> i64 {
        self.p * self.q + self.q * self.r + self.p * self.r
    }

    pub fn min_abs(&self) -> i64 {
        self.p.abs().min(self.q.abs()).min(self.r.abs())
    }

    /// `P(1,q,1)`, up to the normalisation.
    pub fn is_twist_knot(&self) -> bool {
        [self.p, self.q, self.r].iter().filter(|&&x| x == 1).count() >= 2
    }

    /// The knot that was actually given, before mirroring.
    pub fn original_params(&self) -> (i64, i64, i64) {
        if self.mirrored {
            (-self.p, -self.q, -self.r)
        } else {
            self.params()
        }
    }
}

impl fmt::Display for PretzelKnot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P({},{},{})", self.p, self.q, self.r)?;
        if self.mirrored {
            write!(f, " (mirror)")?;
        }
        Ok(())
    }
}

pub fn determinant(k: &PretzelKnot) -> i64 {
    k.sigma_form_det().abs()
}

/// `S = [[p+q, q], [q, r+q]]`; its signature is that of the knot.
pub fn signature_form(k: &PretzelKnot) -> IntMatrix {
    IntMatrix::from_rows(&[[k.p + k.q, k.q], [k.q, k.r + k.q]]).expect("2x2 literal")
}

/// Signature of `S` by Sylvester's criterion on its leading minors.
pub fn signature(k: &PretzelKnot) -> Result<i64> {
    let s = signature_form(k);
    let minors = s.leading_minors()?;
    let (m1, m2) = (minors[0], minors[1]);
    match m2.signum() {
        0 => Err(PretzelError::SingularForm),
        -1 => Ok(0),
        _ if m1 > 0 => Ok(2),
        _ => Ok(-2),
    }
}

/// `Δ(t) ≐ a(t² + 1) − 2b·t` with `a = (s+1)/4`, `b = (s−1)/4`,
/// `s = pq + qr + pr`, normalised so that `Δ(1) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlexanderPolynomial {
    /// Coefficients of `1, t, t²`.
    pub coefficients: [i64; 3],
}

impl AlexanderPolynomial {
    pub fn a(&self) -> Rational {
        Rational::from_integer(self.coefficients[0] as i128)
    }

    pub fn b(&self) -> Rational {
        Rational::new(-(self.coefficients[1] as i128), 2)
    }

    pub fn eval(&self, t: i64) -> i64 {
        let [c0, c1, c2] = self.coefficients;
        c0 + c1 * t + c2 * t * t
    }

    pub fn is_trivial(&self) -> bool {
        self.coefficients[0] == 0
    }
}

impl fmt::Display for AlexanderPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, c, _] = self.coefficients;
        if a == 0 {
            return write!(f, "1");
        }
        let sign = |x: i64| if x < 0 { '-' } else { '+' };
        write!(f, "{a}t^2 {} {}t {} {}", sign(c), c.abs(), sign(a), a.abs())
    }
}

pub fn alexander_polynomial(k: &PretzelKnot) -> AlexanderPolynomial {
    let s = k.sigma_form_det();
    let a = (s + 1) / 4;
    AlexanderPolynomial {
        coefficients: [a, (1 - s) / 2, a],
    }
}

/// `τ` for `p, r > 0`; `from_mirror` is set when the given knot was the
/// mirror of the normalised one and the sign was flipped accordingly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauValue {
    pub value: i64,
    pub from_mirror: bool,
}

pub fn tau(k: &PretzelKnot) -> Result<TauValue> {
    if k.p <= 0 || k.r <= 0 {
        return Err(PretzelError::OutOfDomain(format!(
            "tau needs p, r > 0 after normalisation, got {k}"
        )));
    }
    let value = if -k.q < k.p.min(k.r) { -1 } else { 0 };
    Ok(TauValue {
        value: if k.mirrored { -value } else { value },
        from_mirror: k.mirrored,
    })
}

/// One of `p+q`, `q+r`, `p+r` vanishes.
pub fn ribbon_condition(k: &PretzelKnot) -> bool {
    k.p + k.q == 0 || k.q + k.r == 0 || k.p + k.r == 0
}

/// `L(order, twist)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LensSpace {
    pub order: i64,
    pub twist: i64,
}

impl fmt::Display for LensSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L({},{})", self.order, self.twist)
    }
}

/// Branched double cover of `P(p,q,1)`: `L(-pq-p-q, p+1)`.
pub fn two_bridge_lens(p: i64, q: i64) -> LensSpace {
    LensSpace {
        order: -p * q - p - q,
        twist: p + 1,
    }
}

/// All invariants at once, for reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnotInvariants {
    pub determinant: i64,
    pub signature: i64,
    pub alexander: AlexanderPolynomial,
    pub tau: Option<TauValue>,
}

pub fn invariants(k: &PretzelKnot) -> Result<KnotInvariants> {
    Ok(KnotInvariants {
        determinant: determinant(k),
        signature: signature(k)?,
        alexander: alexander_polynomial(k),
        tau: tau(k).ok(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn knot(p: i64, q: i64, r: i64) -> PretzelKnot {
        normalize(p, q, r).unwrap()
    }

    /// `det(V − tVᵀ)` for the Seifert matrix `V = ½[[p+q, q−1], [q+1, q+r]]`,
    /// as coefficients of `1, t, t²`.
    fn seifert_alexander(p: i64, q: i64, r: i64) -> [i64; 3] {
        let v = [[(p + q) / 2, (q - 1) / 2], [(q + 1) / 2, (q + r) / 2]];
        // entry (i,j) of V − tVᵀ is v[i][j] − t·v[j][i]
        let e = |i: usize, j: usize| [v[i][j], -v[j][i]];
        let mul = |x: [i64; 2], y: [i64; 2]| [x[0] * y[0], x[0] * y[1] + x[1] * y[0], x[1] * y[1]];
        let d = mul(e(0, 0), e(1, 1));
        let o = mul(e(0, 1), e(1, 0));
        [d[0] - o[0], d[1] - o[1], d[2] - o[2]]
    }

    #[test]
    fn normal_forms() {
        assert_eq!(
            knot(-3, 5, -7),
            PretzelKnot {
                p: 3,
                q: -5,
                r: 7,
                mirrored: true
            }
        );
        assert_eq!(
            knot(3, -5, 3),
            PretzelKnot {
                p: 3,
                q: -5,
                r: 3,
                mirrored: false
            }
        );
        assert_eq!(
            knot(5, 3, -7),
            PretzelKnot {
                p: 3,
                q: -7,
                r: 5,
                mirrored: false
            }
        );
        assert_eq!(
            knot(-5, -3, -7),
            PretzelKnot {
                p: 3,
                q: 5,
                r: 7,
                mirrored: true
            }
        );
        assert_eq!(normalize(2, 3, 5), Err(PretzelError::EvenParameter(2)));
        assert_eq!(normalize(0, 3, 5), Err(PretzelError::ZeroParameter));
    }

    #[test]
    fn determinants() {
        assert_eq!(determinant(&knot(1, -5, 1)), 9);
        assert_eq!(determinant(&knot(3, -3, 3)), 9);
        assert_eq!(determinant(&knot(3, -5, 3)), 21);
    }

    #[test]
    fn signatures() {
        assert_eq!(signature(&knot(3, -5, 3)).unwrap(), 0);
        assert_eq!(signature(&knot(3, 3, 3)).unwrap(), 2);
        assert_eq!(signature(&knot(-3, -3, -3)).unwrap(), 2);
        assert_eq!(signature(&knot(3, -3, 5)).unwrap(), 0);
        assert_eq!(signature(&knot(1, -1, 1)).unwrap(), 0);
        // P(3,-1,1): s = -3-1+3 = -1 < 0
        assert_eq!(signature(&knot(3, -1, 1)).unwrap(), 0);
    }

    #[test]
    fn alexander_matches_seifert_form() {
        for (p, q, r) in [(3, -5, 7), (3, -3, 3), (5, -3, 7), (3, 3, 3), (1, -5, 1)] {
            let k = knot(p, q, r);
            let delta = alexander_polynomial(&k);
            let oracle = seifert_alexander(k.p, k.q, k.r);
            let neg = oracle.map(|c| -c);
            assert!(
                delta.coefficients == oracle || delta.coefficients == neg,
                "{k}"
            );
            assert_eq!(delta.eval(1), 1);
            assert_eq!(delta.eval(-1).abs(), determinant(&k));
        }
        assert!(!alexander_polynomial(&knot(3, -5, 7)).is_trivial());
        assert!(alexander_polynomial(&knot(5, -3, 7)).is_trivial());
        let d = alexander_polynomial(&knot(3, -3, 3));
        assert_eq!(d.eval(-1), -9);
        assert_eq!(d.a(), Rational::from_integer(-2));
        assert_eq!(d.b(), Rational::new(-5, 2));
    }

    #[test]
    fn tau_values() {
        assert_eq!(tau(&knot(5, -3, 7)).unwrap().value, -1);
        assert_eq!(tau(&knot(3, -5, 7)).unwrap().value, 0);
        assert_eq!(tau(&knot(3, -3, 5)).unwrap().value, 0);
        let m = tau(&knot(-5, 3, -7)).unwrap();
        assert_eq!(
            m,
            TauValue {
                value: 1,
                from_mirror: true
            }
        );
    }

    #[test]
    fn ribbon() {
        assert!(ribbon_condition(&knot(3, -3, 5)));
        assert!(ribbon_condition(&knot(7, -5, 5)));
        assert!(ribbon_condition(&knot(-5, 7, 5)));
        assert!(!ribbon_condition(&knot(3, -5, 3)));
    }

    #[test]
    fn lens_spaces() {
        assert_eq!(
            two_bridge_lens(7, -3),
            LensSpace {
                order: 17,
                twist: 8
            }
        );
        assert_eq!(two_bridge_lens(1, -1), LensSpace { order: 1, twist: 2 });
        assert_eq!(
            two_bridge_lens(23, -3),
            LensSpace {
                order: 49,
                twist: 24
            }
        );
        // the ribbon knot P(23,-3,1) has a square determinant
        assert_eq!(determinant(&knot(23, -3, 1)), 49);
    }
}
