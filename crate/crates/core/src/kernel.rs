//! Coefficients of the fractional centered difference.
//!
//! For `1 < alpha <= 2` the Riesz derivative is approximated to second order by
//!
//! ```text
//!   -(1/h^alpha) * sum_k c_k u(x - k h),
//!   c_k = (-1)^k Γ(alpha+1) / (Γ(alpha/2 - k + 1) Γ(alpha/2 + k + 1)).
//! ```
//!
//! Evaluating the Gamma quotient directly overflows for moderate `k` and the
//! reflected form loses digits to cancellation in `lnΓ`. Instead `c_0` is taken
//! from log-Gamma and every further coefficient from the ratio
//! `c_{k+1} / c_k = (k - alpha/2) / (k + alpha/2 + 1)`, carried in double-double
//! arithmetic so that rounding does not accumulate along the recurrence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Order `alpha` of the fractional Laplacian, restricted to `1 < alpha <= 2`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 1.0 && alpha <= 2.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidOrder(alpha))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `alpha == 2` reduces the operator to the classical three-point Laplacian.
    pub fn is_classical(self) -> bool {
        self.0 == 2.0
    }
}

impl TryFrom<f64> for FractionalOrder {
    type Error = Error;

    fn try_from(alpha: f64) -> Result<Self> {
        Self::new(alpha)
    }
}

impl From<FractionalOrder> for f64 {
    fn from(alpha: FractionalOrder) -> f64 {
        alpha.0
    }
}

impl std::fmt::Display for FractionalOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One-sided coefficient sequence `c_0, c_1, ..., c_{len-1}`; `c_{-k} = c_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolKernel {
    alpha: FractionalOrder,
    coeffs: Vec<f64>,
}

impl SymbolKernel {
    pub fn generate(alpha: FractionalOrder, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidConfig("kernel length must be at least 1".into()));
        }
        let a = alpha.value();
        let half = 0.5 * a;
        let c0 = (libm::lgamma(a + 1.0) - 2.0 * libm::lgamma(half + 1.0)).exp();

        let mut coeffs = Vec::with_capacity(len);
        coeffs.push(c0);
        let mut c = DoubleDouble::from(c0);
        for k in 0..len - 1 {
            let k = k as f64;
            let num = DoubleDouble::sum(k, -half);
            let den = DoubleDouble::sum(k, half).add_f64(1.0);
            c = c.mul(num).div(den);
            coeffs.push(c.to_f64());
        }
        Ok(Self { alpha, coeffs })
    }

    pub fn alpha(&self) -> FractionalOrder {
        self.alpha
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient at signed offset `k`, zero outside the stored range.
    #[inline]
    pub fn get(&self, k: isize) -> f64 {
        self.coeffs.get(k.unsigned_abs()).copied().unwrap_or(0.0)
    }
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }
}

impl DoubleDouble {
    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Self { hi: s, lo: err }
    }

    fn quick_two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        Self { hi: s, lo: b - (s - a) }
    }

    fn sum(a: f64, b: f64) -> Self {
        Self::two_sum(a, b)
    }

    fn add_f64(self, b: f64) -> Self {
        let s = Self::two_sum(self.hi, b);
        Self::quick_two_sum(s.hi, s.lo + self.lo)
    }

    fn mul(self, other: Self) -> Self {
        let p = self.hi * other.hi;
        let err = self.hi.mul_add(other.hi, -p);
        let lo = err + (self.hi * other.lo + self.lo * other.hi);
        Self::quick_two_sum(p, lo)
    }

    fn div(self, other: Self) -> Self {
        let q1 = self.hi / other.hi;
        // remainder self - q1 * other, exact up to the low-order terms
        let p = other.hi * q1;
        let p_err = other.hi.mul_add(q1, -p);
        let r = Self::two_sum(self.hi, -p);
        let r_lo = r.lo - p_err + self.lo - q1 * other.lo;
        let q2 = (r.hi + r_lo) / other.hi;
        Self::quick_two_sum(q1, q2)
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}
