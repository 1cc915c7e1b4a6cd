//! Weighted arithmetic and harmonic means over strictly positive samples,
//! the exact closed form for the gap between them, and a sign-guarded
//! harmonic mean that stays total on arbitrary real vectors.
//!
//! Conventions used throughout:
//!
//! * weights are strictly positive and sum to one after construction,
//! * the harmonic mean is evaluated in reciprocal form
//!   `1 / sum(w_i / a_i)` with compensated summation,
//! * the gap `M - H` has the closed form
//!   `H * sum_{i<j}(w_i w_j (a_i - a_j)^2 / (a_i a_j))`, an exact identity
//!   over the reals that doubles as a second-order smallness certificate:
//!   for samples `a_i = s + O(h)` the gap is `O(h^2)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::sum::{neumaier_sum, ulp};

/// Largest tolerated deviation of a constructed weight vector's sum from one.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Strictly positive weights, renormalized on construction to sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    w: Vec<f64>,
}

impl WeightVector {
    /// Validates and renormalizes raw weights.
    ///
    /// Every entry must be finite and strictly positive, and at least two
    /// are required. After construction the entries sum to one within
    /// [`WEIGHT_SUM_TOL`].
    pub fn new(raw: &[f64]) -> Result<Self> {
        if raw.len() < 2 {
            return Err(Error::TooShort { len: raw.len(), min: 2 });
        }
        for (index, &value) in raw.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::NonPositiveWeight { index, value });
            }
        }
        let total = neumaier_sum(raw.iter().copied());
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::NonFiniteSum);
        }
        let w: Vec<f64> = raw.iter().map(|v| v / total).collect();
        debug_assert!((neumaier_sum(w.iter().copied()) - 1.0).abs() <= WEIGHT_SUM_TOL);
        Ok(Self { w })
    }

    /// Equal weights `1/n`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooShort { len: n, min: 2 });
        }
        Self::new(&vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }
}

/// A sample vector with every entry finite and strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveSample {
    a: Vec<f64>,
}

impl PositiveSample {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::TooShort { len: 0, min: 1 });
        }
        for (index, &value) in values.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::NonPositiveArgument { index, value });
            }
        }
        Ok(Self { a: values.to_vec() })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.a
    }
}

/// How the guarded harmonic mean treats argument vectors that are not
/// strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SignPolicy {
    /// Strictly one-signed vectors keep their harmonic mean (with the sign
    /// carried through); anything containing a zero or both signs collapses
    /// to zero.
    #[default]
    ClipToZero,
    /// Shift by `T = lambda * max|v_i| + ulp`, take the harmonic mean,
    /// shift back. `lambda` must be positive; values below one still shift
    /// by at least `max|v_i|` plus one ulp so every shifted entry stays
    /// strictly positive.
    Translate { lambda: f64 },
}

/// Gap report bundling both computation routes for `M - H` so callers can
/// check the identity rather than trust it.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeanGapReport {
    pub n: usize,
    pub h_w: f64,
    pub m_w: f64,
    /// `m_w - h_w`, the subtraction route.
    pub gap_direct: f64,
    /// The pair-sum closed form, which never subtracts large from large.
    pub gap_closed_form: f64,
    /// `min_i(a_i / w_i)`; the harmonic mean is strictly below this.
    pub min_bound: f64,
}

fn check_paired(a: &PositiveSample, w: &WeightVector) -> Result<()> {
    if a.len() != w.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: w.len() });
    }
    Ok(())
}

/// `sum(w_i / v_i)` over entries assumed strictly positive.
fn reciprocal_sum(v: impl Iterator<Item = f64>, w: &[f64]) -> f64 {
    neumaier_sum(w.iter().zip(v).map(|(wi, vi)| wi / vi))
}

/// Weighted arithmetic mean `sum(w_i a_i)`.
pub fn weighted_arithmetic(a: &PositiveSample, w: &WeightVector) -> Result<f64> {
    check_paired(a, w)?;
    Ok(neumaier_sum(w.as_slice().iter().zip(a.as_slice()).map(|(wi, ai)| wi * ai)))
}

/// Weighted harmonic mean `1 / sum(w_i / a_i)`.
pub fn weighted_harmonic(a: &PositiveSample, w: &WeightVector) -> Result<f64> {
    check_paired(a, w)?;
    Ok(1.0 / reciprocal_sum(a.as_slice().iter().copied(), w.as_slice()))
}

/// Strict upper bound `min_i(a_i / w_i)` for the weighted harmonic mean.
///
/// The bound is strict because every weight is positive and `n >= 2`:
/// dropping all but one term of `sum(w_j / a_j)` loses a positive amount.
pub fn min_bound(a: &PositiveSample, w: &WeightVector) -> Result<f64> {
    check_paired(a, w)?;
    let mut best = f64::INFINITY;
    for (ai, wi) in a.as_slice().iter().zip(w.as_slice()) {
        let ratio = ai / wi;
        if ratio < best {
            best = ratio;
        }
    }
    Ok(best)
}

/// Both means plus the gap computed on two independent routes.
///
/// `gap_direct` is the plain subtraction `m_w - h_w`. `gap_closed_form`
/// evaluates `sum_{i<j}(w_i w_j (a_i - a_j)^2 / (a_i a_j)) / sum_j(w_j / a_j)`,
/// a sum of nonnegative terms, so it keeps full relative accuracy even when
/// the sample is nearly constant and the subtraction route has cancelled.
pub fn mean_gap(a: &PositiveSample, w: &WeightVector) -> Result<MeanGapReport> {
    check_paired(a, w)?;
    let av = a.as_slice();
    let wv = w.as_slice();
    let n = av.len();

    let m_w = weighted_arithmetic(a, w)?;
    let recip = reciprocal_sum(av.iter().copied(), wv);
    let h_w = 1.0 / recip;

    let pair_terms = (0..n).flat_map(|i| {
        (i + 1..n).map(move |j| {
            let diff = av[i] - av[j];
            (wv[i] * wv[j]) * (diff * diff) / (av[i] * av[j])
        })
    });
    let gap_closed_form = neumaier_sum(pair_terms) / recip;

    Ok(MeanGapReport {
        n,
        h_w,
        m_w,
        gap_direct: m_w - h_w,
        gap_closed_form,
        min_bound: min_bound(a, w)?,
    })
}

/// Harmonic mean of the rescaled sample `(a_i / w_i)` under equal weights.
///
/// Equals `n * weighted_harmonic(a, w)` up to rounding, but is computed
/// literally from the rescaled sample so the two sides of that relation
/// take different floating-point routes.
pub fn scaled_uniform_harmonic(a: &PositiveSample, w: &WeightVector) -> Result<f64> {
    check_paired(a, w)?;
    let n = a.len();
    let uniform = vec![1.0 / n as f64; n];
    let rescaled = a.as_slice().iter().zip(w.as_slice()).map(|(ai, wi)| ai / wi);
    Ok(1.0 / reciprocal_sum(rescaled, &uniform))
}

/// Harmonic mean extended to arbitrary real vectors by a sign policy.
///
/// Total over real inputs: every sign pattern produces a value. Under
/// [`SignPolicy::ClipToZero`] the result is bounded by
/// `|result| <= min_i(|v_i| / w_i)`.
pub fn guarded_harmonic(v: &[f64], w: &WeightVector, policy: SignPolicy) -> Result<f64> {
    if v.len() != w.len() {
        return Err(Error::LengthMismatch { left: v.len(), right: w.len() });
    }
    match policy {
        SignPolicy::ClipToZero => {
            if v.iter().all(|&x| x > 0.0) {
                Ok(1.0 / reciprocal_sum(v.iter().copied(), w.as_slice()))
            } else if v.iter().all(|&x| x < 0.0) {
                Ok(-1.0 / reciprocal_sum(v.iter().map(|&x| -x), w.as_slice()))
            } else {
                Ok(0.0)
            }
        }
        SignPolicy::Translate { lambda } => {
            debug_assert!(lambda > 0.0, "Translate needs a positive lambda");
            let peak = v.iter().fold(0.0_f64, |acc, &x| acc.max(x.abs()));
            let shift = lambda.max(1.0) * peak + ulp(peak);
            let shifted = 1.0 / reciprocal_sum(v.iter().map(|&x| x + shift), w.as_slice());
            Ok(shifted - shift)
        }
    }
}
