//! Compensated accumulation helpers shared by the mean and geometry code.

/// Neumaier variant of Kahan summation. One rounding beyond exact for the
/// final fold, which keeps desk-scale sums stable enough that reordering
/// positive terms does not move the result.
pub(crate) fn neumaier_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for t in terms {
        let next = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - next) + t;
        } else {
            comp += (t - next) + sum;
        }
        sum = next;
    }
    sum + comp
}

/// Unit in the last place of |x|, used to build strictly positive margins.
/// Zero and subnormal inputs get the smallest positive normal spacing.
pub(crate) fn ulp(x: f64) -> f64 {
    let ax = x.abs();
    if !ax.is_finite() {
        return f64::NAN;
    }
    if ax < f64::MIN_POSITIVE {
        return f64::MIN_POSITIVE;
    }
    f64::from_bits(ax.to_bits() + 1) - ax
}

#[cfg(feature = "std")]
pub(crate) fn log2(x: f64) -> f64 {
    x.log2()
}

#[cfg(all(not(feature = "std"), feature = "libm"))]
pub(crate) fn log2(x: f64) -> f64 {
    libm::log2(x)
}
