//! Exact rational reference implementations for the mean/geometry/reconstruction
//! stack, used by test suites to pin expected values and verify identities that
//! hold exactly over the rationals.
//!
//! Everything here is deliberately written on independent algebraic routes from
//! the floating-point library code: harmonic means use the product form rather
//! than the reciprocal form, and cubic interpolation uses the Lagrange basis
//! rather than Newton divided differences. Agreement between the two routes is
//! then meaningful evidence, not a tautology.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
// Re-exported so dependents can test exact values for zero without naming
// num-traits themselves.
pub use num_traits::Zero;

pub type Q = BigRational;

/// Exact rational value of a finite f64.
///
/// Panics on NaN or infinity: those are test-harness bugs, not data.
pub fn q(x: f64) -> Q {
    Q::from_float(x).expect("finite float required")
}

/// Integer fraction helper for literals in tests.
pub fn qr(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Nearest f64 to an exact rational.
pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().expect("rational out of f64 range")
}

pub fn qsum<'a>(terms: impl Iterator<Item = &'a Q>) -> Q {
    terms.fold(Q::zero(), |acc, t| acc + t)
}

/// Renormalizes positive weights so they sum to one exactly.
pub fn normalize_weights(raw: &[Q]) -> Vec<Q> {
    assert!(raw.len() >= 2, "need at least two weights");
    assert!(raw.iter().all(|w| w.is_positive()), "weights must be positive");
    let s = qsum(raw.iter());
    raw.iter().map(|w| w / &s).collect()
}

/// Integer numerators of the values over one shared (positive) denominator.
///
/// The mean formulas below run their sums and products on these integers
/// and divide out the denominator lattice once at the end. Rational
/// arithmetic would instead gcd-reduce after every partial sum, which is
/// quadratically expensive in the operand width and dominates test time.
fn common_denominator(vals: &[Q]) -> (Vec<BigInt>, BigInt) {
    let den = vals.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let nums = vals.iter().map(|v| v.numer() * (&den / v.denom())).collect();
    (nums, den)
}

/// For each index i, the product of all entries except v_i.
fn products_excluding_one(v: &[BigInt]) -> Vec<BigInt> {
    let n = v.len();
    let mut prefix = vec![BigInt::one(); n + 1];
    for i in 0..n {
        prefix[i + 1] = &prefix[i] * &v[i];
    }
    let mut suffix = vec![BigInt::one(); n + 1];
    for i in (0..n).rev() {
        suffix[i] = &suffix[i + 1] * &v[i];
    }
    (0..n).map(|i| &prefix[i] * &suffix[i + 1]).collect()
}

/// Weighted arithmetic mean sum(w_i a_i).
pub fn arithmetic_mean(a: &[Q], w: &[Q]) -> Q {
    assert_eq!(a.len(), w.len());
    let (an, ad) = common_denominator(a);
    let (wn, wd) = common_denominator(w);
    let num: BigInt = an.iter().zip(&wn).map(|(x, y)| x * y).sum();
    Q::new(num, ad * wd)
}

/// Weighted harmonic mean in product form:
/// prod(a_k) / sum_i(w_i prod_{k != i} a_k).
pub fn harmonic_mean(a: &[Q], w: &[Q]) -> Q {
    assert_eq!(a.len(), w.len());
    let (an, ad) = common_denominator(a);
    let (wn, wd) = common_denominator(w);
    let excl = products_excluding_one(&an);
    let full = &excl[0] * &an[0];
    let den: BigInt = wn.iter().zip(&excl).map(|(wi, pi)| wi * pi).sum();
    // full/ad^n divided by den/(wd ad^(n-1)).
    Q::new(full * wd, ad * den)
}

/// Gap between the means as the explicit pair-sum identity:
/// sum_{i<j}(w_i w_j (a_i - a_j)^2 prod_{k != i,j} a_k) / sum_j(w_j prod_{k != j} a_k).
pub fn gap_closed_form(a: &[Q], w: &[Q]) -> Q {
    assert_eq!(a.len(), w.len());
    let n = a.len();
    let (an, ad) = common_denominator(a);
    let (wn, wd) = common_denominator(w);
    let mut prefix = vec![BigInt::one(); n + 1];
    for i in 0..n {
        prefix[i + 1] = &prefix[i] * &an[i];
    }
    let mut suffix = vec![BigInt::one(); n + 1];
    for i in (0..n).rev() {
        suffix[i] = &suffix[i + 1] * &an[i];
    }
    let mut num = BigInt::zero();
    for i in 0..n {
        // Running product of an[i+1..j]; with prefix and suffix it forms
        // prod_{k != i,j} a_k by multiplication alone.
        let mut mid = BigInt::one();
        for j in (i + 1)..n {
            let pair_prod = &prefix[i] * &mid * &suffix[j + 1];
            let diff = &an[i] - &an[j];
            num += &wn[i] * &wn[j] * &diff * &diff * pair_prod;
            mid *= &an[j];
        }
    }
    let excl: Vec<BigInt> = (0..n).map(|i| &prefix[i] * &suffix[i + 1]).collect();
    let den: BigInt = wn.iter().zip(&excl).map(|(wi, pi)| wi * pi).sum();
    // num/(wd^2 ad^n) divided by den/(wd ad^(n-1)).
    Q::new(num, wd * ad * den)
}

/// Strict upper bound for the harmonic mean: min_i(a_i / w_i).
pub fn min_bound(a: &[Q], w: &[Q]) -> Q {
    assert_eq!(a.len(), w.len());
    a.iter()
        .zip(w)
        .map(|(ai, wi)| ai / wi)
        .min()
        .expect("nonempty sample")
}

/// Abscissa of the 2D parabola intersection: w1 a2 / (w1 a2 + w2 a1).
pub fn intersection_abscissa(a1: &Q, a2: &Q, w1: &Q, w2: &Q) -> Q {
    let num = w1 * a2;
    &num / (&num + w2 * a1)
}

/// Ordinate of the 2D parabola intersection for the given construction case.
/// Case 1 scales a1 x_H by w2/w1, case 2 leaves it unscaled, case 3 halves
/// the harmonic mean (a1 x_H = w1 H, so a1 x_H / (2 w1) = H / 2).
pub fn intersection_ordinate(case: u8, a1: &Q, w1: &Q, w2: &Q, x_h: &Q) -> Q {
    let base = a1 * x_h;
    match case {
        1 => base * (w2 / w1),
        2 => base,
        3 => base / (qi(2) * w1),
        _ => panic!("case must be 1, 2, or 3"),
    }
}

/// Height of the chord x -> a2 + (a1 - a2) x.
pub fn chord(a1: &Q, a2: &Q, x: &Q) -> Q {
    a2 + (a1 - a2) * x
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Cap {
    Plane,
    Paraboloid,
}

/// Base coordinates plus height of the common intersection point.
/// Components i < n-1 are w_i H / a_i; the last is w_n H for the plane cap
/// and H / n for the paraboloid cap.
pub fn x_bar(a: &[Q], w: &[Q], cap: Cap) -> Vec<Q> {
    let n = a.len();
    let h = harmonic_mean(a, w);
    let mut out: Vec<Q> = (0..n - 1).map(|i| &w[i] * &h / &a[i]).collect();
    out.push(match cap {
        Cap::Plane => &w[n - 1] * &h,
        Cap::Paraboloid => h / qi(n as i64),
    });
    out
}

/// Quadratic coefficients b_i of the axis surfaces
/// x_n = b_i x_i^2 + (a_i - b_i) x_i for i < n-1.
pub fn axis_coefficients(a: &[Q], w: &[Q], cap: Cap) -> Vec<Q> {
    let n = a.len();
    let h = harmonic_mean(a, w);
    let xb = x_bar(a, w, cap);
    (0..n - 1)
        .map(|i| {
            let target = match cap {
                Cap::Plane => &w[n - 1] - &w[i],
                Cap::Paraboloid => qr(1, n as i64) - &w[i],
            };
            &h * target / (&xb[i] * (&xb[i] - Q::one()))
        })
        .collect()
}

/// Quadratic coefficients c_i of the paraboloid cap
/// x_n = a_n + sum_i(c_i x_i^2 - (c_i + a_n) x_i).
pub fn cap_coefficients(a: &[Q], w: &[Q]) -> Vec<Q> {
    let n = a.len();
    let h = harmonic_mean(a, w);
    let xb = x_bar(a, w, Cap::Paraboloid);
    let base_sum = qsum(xb[..n - 1].iter());
    let shared = &h / qi(n as i64) + (base_sum - Q::one()) * &a[n - 1];
    (0..n - 1)
        .map(|i| &shared / (qi(n as i64 - 1) * &xb[i] * (&xb[i] - Q::one())))
        .collect()
}

/// Signed residuals, in x_n units, of every scene surface at the exact
/// intersection point. All must be zero; tests assert that.
pub fn scene_residuals_at_x_bar(a: &[Q], w: &[Q], cap: Cap) -> Vec<Q> {
    let n = a.len();
    let xb = x_bar(a, w, cap);
    let b = axis_coefficients(a, w, cap);
    let xn = &xb[n - 1];
    let mut res: Vec<Q> = (0..n - 1)
        .map(|i| xn - (&b[i] * &xb[i] * &xb[i] + (&a[i] - &b[i]) * &xb[i]))
        .collect();
    let base_sum = qsum(xb[..n - 1].iter());
    match cap {
        Cap::Plane => {
            res.push(xn - &a[n - 1] * (Q::one() - base_sum));
        }
        Cap::Paraboloid => {
            let c = cap_coefficients(a, w);
            let mut val = a[n - 1].clone();
            for i in 0..n - 1 {
                val += &c[i] * &xb[i] * &xb[i] - (&c[i] + &a[n - 1]) * &xb[i];
            }
            res.push(xn - val);
        }
    }
    res
}

/// Height of the interpolating hyperplane x_n = h_n + sum_i x_i (h_i - h_n)
/// over a base point, where h_i are the vertex heights.
pub fn hyperplane_at(heights: &[Q], base: &[Q]) -> Q {
    let n = heights.len();
    assert_eq!(base.len(), n - 1);
    let hn = &heights[n - 1];
    let mut val = hn.clone();
    for i in 0..n - 1 {
        val += &base[i] * (&heights[i] - hn);
    }
    val
}

/// Cubic through four points evaluated in the Lagrange basis.
pub fn lagrange_cubic(xs: &[Q; 4], fs: &[Q; 4], at: &Q) -> Q {
    let mut acc = Q::zero();
    for i in 0..4 {
        let mut basis = Q::one();
        for j in 0..4 {
            if j != i {
                basis *= (at - &xs[j]) / (&xs[i] - &xs[j]);
            }
        }
        acc += &fs[i] * basis;
    }
    acc
}

/// Midpoint value of the cubic via the affine/coupling/indicator split:
/// (f1 + f2)/2 + C (w1 d1 + w2 d2) with C = -h2^2/8,
/// w1 = (h2/2 + h3)/(h1 + h2 + h3), w2 = (h1 + h2/2)/(h1 + h2 + h3),
/// d_j twice the second divided difference at the inner nodes.
pub fn split_cubic_midpoint(xs: &[Q; 4], fs: &[Q; 4]) -> Q {
    let h1 = &xs[1] - &xs[0];
    let h2 = &xs[2] - &xs[1];
    let h3 = &xs[3] - &xs[2];
    let two = qi(2);
    let d1 = ((&fs[2] - &fs[1]) / &h2 - (&fs[1] - &fs[0]) / &h1) * &two / (&h1 + &h2);
    let d2 = ((&fs[3] - &fs[2]) / &h3 - (&fs[2] - &fs[1]) / &h2) * &two / (&h2 + &h3);
    let span = &h1 + &h2 + &h3;
    let w1 = (&h2 / &two + &h3) / &span;
    let w2 = (&h1 + &h2 / &two) / &span;
    let c = -(&h2 * &h2) / qi(8);
    (&fs[1] + &fs[2]) / two + c * (w1 * d1 + w2 * d2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_conversion_roundtrips() {
        for &x in &[0.1, 0.7, 1.0 / 3.0, 14.0, 1e-6, 123.456e3] {
            assert_eq!(to_f64(&q(x)), x);
        }
    }

    #[test]
    fn to_f64_survives_huge_components() {
        // Ratio with several-hundred-bit numerator and denominator but a
        // desk-scale value.
        let big = BigInt::from(3).pow(400u32);
        let r = Q::new(&big * BigInt::from(7), big * BigInt::from(2));
        assert_eq!(to_f64(&r), 3.5);
    }

    #[test]
    fn product_form_matches_reciprocal_form() {
        let a = [q(2.0), q(3.0), q(5.0)];
        let w = normalize_weights(&[q(1.0), q(2.0), q(3.0)]);
        let h = harmonic_mean(&a, &w);
        let recip = qsum(w.iter().zip(&a).map(|(wi, ai)| wi / ai).collect::<Vec<_>>().iter());
        assert_eq!(h, Q::one() / recip);
    }

    #[test]
    fn gap_identity_holds_exactly() {
        let a = [q(1.5), q(2.25), q(8.0), q(0.125)];
        let w = normalize_weights(&[q(0.3), q(0.4), q(0.2), q(0.6)]);
        let direct = arithmetic_mean(&a, &w) - harmonic_mean(&a, &w);
        assert_eq!(direct, gap_closed_form(&a, &w));
    }

    #[test]
    fn scene_residuals_vanish() {
        let a = [q(3.0), q(4.0), q(6.0)];
        let w = normalize_weights(&[q(0.2), q(0.2), q(0.6)]);
        for cap in [Cap::Plane, Cap::Paraboloid] {
            for r in scene_residuals_at_x_bar(&a, &w, cap) {
                assert!(r.is_zero());
            }
        }
    }

    #[test]
    fn split_matches_lagrange() {
        let xs = [qi(0), qi(1), qi(3), qi(4)];
        let fs = [qi(0), qi(1), qi(27), qi(64)];
        let mid = (&xs[1] + &xs[2]) / qi(2);
        assert_eq!(split_cubic_midpoint(&xs, &fs), lagrange_cubic(&xs, &fs, &mid));
        assert_eq!(lagrange_cubic(&xs, &fs, &mid), qi(8));
    }
}
