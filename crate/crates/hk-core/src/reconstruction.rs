//! Fourth-order midpoint reconstruction on four-node stencils, in two
//! flavors: the plain interpolating cubic, and a nonlinear variant that
//! replaces the arithmetic combination of the stencil's two curvature
//! indicators with a sign-guarded harmonic one.
//!
//! The cubic's midpoint value splits exactly as
//!
//! ```text
//! p(m) = (f1 + f2)/2 + C * (w1 d1 + w2 d2)
//! C  = -h2^2 / 8
//! w1 = (h2/2 + h3) / (h1 + h2 + h3)
//! w2 = (h1 + h2/2) / (h1 + h2 + h3)
//! ```
//!
//! where `h_k` are the consecutive spacings, `m` the midpoint of the central
//! interval, and `d_1, d_2` twice the second divided differences at the two
//! inner nodes (on a uniform grid, the familiar `(f_{j-1} - 2 f_j +
//! f_{j+1}) / h^2`). The nonlinear operator keeps the affine part and the
//! coupling `C` but pushes the indicators through the guarded harmonic mean,
//! which is bounded by `min(|d_i| / w_i)`. Near a jump one indicator blows up
//! like `1/h^2` while the harmonic combination stays order-one, so the
//! nonlinear prediction never leaves the data range; on smooth data the
//! harmonic and arithmetic combinations differ by `O(h^2)` and fourth-order
//! accuracy survives wherever the second derivative stays away from zero.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::means::{self, SignPolicy, WeightVector};
use crate::sum::log2;

/// Base interval count at refinement level zero in [`convergence_order`].
pub const BASE_INTERVALS: usize = 16;

fn check_abscissae(x: &[f64]) -> Result<()> {
    for i in 0..x.len() {
        if !x[i].is_finite() || (i > 0 && x[i] <= x[i - 1]) {
            return Err(Error::NonMonotoneGrid { index: i });
        }
    }
    Ok(())
}

/// Four nodes with strictly increasing abscissae; predictions target the
/// midpoint of the central interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    x: [f64; 4],
    f: [f64; 4],
}

impl Stencil {
    pub fn new(x: [f64; 4], f: [f64; 4]) -> Result<Self> {
        check_abscissae(&x)?;
        Ok(Self { x, f })
    }

    pub fn x(&self) -> &[f64; 4] {
        &self.x
    }

    pub fn f(&self) -> &[f64; 4] {
        &self.f
    }

    /// Midpoint of the central interval.
    pub fn target(&self) -> f64 {
        0.5 * (self.x[1] + self.x[2])
    }
}

/// Sampled function on a strictly increasing grid of at least four nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    x: Vec<f64>,
    f: Vec<f64>,
}

impl GridFunction {
    pub fn new(x: &[f64], f: &[f64]) -> Result<Self> {
        if x.len() != f.len() {
            return Err(Error::LengthMismatch { left: x.len(), right: f.len() });
        }
        if x.len() < 4 {
            return Err(Error::TooShort { len: x.len(), min: 4 });
        }
        check_abscissae(x)?;
        Ok(Self { x: x.to_vec(), f: f.to_vec() })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    fn stencil(&self, j: usize) -> Stencil {
        Stencil {
            x: [self.x[j - 1], self.x[j], self.x[j + 1], self.x[j + 2]],
            f: [self.f[j - 1], self.f[j], self.f[j + 1], self.f[j + 2]],
        }
    }
}

/// Twice the second divided difference at each interior node; length is two
/// less than the grid. On a uniform grid this is the plain second-difference
/// quotient `(f_{j-1} - 2 f_j + f_{j+1}) / h^2`.
pub fn second_differences(g: &GridFunction) -> Vec<f64> {
    let (x, f) = (g.x(), g.f());
    (1..g.len() - 1)
        .map(|j| {
            let left = (f[j] - f[j - 1]) / (x[j] - x[j - 1]);
            let right = (f[j + 1] - f[j]) / (x[j + 1] - x[j]);
            2.0 * (right - left) / (x[j + 1] - x[j - 1])
        })
        .collect()
}

/// Interpolating-cubic value at the stencil's target midpoint, via Newton
/// divided differences. On the uniform grid this is the classical
/// `(-f0 + 9 f1 + 9 f2 - f3) / 16` rule.
pub fn baseline_midpoint(s: &Stencil) -> f64 {
    let (x, f) = (s.x, s.f);
    let c1 = (f[1] - f[0]) / (x[1] - x[0]);
    let c1b = (f[2] - f[1]) / (x[2] - x[1]);
    let c1c = (f[3] - f[2]) / (x[3] - x[2]);
    let c2 = (c1b - c1) / (x[2] - x[0]);
    let c2b = (c1c - c1b) / (x[3] - x[1]);
    let c3 = (c2b - c2) / (x[3] - x[0]);
    let t = s.target();
    f[0] + (t - x[0]) * (c1 + (t - x[1]) * (c2 + (t - x[2]) * c3))
}

/// The exact midpoint split of the interpolating cubic.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// `(f1 + f2) / 2`.
    pub affine_part: f64,
    /// `-h2^2 / 8`.
    pub coupling: f64,
    /// Spacing-determined convex weights of the two indicators.
    pub weights: WeightVector,
    /// Twice the second divided differences at the two inner nodes.
    pub indicators: [f64; 2],
}

impl Decomposition {
    /// Affine part plus coupling times the weighted arithmetic combination;
    /// reproduces [`baseline_midpoint`] up to rounding.
    pub fn reassemble(&self) -> f64 {
        let w = self.weights.as_slice();
        self.affine_part
            + self.coupling * (w[0] * self.indicators[0] + w[1] * self.indicators[1])
    }

    /// Affine part plus coupling times the guarded harmonic combination.
    pub fn nonlinear(&self, policy: SignPolicy) -> f64 {
        let blended = means::guarded_harmonic(&self.indicators, &self.weights, policy)
            .expect("two indicators, two weights");
        self.affine_part + self.coupling * blended
    }
}

/// Splits the stencil's cubic midpoint value into affine part, coupling, and
/// weighted curvature indicators.
pub fn decompose(s: &Stencil) -> Decomposition {
    let (x, f) = (s.x, s.f);
    let h1 = x[1] - x[0];
    let h2 = x[2] - x[1];
    let h3 = x[3] - x[2];

    let d1 = 2.0 * (((f[2] - f[1]) / h2 - (f[1] - f[0]) / h1) / (h1 + h2));
    let d2 = 2.0 * (((f[3] - f[2]) / h3 - (f[2] - f[1]) / h2) / (h2 + h3));

    Decomposition {
        affine_part: 0.5 * (f[1] + f[2]),
        coupling: -h2 * h2 / 8.0,
        weights: WeightVector::new(&[0.5 * h2 + h3, h1 + 0.5 * h2])
            .expect("positive spacings give positive weights"),
        indicators: [d1, d2],
    }
}

/// Nonlinear midpoint prediction: the cubic's affine part and coupling with
/// the indicators blended harmonically under the sign policy.
pub fn pph_midpoint(s: &Stencil, policy: SignPolicy) -> f64 {
    decompose(s).nonlinear(policy)
}

/// Which midpoint operator to run over a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Operator {
    /// Interpolating cubic.
    Linear,
    /// Sign-guarded harmonic blend.
    Pph,
}

/// Midpoints of the interior intervals that have a full stencil: one per
/// interval `(x_j, x_{j+1})` for `j` from 1 to `len - 3`.
pub fn interior_midpoints(g: &GridFunction) -> Vec<f64> {
    let x = g.x();
    (1..g.len() - 2).map(|j| 0.5 * (x[j] + x[j + 1])).collect()
}

/// Midpoint predictions over every interior interval; the two boundary
/// intervals have no full stencil and are skipped. Length is `len - 3`.
pub fn reconstruct(g: &GridFunction, op: Operator, policy: SignPolicy) -> Vec<f64> {
    (1..g.len() - 2)
        .map(|j| {
            let s = g.stencil(j);
            match op {
                Operator::Linear => baseline_midpoint(&s),
                Operator::Pph => pph_midpoint(&s, policy),
            }
        })
        .collect()
}

/// Worst excursion of the predictions beyond `[lower, upper]`; zero when all
/// predictions stay inside.
pub fn overshoot_metric(predictions: &[f64], lower: f64, upper: f64) -> f64 {
    let mut worst = 0.0_f64;
    for &p in predictions {
        worst = worst.max(p - upper).max(lower - p);
    }
    worst.max(0.0)
}

/// One refinement level of a convergence study.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OrderRow {
    pub level: usize,
    pub intervals: usize,
    pub h: f64,
    /// Max-norm prediction error at the interior midpoints.
    pub max_error: f64,
    /// `log2(previous error / this error)`; `None` on the first level or
    /// when an error vanishes.
    pub slope: Option<f64>,
}

/// Dyadic refinement study of a midpoint operator against a known function.
/// Level `l` uses `BASE_INTERVALS * 2^l` equal intervals over the domain.
pub fn convergence_order(
    f: &dyn Fn(f64) -> f64,
    domain: (f64, f64),
    levels: usize,
    op: Operator,
    policy: SignPolicy,
) -> Result<Vec<OrderRow>> {
    let (lo, hi) = domain;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::NonMonotoneGrid { index: 1 });
    }
    let mut rows: Vec<OrderRow> = Vec::with_capacity(levels);
    for level in 0..levels {
        let intervals = BASE_INTERVALS << level;
        let h = (hi - lo) / intervals as f64;
        let x: Vec<f64> = (0..=intervals).map(|j| lo + j as f64 * h).collect();
        let fx: Vec<f64> = x.iter().map(|&xi| f(xi)).collect();
        let g = GridFunction::new(&x, &fx)?;
        let preds = reconstruct(&g, op, policy);
        let max_error = interior_midpoints(&g)
            .iter()
            .zip(&preds)
            .fold(0.0_f64, |acc, (&m, &p)| acc.max((p - f(m)).abs()));
        let slope = rows.last().and_then(|prev: &OrderRow| {
            (prev.max_error > 0.0 && max_error > 0.0)
                .then(|| log2(prev.max_error / max_error))
        });
        rows.push(OrderRow { level, intervals, h, max_error, slope });
    }
    Ok(rows)
}

/// Side-by-side run of both operators over one grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReconReport {
    pub midpoints: Vec<f64>,
    pub linear: Vec<f64>,
    pub pph: Vec<f64>,
    pub data_min: f64,
    pub data_max: f64,
    /// Excursion of each prediction set beyond the data range.
    pub linear_overshoot: f64,
    pub pph_overshoot: f64,
}

/// Runs both operators on the same grid and measures how far each
/// prediction set leaves the data range.
///
/// ```
/// use hk_core::{compare_operators, GridFunction, SignPolicy};
///
/// let x: Vec<f64> = (0..=8).map(|j| j as f64 / 8.0).collect();
/// let f: Vec<f64> = x.iter().map(|&xi| if xi < 0.5 { 0.0 } else { 1.0 }).collect();
/// let g = GridFunction::new(&x, &f)?;
///
/// let report = compare_operators(&g, SignPolicy::default());
/// assert!(report.linear_overshoot > 0.0);
/// assert_eq!(report.pph_overshoot, 0.0);
/// # Ok::<(), hk_core::Error>(())
/// ```
pub fn compare_operators(g: &GridFunction, policy: SignPolicy) -> ReconReport {
    let linear = reconstruct(g, Operator::Linear, policy);
    let pph = reconstruct(g, Operator::Pph, policy);
    let data_min = g.f().iter().copied().fold(f64::INFINITY, f64::min);
    let data_max = g.f().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    ReconReport {
        midpoints: interior_midpoints(g),
        linear_overshoot: overshoot_metric(&linear, data_min, data_max),
        pph_overshoot: overshoot_metric(&pph, data_min, data_max),
        linear,
        pph,
        data_min,
        data_max,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_grid(n: usize, f: impl Fn(f64) -> f64) -> GridFunction {
        let x: Vec<f64> = (0..=n).map(|j| j as f64 / n as f64).collect();
        let fx: Vec<f64> = x.iter().map(|&xi| f(xi)).collect();
        GridFunction::new(&x, &fx).unwrap()
    }

    #[test]
    fn stencil_rejects_unordered_nodes() {
        assert!(matches!(
            Stencil::new([0.0, 1.0, 1.0, 2.0], [0.0; 4]),
            Err(Error::NonMonotoneGrid { index: 2 })
        ));
        assert!(matches!(
            Stencil::new([0.0, f64::NAN, 2.0, 3.0], [0.0; 4]),
            Err(Error::NonMonotoneGrid { index: 1 })
        ));
    }

    #[test]
    fn third_difference_impulse_midpoint() {
        let s = Stencil::new([0.0, 1.0, 2.0, 3.0], [0.0, 0.0, 0.0, 1.0]).unwrap();
        let baseline = baseline_midpoint(&s);
        assert!((baseline - (-1.0 / 16.0)).abs() <= 1e-16);
        // Indicators are (0, 1): one-sided with a zero, so the guarded blend
        // clips and the nonlinear prediction is exactly the affine part.
        assert_eq!(pph_midpoint(&s, SignPolicy::ClipToZero), 0.0);
    }

    #[test]
    fn uniform_split_weights_are_halves() {
        let s = Stencil::new([0.0, 0.25, 0.5, 0.75], [1.0, 2.0, 0.5, 3.0]).unwrap();
        let d = decompose(&s);
        assert_eq!(d.weights.as_slice(), &[0.5, 0.5]);
        assert_eq!(d.coupling, -0.25 * 0.25 / 8.0);
    }

    #[test]
    fn nonuniform_split_matches_frozen_values() {
        // Spacings (1, 2, 1): coupling -1/2 and equal indicator weights.
        let s = Stencil::new([0.0, 1.0, 3.0, 4.0], [0.0, 1.0, 27.0, 64.0]).unwrap();
        let d = decompose(&s);
        assert_eq!(d.coupling, -0.5);
        assert_eq!(d.weights.as_slice(), &[0.5, 0.5]);
        assert_eq!(d.indicators, [8.0, 16.0]);
        let baseline = baseline_midpoint(&s);
        assert!((baseline - 8.0).abs() <= 1e-13 * 8.0);
        assert!((d.reassemble() - baseline).abs() <= 1e-13 * baseline.abs());
    }

    #[test]
    fn split_identity_on_random_style_stencils() {
        let stencils = [
            ([0.0, 0.3, 1.1, 1.4], [2.0, -1.0, 0.5, 3.0]),
            ([-2.0, -0.5, 0.25, 2.0], [1.0, 1.0, -4.0, 0.125]),
            ([0.1, 0.2, 0.4, 0.8], [0.3, 0.9, 0.8, 0.7]),
        ];
        for (x, f) in stencils {
            let s = Stencil::new(x, f).unwrap();
            let baseline = baseline_midpoint(&s);
            let reassembled = decompose(&s).reassemble();
            let scale = baseline.abs().max(1.0);
            assert!((reassembled - baseline).abs() <= 1e-13 * scale);
        }
    }

    #[test]
    fn quadratic_data_makes_both_operators_identical() {
        // Dyadic grid and dyadic squares: every intermediate quantity is
        // exact, the indicators coincide, and the harmonic blend equals the
        // arithmetic one bit for bit.
        let g = uniform_grid(16, |x| x * x);
        let linear = reconstruct(&g, Operator::Linear, SignPolicy::ClipToZero);
        let pph = reconstruct(&g, Operator::Pph, SignPolicy::ClipToZero);
        assert_eq!(linear, pph);
        for (m, p) in interior_midpoints(&g).iter().zip(&linear) {
            assert_eq!(*p, m * m);
        }
    }

    #[test]
    fn step_predictions_localize_overshoot() {
        let g = uniform_grid(32, |x| if x < 0.5 { 0.0 } else { 1.0 });
        let report = compare_operators(&g, SignPolicy::ClipToZero);
        assert!((report.linear_overshoot - 1.0 / 16.0).abs() <= 1e-14);
        assert_eq!(report.pph_overshoot, 0.0);
        // The cubic leaves the range only on the two stencils straddling the
        // jump; the guarded blend stays inside everywhere.
        for p in &report.pph {
            assert!(*p >= 0.0 && *p <= 1.0);
        }
    }

    #[test]
    fn reconstruct_skips_boundary_intervals() {
        let g = uniform_grid(8, |x| x);
        assert_eq!(reconstruct(&g, Operator::Linear, SignPolicy::ClipToZero).len(), 6);
        assert_eq!(interior_midpoints(&g).len(), 6);
    }

    #[test]
    fn overshoot_metric_cases() {
        assert_eq!(overshoot_metric(&[0.2, 0.8], 0.0, 1.0), 0.0);
        assert_eq!(overshoot_metric(&[1.25], 0.0, 1.0), 0.25);
        assert_eq!(overshoot_metric(&[-0.5, 0.5], 0.0, 1.0), 0.5);
        assert_eq!(overshoot_metric(&[], 0.0, 1.0), 0.0);
    }

    #[test]
    fn smooth_sine_improves_at_fourth_order() {
        let f = |x: f64| x.sin();
        for op in [Operator::Linear, Operator::Pph] {
            let rows =
                convergence_order(&f, (0.6, 2.5), 3, op, SignPolicy::ClipToZero).unwrap();
            let last = rows.last().unwrap();
            let slope = last.slope.unwrap();
            assert!(
                (slope - 4.0).abs() <= 0.35,
                "slope {slope} for {op:?} rows {rows:?}"
            );
        }
    }

    #[test]
    fn translate_and_clip_agree_at_second_order_on_smooth_data() {
        // One-signed indicators: the policies differ only through the blend,
        // and that difference shrinks at least quadratically under
        // refinement.
        let diff = |n: usize| {
            let g = uniform_grid(n, |x| (x + 0.5).ln());
            let clip = reconstruct(&g, Operator::Pph, SignPolicy::ClipToZero);
            let translate =
                reconstruct(&g, Operator::Pph, SignPolicy::Translate { lambda: 1.0 });
            clip.iter()
                .zip(&translate)
                .fold(0.0_f64, |acc, (c, t)| acc.max((c - t).abs()))
        };
        let coarse = diff(32);
        let fine = diff(64);
        assert!(coarse > 0.0 && fine > 0.0);
        let slope = log2(coarse / fine);
        assert!(slope >= 2.0, "policies drift apart: slope {slope}");
    }

    #[test]
    fn grid_function_validation() {
        assert!(matches!(
            GridFunction::new(&[0.0, 1.0, 2.0], &[0.0, 0.0, 0.0]),
            Err(Error::TooShort { len: 3, min: 4 })
        ));
        assert!(matches!(
            GridFunction::new(&[0.0, 1.0, 2.0, 3.0], &[0.0, 0.0, 0.0]),
            Err(Error::LengthMismatch { left: 4, right: 3 })
        ));
        let g = GridFunction::new(&[0.0, 1.0, 2.0, 3.0], &[1.0; 4]).unwrap();
        assert_eq!(g.len(), 4);
    }

    #[test]
    fn convergence_rejects_bad_domains() {
        let f = |x: f64| x;
        assert!(convergence_order(&f, (2.0, 1.0), 2, Operator::Linear, SignPolicy::ClipToZero)
            .is_err());
    }
}
