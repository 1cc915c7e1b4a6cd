//! Geometric realization of the weighted means: both means appear as heights
//! inside the unit prism over the base simplex.
//!
//! In 2D, two one-signed quadratics through the prism's vertical edges cross
//! at a point whose height encodes the harmonic mean, while the chord through
//! the edge tops carries the arithmetic mean directly above the crossing.
//! In higher dimensions the same single crossing point is realized by `n - 1`
//! axis paraboloids `x_n = b_i x_i^2 + (a_i - b_i) x_i` plus one cap surface,
//! either the plane `x_n = a_n (1 - sum x_i)` or a paraboloid cap. The
//! interpolating hyperplane through the edge tops then reads off the harmonic
//! mean at the crossing base point and the arithmetic mean at the weight
//! barycenter.
//!
//! Scenes precompute and store both means through the mean operations; no
//! geometric routine rederives them by another route.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::means::{self, PositiveSample, WeightVector};
use crate::sum::neumaier_sum;

/// Residual tolerance for declaring the Newton iteration converged.
pub const NEWTON_RESIDUAL_TOL: f64 = 1e-10;
/// Step-length floor; steps below this with residual still above the
/// tolerance count as stagnation.
pub const NEWTON_STEP_TOL: f64 = 1e-12;
/// Hard budget for the damped Newton loop, shared across restarts.
pub const NEWTON_MAX_ITER: usize = 500;
/// Maximum number of step halvings per iteration.
const NEWTON_MAX_HALVINGS: usize = 30;
/// Maximum number of fresh interior starts the solver may take after the
/// line search runs aground on the cell boundary.
const NEWTON_MAX_RESTARTS: usize = 32;

/// Which of the three 2D constructions to build. They differ in how the
/// crossing ordinate scales `a_1 x_H`: by `w_2/w_1`, by `1`, or to `H/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ParabolaCase {
    Case1,
    Case2,
    Case3,
}

impl ParabolaCase {
    pub fn index(self) -> u8 {
        match self {
            ParabolaCase::Case1 => 1,
            ParabolaCase::Case2 => 2,
            ParabolaCase::Case3 => 3,
        }
    }
}

/// `y = q2 x^2 + q1 x + q0`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Quadratic1D {
    pub q2: f64,
    pub q1: f64,
    pub q0: f64,
}

impl Quadratic1D {
    pub fn eval(&self, x: f64) -> f64 {
        (self.q2 * x + self.q1) * x + self.q0
    }
}

/// The 2D construction: `p1` rises from `(0, 0)` to `(1, a1)`, `p2` falls
/// from `(0, a2)` to `(1, 0)`, and they cross exactly once inside the strip,
/// at `(x_h, y_h)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParabolaPair {
    pub p1: Quadratic1D,
    pub p2: Quadratic1D,
    pub x_h: f64,
    pub y_h: f64,
    pub case: ParabolaCase,
}

/// Crossing abscissa `w1 a2 / (w1 a2 + w2 a1)`. The chord through the edge
/// tops evaluated there gives the weighted harmonic mean.
pub fn intersection_abscissa(a1: f64, a2: f64, w1: f64, w2: f64) -> f64 {
    let num = w1 * a2;
    num / (num + w2 * a1)
}

/// Height of the chord from `(0, a2)` to `(1, a1)`.
pub fn chord_height(a1: f64, a2: f64, x: f64) -> f64 {
    a2 + (a1 - a2) * x
}

/// Builds one of the three 2D parabola constructions. Weights are
/// renormalized; samples must be strictly positive.
pub fn parabola_pair(a1: f64, a2: f64, w1: f64, w2: f64, case: ParabolaCase) -> Result<ParabolaPair> {
    let a = PositiveSample::new(&[a1, a2])?;
    let w = WeightVector::new(&[w1, w2])?;
    let (a1, a2) = (a.as_slice()[0], a.as_slice()[1]);
    let (w1, w2) = (w.as_slice()[0], w.as_slice()[1]);

    let x_h = intersection_abscissa(a1, a2, w1, w2);
    let h_w = means::weighted_harmonic(&a, &w)?;

    let (p1, p2, y_h) = match case {
        ParabolaCase::Case1 => {
            // p2 stays the falling diagonal; p1 bends through
            // (x_h, a1 x_h w2 / w1).
            let r = w2 / w1;
            let y_h = a1 * x_h * r;
            let p1 = Quadratic1D {
                q2: a1 * ((1.0 - r) / (1.0 - x_h)),
                q1: a1 * ((r - x_h) / (1.0 - x_h)),
                q0: 0.0,
            };
            let p2 = Quadratic1D { q2: 0.0, q1: -a2, q0: a2 };
            (p1, p2, y_h)
        }
        ParabolaCase::Case2 => {
            // p1 stays the rising diagonal; p2 bends through (x_h, a1 x_h).
            let y_h = a1 * x_h;
            let p1 = Quadratic1D { q2: 0.0, q1: a1, q0: 0.0 };
            let s = a1 / (x_h - 1.0) + a2 / x_h;
            let p2 = Quadratic1D {
                q2: s,
                q1: -(a1 / (x_h - 1.0) + a2 * (x_h + 1.0) / x_h),
                q0: a2,
            };
            (p1, p2, y_h)
        }
        ParabolaCase::Case3 => {
            // Both bend; the crossing ordinate is half the harmonic mean.
            let y_h = 0.5 * h_w;
            let d1 = x_h * (1.0 - x_h);
            let p1 = Quadratic1D {
                q2: (a1 * x_h - y_h) / d1,
                q1: (y_h - a1 * x_h * x_h) / d1,
                q0: 0.0,
            };
            let d2 = x_h * (x_h - 1.0);
            let p2 = Quadratic1D {
                q2: (y_h + a2 * (x_h - 1.0)) / d2,
                q1: -(y_h + a2 * (x_h - 1.0) * (x_h + 1.0)) / d2,
                q0: a2,
            };
            (p1, p2, y_h)
        }
    };

    Ok(ParabolaPair { p1, p2, x_h, y_h, case })
}

/// Cap choice for scenes in dimension `n >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CapVariant {
    /// Flat cap `x_n = a_n (1 - sum x_i)`; the crossing sits at height
    /// `w_n H_w`.
    Plane,
    /// Paraboloid cap; the crossing sits at height `H_w / n`.
    Paraboloid,
}

/// How a scene was assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SceneKind {
    PlaneCap,
    ParaboloidCap,
    /// Rescaled sample `a_i / w_i` under equal weights: every quadratic
    /// coefficient vanishes and all surfaces are flat.
    Rescaled,
}

/// Axis surface `x_n = b x_i^2 + (edge - b) x_i` over base coordinate `i`.
/// Passes through the origin edge and through `(x_i = 1, x_n = edge)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AxisParaboloid {
    pub b: f64,
    pub edge: f64,
}

impl AxisParaboloid {
    pub fn eval(&self, x_i: f64) -> f64 {
        (self.b * x_i + (self.edge - self.b)) * x_i
    }

    /// Derivative of the section along its own axis.
    pub fn slope(&self, x_i: f64) -> f64 {
        2.0 * self.b * x_i + (self.edge - self.b)
    }
}

/// The closing surface of a scene.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CapSurface {
    /// `x_n = edge (1 - sum x_i)`.
    Plane { edge: f64 },
    /// `x_n = edge + sum(c_i x_i^2 - (c_i + edge) x_i)`.
    Paraboloid { edge: f64, c: Vec<f64> },
}

impl CapSurface {
    pub fn eval(&self, base: &[f64]) -> f64 {
        match self {
            CapSurface::Plane { edge } => edge * (1.0 - neumaier_sum(base.iter().copied())),
            CapSurface::Paraboloid { edge, c } => {
                edge + neumaier_sum(
                    c.iter().zip(base).map(|(ci, &xi)| (ci * xi - (ci + edge)) * xi),
                )
            }
        }
    }

    fn slope(&self, k: usize, x_k: f64) -> f64 {
        match self {
            CapSurface::Plane { edge } => -edge,
            CapSurface::Paraboloid { edge, c } => 2.0 * c[k] * x_k - (c[k] + edge),
        }
    }

    /// Quadratic coefficients, one per base axis; zeros for the plane.
    pub fn coefficients(&self, base_dim: usize) -> Vec<f64> {
        match self {
            CapSurface::Plane { .. } => vec![0.0; base_dim],
            CapSurface::Paraboloid { c, .. } => c.clone(),
        }
    }
}

/// Hyperplane through the prism edge tops: over a base point it evaluates
/// `h_n + sum x_i (h_i - h_n)` where `h_i` are the edge heights.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Hyperplane {
    pub heights: Vec<f64>,
}

impl Hyperplane {
    pub fn eval(&self, base: &[f64]) -> f64 {
        let hn = self.heights[self.heights.len() - 1];
        hn + neumaier_sum(self.heights[..self.heights.len() - 1]
            .iter()
            .zip(base)
            .map(|(hi, &xi)| xi * (hi - hn)))
    }
}

/// Readings of the rescaled companion scene.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StarData {
    /// Hyperplane through the rescaled edge tops `a_i / w_i`.
    pub plane: Hyperplane,
    /// Harmonic mean of the rescaled sample under equal weights; equals
    /// `n * h_w` up to rounding.
    pub h_star: f64,
    /// Arithmetic mean of the rescaled sample under equal weights.
    pub m_star: f64,
}

/// A fully assembled scene: the surfaces, their unique common point, and the
/// mean values it encodes.
#[derive(Debug, Clone, PartialEq)]
pub struct PrismScene {
    pub a: PositiveSample,
    pub w: WeightVector,
    pub kind: SceneKind,
    /// Weighted harmonic mean of `a`, computed once at assembly.
    pub h_w: f64,
    /// Weighted arithmetic mean of `a`, computed once at assembly.
    pub m_w: f64,
    /// The unique common point of all `n` surfaces: base coordinates
    /// `w_i h_w / a_i` plus the cap-determined height coordinate.
    pub x_bar: Vec<f64>,
    /// Base point `(w_1, ..., w_{n-1})` where the edge-top hyperplane reads
    /// off the arithmetic mean.
    pub barycenter: Vec<f64>,
    /// One surface per base axis.
    pub axis: Vec<AxisParaboloid>,
    pub cap: CapSurface,
    /// Hyperplane through the plain edge tops `a_i`.
    pub plane: Hyperplane,
    /// Present only for rescaled scenes.
    pub star: Option<StarData>,
}

impl PrismScene {
    pub fn n(&self) -> usize {
        self.a.len()
    }
}

fn check_scene_inputs(a: &PositiveSample, w: &WeightVector) -> Result<usize> {
    if a.len() != w.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: w.len() });
    }
    if a.len() < 2 {
        return Err(Error::TooShort { len: a.len(), min: 2 });
    }
    Ok(a.len())
}

/// Assembles the scene for a sample and weight vector.
///
/// The crossing point is well defined because `x_bar_i = w_i h_w / a_i` lies
/// strictly inside `(0, 1)` for every axis, which follows from the strict
/// bound `h_w < min_i(a_i / w_i)`.
pub fn build_scene(a: &PositiveSample, w: &WeightVector, variant: CapVariant) -> Result<PrismScene> {
    let n = check_scene_inputs(a, w)?;
    let av = a.as_slice();
    let wv = w.as_slice();

    let h_w = means::weighted_harmonic(a, w)?;
    let m_w = means::weighted_arithmetic(a, w)?;

    let mut x_bar: Vec<f64> = (0..n - 1).map(|i| wv[i] * h_w / av[i]).collect();
    let base = x_bar.clone();
    x_bar.push(match variant {
        CapVariant::Plane => wv[n - 1] * h_w,
        CapVariant::Paraboloid => h_w / n as f64,
    });

    let axis: Vec<AxisParaboloid> = (0..n - 1)
        .map(|i| {
            let spread = match variant {
                CapVariant::Plane => wv[n - 1] - wv[i],
                CapVariant::Paraboloid => 1.0 / n as f64 - wv[i],
            };
            AxisParaboloid {
                b: h_w * spread / (base[i] * (base[i] - 1.0)),
                edge: av[i],
            }
        })
        .collect();

    let cap = match variant {
        CapVariant::Plane => CapSurface::Plane { edge: av[n - 1] },
        CapVariant::Paraboloid => {
            // The defining form is h/n + (sum of base coords - 1) a_n, but
            // the base coordinates sum to 1 - h w_n / a_n, so the numerator
            // collapses to h (1/n - w_n). The raw form subtracts two O(1)
            // quantities and loses up to three digits; the collapsed one is
            // a plain product and keeps uniform weights degenerating to
            // machine-zero coefficients.
            let shared = h_w * (1.0 / n as f64 - wv[n - 1]);
            let c: Vec<f64> = (0..n - 1)
                .map(|i| shared / ((n - 1) as f64 * base[i] * (base[i] - 1.0)))
                .collect();
            CapSurface::Paraboloid { edge: av[n - 1], c }
        }
    };

    Ok(PrismScene {
        a: a.clone(),
        w: w.clone(),
        kind: match variant {
            CapVariant::Plane => SceneKind::PlaneCap,
            CapVariant::Paraboloid => SceneKind::ParaboloidCap,
        },
        h_w,
        m_w,
        x_bar,
        barycenter: wv[..n - 1].to_vec(),
        axis,
        cap,
        plane: Hyperplane { heights: av.to_vec() },
        star: None,
    })
}

/// Scene over the rescaled sample `a_i / w_i` under equal weights.
///
/// All quadratic coefficients vanish: the axis surfaces are the lines
/// `x_n = (a_i / w_i) x_i` and the cap is flat. The common point keeps the
/// base coordinates `w_i h_w / a_i` of the weighted scenes, and its height
/// coordinate is the plain weighted harmonic mean itself.
pub fn corollary_scene(a: &PositiveSample, w: &WeightVector) -> Result<PrismScene> {
    let n = check_scene_inputs(a, w)?;
    let av = a.as_slice();
    let wv = w.as_slice();

    let h_w = means::weighted_harmonic(a, w)?;
    let m_w = means::weighted_arithmetic(a, w)?;
    let h_star = means::scaled_uniform_harmonic(a, w)?;

    let rescaled: Vec<f64> = av.iter().zip(wv).map(|(ai, wi)| ai / wi).collect();
    let rescaled_sample = PositiveSample::new(&rescaled)?;
    let m_star = means::weighted_arithmetic(&rescaled_sample, &WeightVector::uniform(n)?)?;

    let mut x_bar: Vec<f64> = (0..n - 1).map(|i| wv[i] * h_w / av[i]).collect();
    x_bar.push(h_w);

    let axis: Vec<AxisParaboloid> = rescaled[..n - 1]
        .iter()
        .map(|&edge| AxisParaboloid { b: 0.0, edge })
        .collect();

    Ok(PrismScene {
        a: a.clone(),
        w: w.clone(),
        kind: SceneKind::Rescaled,
        h_w,
        m_w,
        x_bar,
        barycenter: wv[..n - 1].to_vec(),
        axis,
        cap: CapSurface::Plane { edge: rescaled[n - 1] },
        plane: Hyperplane { heights: av.to_vec() },
        star: Some(StarData {
            plane: Hyperplane { heights: rescaled },
            h_star,
            m_star,
        }),
    })
}

/// The stored common point; all scene surfaces pass through it.
pub fn analytic_intersection(scene: &PrismScene) -> &[f64] {
    &scene.x_bar
}

/// Signed residual, in `x_n` units, of every surface at a point: the point's
/// height minus the surface height over the point's base coordinates. Order:
/// axis surfaces by axis, then the cap.
pub fn surface_residuals(scene: &PrismScene, point: &[f64]) -> Result<Vec<f64>> {
    let n = scene.n();
    if point.len() != n {
        return Err(Error::LengthMismatch { left: point.len(), right: n });
    }
    let height = point[n - 1];
    let base = &point[..n - 1];
    let mut res: Vec<f64> = scene
        .axis
        .iter()
        .enumerate()
        .map(|(i, s)| height - s.eval(base[i]))
        .collect();
    res.push(height - scene.cap.eval(base));
    Ok(res)
}

/// Outcome of the damped Newton iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonReport {
    pub root: Vec<f64>,
    pub iterations: usize,
    pub max_residual: f64,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |acc, &x| acc.max(x.abs()))
}

/// Gaussian elimination with partial pivoting, solving in place.
/// Returns false on a singular system.
fn solve_dense(mat: &mut [f64], rhs: &mut [f64], n: usize) -> bool {
    for col in 0..n {
        let mut pivot = col;
        let mut best = mat[col * n + col].abs();
        for row in col + 1..n {
            let v = mat[row * n + col].abs();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best < f64::MIN_POSITIVE {
            return false;
        }
        if pivot != col {
            for k in col..n {
                mat.swap(col * n + k, pivot * n + k);
            }
            rhs.swap(col, pivot);
        }
        for row in col + 1..n {
            let factor = mat[row * n + col] / mat[col * n + col];
            if factor != 0.0 {
                for k in col..n {
                    mat[row * n + k] -= factor * mat[col * n + k];
                }
                rhs[row] -= factor * rhs[col];
            }
        }
    }
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in row + 1..n {
            acc -= mat[row * n + k] * rhs[k];
        }
        rhs[row] = acc / mat[row * n + row];
    }
    true
}

fn jacobian(scene: &PrismScene, point: &[f64]) -> Vec<f64> {
    let n = scene.n();
    let mut jac = vec![0.0; n * n];
    for (i, s) in scene.axis.iter().enumerate() {
        jac[i * n + i] = -s.slope(point[i]);
        jac[i * n + (n - 1)] = 1.0;
    }
    let cap_row = n - 1;
    for k in 0..n - 1 {
        jac[cap_row * n + k] = -scene.cap.slope(k, point[k]);
    }
    jac[cap_row * n + (n - 1)] = 1.0;
    jac
}

/// Clamp a point into the closed cell `[0,1]^(n-1) x [0, max a]` that contains
/// the designed crossing. The quadratic sheets intersect again outside this
/// cell, so an unconstrained step can run off toward a spurious root.
fn clamp_to_cell(point: &mut [f64], height_cap: f64) {
    let n = point.len();
    for coord in point.iter_mut().take(n - 1) {
        *coord = coord.clamp(0.0, 1.0);
    }
    point[n - 1] = point[n - 1].clamp(0.0, height_cap);
}

fn sum_of_squares(values: &[f64]) -> f64 {
    values.iter().map(|v| v * v).sum()
}

/// Fractional part for small non-negative values without requiring an
/// intrinsic `floor` (this crate builds without `std`).
fn fract_small(x: f64) -> f64 {
    x - (x as u64 as f64)
}

/// Point `k` of a fixed equidistributed interior sequence over the cell,
/// used for deterministic restarts. Coordinates step by the fractional
/// parts of square roots of primes, so consecutive points land in well
/// separated regions and a solve stays a pure function of its inputs.
fn interior_seed(k: usize, n: usize, height_cap: f64) -> Vec<f64> {
    const STRIDES: [f64; 8] = [
        0.414_213_562_373_095_1,
        0.732_050_807_568_877_2,
        0.236_067_977_499_789_6,
        0.645_751_311_064_590_7,
        0.316_624_790_355_399_8,
        0.605_551_275_463_989_1,
        0.123_105_625_617_660_5,
        0.358_898_943_540_674,
    ];
    let mut point = Vec::with_capacity(n);
    for j in 0..n {
        let stride = STRIDES
            .get(j)
            .copied()
            .unwrap_or_else(|| fract_small((j as f64 + 1.0) * 0.618_033_988_749_894_9));
        let u = fract_small(0.5 + (k as f64 + 1.0) * stride);
        let interior = 0.05 + 0.9 * u;
        point.push(if j == n - 1 { interior * height_cap } else { interior });
    }
    point
}

/// Halving line search toward `step`, keeping trials inside the cell and
/// accepting the first one that lowers the squared-residual merit. Returns
/// the accepted point with its residuals, or `None` after all halvings fail.
fn cell_line_search(
    scene: &PrismScene,
    x: &[f64],
    step: &[f64],
    merit: f64,
    height_cap: f64,
) -> Option<(Vec<f64>, Vec<f64>, f64)> {
    let mut alpha = 1.0;
    for _ in 0..=NEWTON_MAX_HALVINGS {
        let mut trial: Vec<f64> = x.iter().zip(step).map(|(xi, di)| xi + alpha * di).collect();
        clamp_to_cell(&mut trial, height_cap);
        let trial_residual =
            surface_residuals(scene, &trial).expect("trial point has scene dimension");
        let trial_merit = sum_of_squares(&trial_residual);
        if trial_merit < merit {
            return Some((trial, trial_residual, trial_merit));
        }
        alpha *= 0.5;
    }
    None
}

/// Rescale a direction so its largest component spans at most one cell
/// diameter. Near a fold of a quadratic sheet the raw Newton step can be
/// orders of magnitude larger; halving from a cell-sized step explores the
/// cell instead of clamping every trial to the same far corner.
fn cap_step(step: &mut [f64], height_cap: f64) {
    let cap = 1.0 + height_cap;
    let norm = max_abs(step);
    if norm > cap {
        let scale = cap / norm;
        for d in step.iter_mut() {
            *d *= scale;
        }
    }
}

/// Damped Newton iteration on the full surface system from an arbitrary
/// start.
///
/// Trial points are projected into the base cell so the iteration cannot
/// escape to the sheet crossings outside it. When the Newton direction makes
/// no progress the solver falls back to steepest descent on the squared
/// residual, and when even that stalls (the iterate is pinned to the cell
/// boundary by a crossing just outside it) it restarts from a fixed interior
/// sequence. All fallbacks are deterministic; the returned point always has
/// max residual at most `NEWTON_RESIDUAL_TOL`, or the solve reports
/// `NoConvergence`. It never falls back silently to the analytic answer.
pub fn numeric_intersection(scene: &PrismScene, start: &[f64]) -> Result<NewtonReport> {
    let n = scene.n();
    if start.len() != n {
        return Err(Error::LengthMismatch { left: start.len(), right: n });
    }
    let height_cap = scene.a.as_slice().iter().cloned().fold(0.0f64, f64::max);
    let mut x = start.to_vec();
    clamp_to_cell(&mut x, height_cap);
    let mut residual = surface_residuals(scene, &x)?;
    let mut res_norm = max_abs(&residual);
    let mut merit = sum_of_squares(&residual);
    let mut restarts = 0usize;
    let mut slow_streak = 0usize;

    for iteration in 0..NEWTON_MAX_ITER {
        if res_norm <= NEWTON_RESIDUAL_TOL {
            return Ok(NewtonReport { root: x, iterations: iteration, max_residual: res_norm });
        }

        let jac = jacobian(scene, &x);
        let mut newton_step: Vec<f64> = residual.iter().map(|r| -r).collect();
        let mut accepted = {
            let mut lu = jac.clone();
            if solve_dense(&mut lu, &mut newton_step, n) {
                cap_step(&mut newton_step, height_cap);
                cell_line_search(scene, &x, &newton_step, merit, height_cap)
            } else {
                None
            }
        };

        if accepted.is_none() {
            // Steepest descent direction for the merit: -J^T r.
            let mut gradient_step = vec![0.0; n];
            for (col, g) in gradient_step.iter_mut().enumerate() {
                *g = -(0..n).map(|row| jac[row * n + col] * residual[row]).sum::<f64>();
            }
            cap_step(&mut gradient_step, height_cap);
            accepted = cell_line_search(scene, &x, &gradient_step, merit, height_cap);
        }

        let mut wedged = true;
        if let Some((point, point_residual, point_merit)) = accepted {
            let moved = point
                .iter()
                .zip(&x)
                .fold(0.0f64, |acc, (new, old)| acc.max((new - old).abs()));
            // Count consecutive iterations with under 10% merit reduction;
            // an iterate pinned near the boundary can creep forever while
            // a converging one collapses the merit geometrically.
            if point_merit > 0.9 * merit {
                slow_streak += 1;
            } else {
                slow_streak = 0;
            }
            x = point;
            res_norm = max_abs(&point_residual);
            residual = point_residual;
            merit = point_merit;
            wedged = (moved <= NEWTON_STEP_TOL || slow_streak >= 8)
                && res_norm > NEWTON_RESIDUAL_TOL;
        }
        if !wedged {
            continue;
        }

        restarts += 1;
        if restarts > NEWTON_MAX_RESTARTS {
            return Err(Error::NoConvergence {
                iterations: iteration + 1,
                max_residual: res_norm,
            });
        }
        x = interior_seed(restarts - 1, n, height_cap);
        residual = surface_residuals(scene, &x).expect("seed point has scene dimension");
        res_norm = max_abs(&residual);
        merit = sum_of_squares(&residual);
        slow_streak = 0;
    }

    if res_norm <= NEWTON_RESIDUAL_TOL {
        return Ok(NewtonReport { root: x, iterations: NEWTON_MAX_ITER, max_residual: res_norm });
    }
    Err(Error::NoConvergence { iterations: NEWTON_MAX_ITER, max_residual: res_norm })
}

/// The two hyperplane readings that recover the means geometrically.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProjectionHeights {
    /// Edge-top hyperplane over the crossing base point; equals `h_w` up to
    /// rounding.
    pub at_x_bar: f64,
    /// Edge-top hyperplane over `(w_1, ..., w_{n-1})`; equals `m_w` up to
    /// rounding.
    pub at_barycenter: f64,
}

pub fn prism_heights(scene: &PrismScene) -> ProjectionHeights {
    let base = &scene.x_bar[..scene.n() - 1];
    ProjectionHeights {
        at_x_bar: scene.plane.eval(base),
        at_barycenter: scene.plane.eval(&scene.barycenter),
    }
}

/// One plottable surface: a name plus point rows `(base coords..., height)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SurfaceTrack {
    pub name: String,
    pub points: Vec<Vec<f64>>,
}

/// A named point of interest in full scene coordinates.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Marker {
    pub name: String,
    pub point: Vec<f64>,
}

/// A named scalar attached to the figure (means and quadratic coefficients).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScalarEntry {
    pub name: String,
    pub value: f64,
}

/// Figure payload: dense surface tracks for `n` in `{2, 3}`, markers and
/// scalars for every `n`. Above three dimensions there is nothing to plot,
/// so `surfaces` stays empty while markers and scalars are still filled.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FigureData {
    pub n: usize,
    pub resolution: usize,
    pub surfaces: Vec<SurfaceTrack>,
    pub markers: Vec<Marker>,
    pub scalars: Vec<ScalarEntry>,
}

/// Samples every scene surface on a deterministic grid.
///
/// For `n = 2` each track has `resolution` points over `x in [0, 1]`. For
/// `n = 3` the base triangle `x_1 + x_2 <= 1` is sampled on the triangular
/// grid with `resolution (resolution + 1) / 2` nodes, ordered
/// lexicographically. `resolution` must be at least 2.
pub fn sample_surfaces(scene: &PrismScene, resolution: usize) -> Result<FigureData> {
    if resolution < 2 {
        return Err(Error::TooShort { len: resolution, min: 2 });
    }
    let n = scene.n();
    let denom = (resolution - 1) as f64;

    let mut surfaces = Vec::new();
    if n == 2 {
        let xs: Vec<f64> = (0..resolution).map(|j| j as f64 / denom).collect();
        let track = |name: String, f: &dyn Fn(f64) -> f64| SurfaceTrack {
            name,
            points: xs.iter().map(|&x| vec![x, f(x)]).collect(),
        };
        surfaces.push(track("V1".into(), &|x| scene.axis[0].eval(x)));
        surfaces.push(track("V2".into(), &|x| scene.cap.eval(&[x])));
        surfaces.push(track("Pi".into(), &|x| scene.plane.eval(&[x])));
        if let Some(star) = &scene.star {
            surfaces.push(track("Pi_star".into(), &|x| star.plane.eval(&[x])));
        }
    } else if n == 3 {
        let mut nodes = Vec::with_capacity(resolution * (resolution + 1) / 2);
        for i in 0..resolution {
            for j in 0..resolution - i {
                nodes.push([i as f64 / denom, j as f64 / denom]);
            }
        }
        let track = |name: String, f: &dyn Fn(&[f64; 2]) -> f64| SurfaceTrack {
            name,
            points: nodes.iter().map(|p| vec![p[0], p[1], f(p)]).collect(),
        };
        surfaces.push(track("V1".into(), &|p| scene.axis[0].eval(p[0])));
        surfaces.push(track("V2".into(), &|p| scene.axis[1].eval(p[1])));
        surfaces.push(track("V3".into(), &|p| scene.cap.eval(&p[..])));
        surfaces.push(track("Pi".into(), &|p| scene.plane.eval(&p[..])));
        if let Some(star) = &scene.star {
            surfaces.push(track("Pi_star".into(), &|p| star.plane.eval(&p[..])));
        }
    }

    let base = &scene.x_bar[..n - 1];
    let mut markers = vec![
        Marker { name: "x_bar".into(), point: scene.x_bar.clone() },
        Marker {
            name: "x_bar_on_plane".into(),
            point: base.iter().copied().chain([scene.plane.eval(base)]).collect(),
        },
        Marker {
            name: "barycenter_on_plane".into(),
            point: scene
                .barycenter
                .iter()
                .copied()
                .chain([scene.plane.eval(&scene.barycenter)])
                .collect(),
        },
    ];
    if let Some(star) = &scene.star {
        markers.push(Marker {
            name: "x_bar_on_star_plane".into(),
            point: base.iter().copied().chain([star.plane.eval(base)]).collect(),
        });
    }

    let mut scalars = vec![
        ScalarEntry { name: "h_w".into(), value: scene.h_w },
        ScalarEntry { name: "m_w".into(), value: scene.m_w },
    ];
    for (i, s) in scene.axis.iter().enumerate() {
        scalars.push(ScalarEntry { name: format!("b{}", i + 1), value: s.b });
    }
    if let CapSurface::Paraboloid { c, .. } = &scene.cap {
        for (i, ci) in c.iter().enumerate() {
            scalars.push(ScalarEntry { name: format!("c{}", i + 1), value: *ci });
        }
    }
    if let Some(star) = &scene.star {
        scalars.push(ScalarEntry { name: "h_star".into(), value: star.h_star });
        scalars.push(ScalarEntry { name: "m_star".into(), value: star.m_star });
    }

    Ok(FigureData { n, resolution, surfaces, markers, scalars })
}
