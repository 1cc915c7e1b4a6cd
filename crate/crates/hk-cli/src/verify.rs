//! Seeded randomized property suite over all three library layers.
//!
//! Each property draws its cases from its own deterministic stream, so a
//! seed pins the exact case set regardless of how many properties run
//! before it. Failures carry the reproducing input in the report.

use hk_core::geometry::{chord_height, surface_residuals};
use hk_core::reconstruction::{baseline_midpoint, interior_midpoints};
use hk_core::{
    build_scene, compare_operators, convergence_order, corollary_scene, decompose,
    guarded_harmonic, mean_gap, numeric_intersection, parabola_pair, prism_heights, reconstruct,
    scaled_uniform_harmonic, weighted_arithmetic, weighted_harmonic, CapVariant, GridFunction,
    Operator, ParabolaCase, PositiveSample, SignPolicy, Stencil, WeightVector,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Per-property tally. `cases_run` is 1 for fixed-input properties.
#[derive(Debug, Clone, Serialize)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub cases_run: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub properties: Vec<PropertyOutcome>,
    pub total_cases: usize,
    pub failed_properties: usize,
    pub pass: bool,
}

impl VerifyReport {
    pub fn first_failing(&self) -> Option<&PropertyOutcome> {
        self.properties.iter().find(|p| p.failures > 0)
    }
}

// Case generators, shared with the acceptance suite so both exercise the
// same input distributions.

/// Inclusive dimension draw.
pub fn dimension(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
    rng.random_range(lo..=hi)
}

/// Log-uniform values across six decades; exercises mean identities far
/// from 1.
pub fn wide_values(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| 10f64.powf(rng.random_range(-3.0..3.0))).collect()
}

/// Raw weights down to 1e-6, adversarial for the strict minimum bound.
pub fn raw_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(1e-6..1.0)).collect()
}

/// Moderate values for scene assembly, keeping coefficients well scaled.
pub fn scene_values(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.5..20.0)).collect()
}

/// Raw weights bounded away from zero so crossings stay clearly interior.
pub fn scene_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.05..1.0)).collect()
}

/// Random interior start for the Newton solver over a given scene height.
pub fn newton_start(rng: &mut ChaCha8Rng, n: usize, height_cap: f64) -> Vec<f64> {
    let mut start: Vec<f64> = (0..n - 1).map(|_| rng.random_range(0.01..0.99)).collect();
    start.push(rng.random_range(0.01..height_cap));
    start
}

fn rel_close(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol * want.abs().max(1.0)
}

fn fmt_case(a: &[f64], w: &[f64]) -> String {
    format!("a={a:?}, w={w:?}")
}

struct Suite {
    seed: u64,
    cases: usize,
    inject_bug: bool,
    outcomes: Vec<PropertyOutcome>,
}

impl Suite {
    /// Every property gets its own stream keyed by seed and position, so
    /// one property's draw count never shifts another's cases.
    fn stream(&self) -> ChaCha8Rng {
        let index = self.outcomes.len() as u64;
        ChaCha8Rng::seed_from_u64(
            self.seed.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        )
    }

    fn random(
        &mut self,
        name: &'static str,
        mut check: impl FnMut(&mut ChaCha8Rng) -> Result<(), String>,
    ) {
        let mut rng = self.stream();
        let mut failures = 0;
        let mut first_failure = None;
        for case in 0..self.cases {
            if let Err(msg) = check(&mut rng) {
                failures += 1;
                if first_failure.is_none() {
                    first_failure = Some(format!("case {case}: {msg}"));
                }
            }
        }
        self.outcomes.push(PropertyOutcome {
            name,
            cases_run: self.cases,
            failures,
            first_failure,
        });
    }

    fn fixed(&mut self, name: &'static str, check: impl FnOnce() -> Result<(), String>) {
        let (failures, first_failure) = match check() {
            Ok(()) => (0, None),
            Err(msg) => (1, Some(msg)),
        };
        self.outcomes.push(PropertyOutcome { name, cases_run: 1, failures, first_failure });
    }
}

/// Runs the whole suite. `inject_bug` corrupts the closed-form gap before
/// the identity check, a negative control proving the suite can fail.
pub fn run_suite(seed: u64, cases: usize, inject_bug: bool) -> VerifyReport {
    let mut suite = Suite { seed, cases, inject_bug, outcomes: Vec::new() };

    means_properties(&mut suite);
    geometry_properties(&mut suite);
    reconstruction_properties(&mut suite);

    let total_cases = suite.outcomes.iter().map(|p| p.cases_run).sum();
    let failed_properties = suite.outcomes.iter().filter(|p| p.failures > 0).count();
    VerifyReport {
        pass: failed_properties == 0,
        properties: suite.outcomes,
        total_cases,
        failed_properties,
    }
}

fn draw_means_case(rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>, PositiveSample, WeightVector) {
    let n = dimension(rng, 2, 8);
    let av = wide_values(rng, n);
    let wv = raw_weights(rng, n);
    let a = PositiveSample::new(&av).expect("generated values are positive");
    let w = WeightVector::new(&wv).expect("generated weights are positive");
    (av, wv, a, w)
}

fn means_properties(suite: &mut Suite) {
    let inject_bug = suite.inject_bug;
    suite.random("gap-identity", move |rng| {
        let (av, wv, a, w) = draw_means_case(rng);
        let report = mean_gap(&a, &w).map_err(|e| e.to_string())?;
        let mut closed = report.gap_closed_form;
        if inject_bug {
            closed *= 1.0 + 1e-6;
        }
        let err = (report.gap_direct - closed).abs();
        let tol = 1e-13 * report.m_w.abs().max(1.0);
        if err > tol {
            return Err(format!(
                "{}: |gap_direct - gap_closed_form| = {err:e} exceeds {tol:e}",
                fmt_case(&av, &wv)
            ));
        }
        Ok(())
    });

    suite.random("strict-bound", |rng| {
        let (av, wv, a, w) = draw_means_case(rng);
        let report = mean_gap(&a, &w).map_err(|e| e.to_string())?;
        if report.h_w < report.min_bound {
            Ok(())
        } else {
            Err(format!(
                "{}: h_w = {} is not strictly below min bound {}",
                fmt_case(&av, &wv),
                report.h_w,
                report.min_bound
            ))
        }
    });

    suite.random("mean-inequality", |rng| {
        let (av, wv, a, w) = draw_means_case(rng);
        let h = weighted_harmonic(&a, &w).map_err(|e| e.to_string())?;
        let m = weighted_arithmetic(&a, &w).map_err(|e| e.to_string())?;
        if h - m <= 1e-13 * m.abs().max(1.0) {
            Ok(())
        } else {
            Err(format!("{}: h_w = {h} exceeds m_w = {m}", fmt_case(&av, &wv)))
        }
    });

    suite.random("gap-quadratic-scaling", |rng| {
        let n = dimension(rng, 2, 6);
        // Two fixed entries keep the perturbation variance bounded away
        // from zero, so the ratio is clean at h = 1e-3.
        let mut u: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        u[0] = -0.9;
        u[1] = 0.8;
        let wv = scene_weights(rng, n);
        let w = WeightVector::new(&wv).expect("generated weights are positive");
        let gap_at = |h: f64| -> Result<f64, String> {
            let av: Vec<f64> = u.iter().map(|ui| 1.0 + h * ui).collect();
            let a = PositiveSample::new(&av).map_err(|e| e.to_string())?;
            Ok(mean_gap(&a, &w).map_err(|e| e.to_string())?.gap_closed_form)
        };
        let h = 1e-3;
        let ratio = gap_at(h)? / gap_at(h / 2.0)?;
        if (3.4..=4.6).contains(&ratio) {
            Ok(())
        } else {
            Err(format!(
                "u={u:?}, w={wv:?}: gap({h})/dgap({}) = {ratio}, not near 4",
                h / 2.0
            ))
        }
    });

    suite.random("scaling-relation", |rng| {
        let (av, wv, a, w) = draw_means_case(rng);
        let n = a.len() as f64;
        let h = weighted_harmonic(&a, &w).map_err(|e| e.to_string())?;
        let rescaled = scaled_uniform_harmonic(&a, &w).map_err(|e| e.to_string())?;
        if rel_close(rescaled, n * h, 1e-12) {
            Ok(())
        } else {
            Err(format!(
                "{}: rescaled uniform harmonic {rescaled} != n * h_w = {}",
                fmt_case(&av, &wv),
                n * h
            ))
        }
    });

    suite.random("permutation-symmetry", |rng| {
        let (av, wv, a, w) = draw_means_case(rng);
        let mut order: Vec<usize> = (0..av.len()).collect();
        order.shuffle(rng);
        let av2: Vec<f64> = order.iter().map(|&i| av[i]).collect();
        let wv2: Vec<f64> = order.iter().map(|&i| wv[i]).collect();
        let a2 = PositiveSample::new(&av2).map_err(|e| e.to_string())?;
        let w2 = WeightVector::new(&wv2).map_err(|e| e.to_string())?;
        let h1 = weighted_harmonic(&a, &w).map_err(|e| e.to_string())?;
        let h2 = weighted_harmonic(&a2, &w2).map_err(|e| e.to_string())?;
        let m1 = weighted_arithmetic(&a, &w).map_err(|e| e.to_string())?;
        let m2 = weighted_arithmetic(&a2, &w2).map_err(|e| e.to_string())?;
        if rel_close(h2, h1, 1e-13) && rel_close(m2, m1, 1e-13) {
            Ok(())
        } else {
            Err(format!(
                "{} under order {order:?}: means moved ({h1} -> {h2}, {m1} -> {m2})",
                fmt_case(&av, &wv)
            ))
        }
    });

    suite.random("guarded-harmonic-range", |rng| {
        let n = dimension(rng, 2, 6);
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let wv = scene_weights(rng, n);
        let w = WeightVector::new(&wv).expect("generated weights are positive");
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let peak = lo.abs().max(hi.abs());

        let clip = guarded_harmonic(&v, &w, SignPolicy::ClipToZero).map_err(|e| e.to_string())?;
        let mixed = lo <= 0.0 && hi >= 0.0;
        if mixed && clip != 0.0 {
            return Err(format!("v={v:?}, w={wv:?}: mixed signs but clip gave {clip}"));
        }
        if !mixed && !(lo <= clip && clip <= hi) {
            return Err(format!("v={v:?}, w={wv:?}: clip value {clip} left [{lo}, {hi}]"));
        }

        let translated = guarded_harmonic(&v, &w, SignPolicy::Translate { lambda: 1.0 })
            .map_err(|e| e.to_string())?;
        let slack = 1e-12 * peak;
        if translated < lo - slack || translated > hi + slack {
            return Err(format!(
                "v={v:?}, w={wv:?}: translate value {translated} left [{lo}, {hi}]"
            ));
        }
        Ok(())
    });
}

fn draw_scene_case(
    rng: &mut ChaCha8Rng,
    lo: usize,
    hi: usize,
) -> (Vec<f64>, Vec<f64>, PositiveSample, WeightVector) {
    let n = dimension(rng, lo, hi);
    let av = scene_values(rng, n);
    let wv = scene_weights(rng, n);
    let a = PositiveSample::new(&av).expect("generated values are positive");
    let w = WeightVector::new(&wv).expect("generated weights are positive");
    (av, wv, a, w)
}

fn draw_pair(rng: &mut ChaCha8Rng) -> (f64, f64, f64, f64) {
    (
        rng.random_range(0.5..20.0),
        rng.random_range(0.5..20.0),
        rng.random_range(0.05..1.0),
        rng.random_range(0.05..1.0),
    )
}

const CASES: [ParabolaCase; 3] = [ParabolaCase::Case1, ParabolaCase::Case2, ParabolaCase::Case3];

fn geometry_properties(suite: &mut Suite) {
    suite.random("vertex-interpolation", |rng| {
        let (a1, a2, w1, w2) = draw_pair(rng);
        let case = CASES[rng.random_range(0..3)];
        let pair = parabola_pair(a1, a2, w1, w2, case).map_err(|e| e.to_string())?;
        let scale = a1.max(a2).max(1.0);
        let checks = [
            ("p1(0)", pair.p1.eval(0.0), 0.0),
            ("p1(1)", pair.p1.eval(1.0), a1),
            ("p2(0)", pair.p2.eval(0.0), a2),
            ("p2(1)", pair.p2.eval(1.0), 0.0),
        ];
        for (label, got, want) in checks {
            if (got - want).abs() > 1e-12 * scale {
                return Err(format!(
                    "a=[{a1}, {a2}], w=[{w1}, {w2}], case {}: {label} = {got}, want {want}",
                    case.index()
                ));
            }
        }
        for (label, got) in [("p1", pair.p1.eval(pair.x_h)), ("p2", pair.p2.eval(pair.x_h))] {
            if (got - pair.y_h).abs() > 1e-11 * scale {
                return Err(format!(
                    "a=[{a1}, {a2}], w=[{w1}, {w2}], case {}: {label}(x_h) = {got} misses y_h = {}",
                    case.index(),
                    pair.y_h
                ));
            }
        }
        Ok(())
    });

    suite.random("case-consistency", |rng| {
        let (a1, a2, w1, w2) = draw_pair(rng);
        let a = PositiveSample::new(&[a1, a2]).map_err(|e| e.to_string())?;
        let w = WeightVector::new(&[w1, w2]).map_err(|e| e.to_string())?;
        let h = weighted_harmonic(&a, &w).map_err(|e| e.to_string())?;
        let wn = w.as_slice();
        let pairs: Vec<_> = CASES
            .iter()
            .map(|&case| parabola_pair(a1, a2, w1, w2, case))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;

        let x_h = pairs[0].x_h;
        if pairs.iter().any(|p| (p.x_h - x_h).abs() > 1e-15) {
            return Err(format!("a=[{a1}, {a2}], w=[{w1}, {w2}]: cases disagree on x_h"));
        }
        let chord = chord_height(a1, a2, x_h);
        if !rel_close(chord, h, 1e-12) {
            return Err(format!(
                "a=[{a1}, {a2}], w=[{w1}, {w2}]: chord at x_h reads {chord}, want h_w = {h}"
            ));
        }
        let wants = [wn[1] * h, wn[0] * h, h / 2.0];
        for (pair, want) in pairs.iter().zip(wants) {
            if !rel_close(pair.y_h, want, 1e-12) {
                return Err(format!(
                    "a=[{a1}, {a2}], w=[{w1}, {w2}], case {}: y_h = {} want {want}",
                    pair.case.index(),
                    pair.y_h
                ));
            }
        }
        Ok(())
    });

    suite.random("crossing-residuals", |rng| {
        let (av, wv, a, w) = draw_scene_case(rng, 2, 6);
        for variant in [CapVariant::Plane, CapVariant::Paraboloid] {
            let scene = build_scene(&a, &w, variant).map_err(|e| e.to_string())?;
            let n = scene.n();
            for (i, &coord) in scene.x_bar[..n - 1].iter().enumerate() {
                if !(0.0 < coord && coord < 1.0) {
                    return Err(format!(
                        "{} ({variant:?}): base coordinate {i} of the crossing is {coord}, not interior",
                        fmt_case(&av, &wv)
                    ));
                }
            }
            if scene.x_bar[n - 1] <= 0.0 {
                return Err(format!(
                    "{} ({variant:?}): crossing height {} is not positive",
                    fmt_case(&av, &wv),
                    scene.x_bar[n - 1]
                ));
            }
            let res = surface_residuals(&scene, &scene.x_bar).map_err(|e| e.to_string())?;
            let worst = res.iter().fold(0.0f64, |acc, r| acc.max(r.abs()));
            if worst > 1e-10 {
                return Err(format!(
                    "{} ({variant:?}): residual {worst:e} at the analytic crossing",
                    fmt_case(&av, &wv)
                ));
            }
        }
        Ok(())
    });

    suite.random("analytic-numeric-agreement", |rng| {
        let (av, wv, a, w) = draw_scene_case(rng, 2, 6);
        let height_cap = av.iter().cloned().fold(0.0f64, f64::max);
        for variant in [CapVariant::Plane, CapVariant::Paraboloid] {
            let scene = build_scene(&a, &w, variant).map_err(|e| e.to_string())?;
            for _ in 0..2 {
                let start = newton_start(rng, scene.n(), height_cap);
                let report = numeric_intersection(&scene, &start).map_err(|e| {
                    format!("{} ({variant:?}) from {start:?}: {e}", fmt_case(&av, &wv))
                })?;
                let gap = report
                    .root
                    .iter()
                    .zip(&scene.x_bar)
                    .fold(0.0f64, |acc, (r, x)| acc.max((r - x).abs()));
                if gap > 1e-8 {
                    return Err(format!(
                        "{} ({variant:?}) from {start:?}: solver landed {gap:e} away from the crossing",
                        fmt_case(&av, &wv)
                    ));
                }
            }
        }
        Ok(())
    });

    suite.random("plane-readings", |rng| {
        let (av, wv, a, w) = draw_scene_case(rng, 2, 6);
        let scene = build_scene(&a, &w, CapVariant::Plane).map_err(|e| e.to_string())?;
        let heights = prism_heights(&scene);
        if !rel_close(heights.at_x_bar, scene.h_w, 1e-12) {
            return Err(format!(
                "{}: plane over the crossing reads {}, want h_w = {}",
                fmt_case(&av, &wv),
                heights.at_x_bar,
                scene.h_w
            ));
        }
        if !rel_close(heights.at_barycenter, scene.m_w, 1e-12) {
            return Err(format!(
                "{}: plane over the barycenter reads {}, want m_w = {}",
                fmt_case(&av, &wv),
                heights.at_barycenter,
                scene.m_w
            ));
        }
        Ok(())
    });

    suite.random("uniform-degeneracy", |rng| {
        let n = dimension(rng, 2, 6);
        let av = scene_values(rng, n);
        let a = PositiveSample::new(&av).expect("generated values are positive");
        let w = WeightVector::uniform(n).expect("n >= 2");
        let plane = build_scene(&a, &w, CapVariant::Plane).map_err(|e| e.to_string())?;
        if plane.axis.iter().any(|s| s.b != 0.0) {
            return Err(format!("a={av:?}, uniform w: plane-cap scene kept curvature"));
        }
        let parab = build_scene(&a, &w, CapVariant::Paraboloid).map_err(|e| e.to_string())?;
        let worst = parab
            .axis
            .iter()
            .map(|s| s.b.abs())
            .chain(parab.cap.coefficients(n - 1).iter().map(|c| c.abs()))
            .fold(0.0f64, f64::max);
        if worst > 1e-14 {
            return Err(format!(
                "a={av:?}, uniform w: paraboloid-cap coefficient {worst:e} above degeneracy level"
            ));
        }
        Ok(())
    });

    suite.random("corollary-coherence", |rng| {
        let (av, wv, a, w) = draw_scene_case(rng, 2, 6);
        let scene = corollary_scene(&a, &w).map_err(|e| e.to_string())?;
        let n = scene.n();
        let star = scene.star.as_ref().expect("rescaled scenes carry star data");
        let base = &scene.x_bar[..n - 1];
        if scene.axis.iter().any(|s| s.b != 0.0) {
            return Err(format!("{}: rescaled axis sections kept curvature", fmt_case(&av, &wv)));
        }
        let checks = [
            ("crossing height", scene.x_bar[n - 1], scene.h_w),
            ("h_star", star.h_star, n as f64 * scene.h_w),
            ("star plane at crossing", star.plane.eval(base), star.h_star),
            ("plane at crossing", scene.plane.eval(base), scene.h_w),
        ];
        for (label, got, want) in checks {
            if !rel_close(got, want, 1e-12) {
                return Err(format!(
                    "{}: {label} = {got}, want {want}",
                    fmt_case(&av, &wv)
                ));
            }
        }
        Ok(())
    });
}

fn draw_stencil(rng: &mut ChaCha8Rng) -> Stencil {
    let mut x = [0.0; 4];
    x[0] = rng.random_range(-1.0..1.0);
    for i in 1..4 {
        x[i] = x[i - 1] + rng.random_range(0.1..2.0);
    }
    let f = [
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    ];
    Stencil::new(x, f).expect("spacings are positive")
}

fn draw_grid(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let mut x = Vec::with_capacity(len);
    let mut t = rng.random_range(-1.0..1.0);
    for _ in 0..len {
        x.push(t);
        t += rng.random_range(0.05..1.5);
    }
    x
}

fn reconstruction_properties(suite: &mut Suite) {
    suite.random("decomposition-exactness", |rng| {
        let s = draw_stencil(rng);
        let baseline = baseline_midpoint(&s);
        let reassembled = decompose(&s).reassemble();
        if rel_close(reassembled, baseline, 1e-13) {
            Ok(())
        } else {
            Err(format!(
                "stencil x={:?}, f={:?}: split reassembles to {reassembled}, baseline {baseline}",
                s.x(),
                s.f()
            ))
        }
    });

    suite.random("quadratic-reproduction", |rng| {
        let len = rng.random_range(8..=16);
        let x = draw_grid(rng, len);
        let (c2, c1, c0) = (
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        );
        let q = |t: f64| (c2 * t + c1) * t + c0;
        let fx: Vec<f64> = x.iter().map(|&t| q(t)).collect();
        let g = GridFunction::new(&x, &fx).map_err(|e| e.to_string())?;
        let linear = reconstruct(&g, Operator::Linear, SignPolicy::default());
        let pph = reconstruct(&g, Operator::Pph, SignPolicy::default());
        for ((m, lin), ph) in interior_midpoints(&g).iter().zip(&linear).zip(&pph) {
            let want = q(*m);
            let scale = want.abs().max(1.0);
            if (lin - want).abs() > 1e-12 * scale {
                return Err(format!(
                    "quadratic ({c2}, {c1}, {c0}) on x={x:?}: linear predicts {lin} at {m}, want {want}"
                ));
            }
            if (ph - lin).abs() > 1e-12 * scale {
                return Err(format!(
                    "quadratic ({c2}, {c1}, {c0}) on x={x:?}: pph {ph} differs from linear {lin} at {m}"
                ));
            }
        }
        Ok(())
    });

    suite.random("pph-jump-boundedness", |rng| {
        let len = rng.random_range(10..=20);
        let x = draw_grid(rng, len);
        let k = rng.random_range(4..len - 3);
        let fx: Vec<f64> = (0..len).map(|i| if i < k { 0.0 } else { 1.0 }).collect();
        let g = GridFunction::new(&x, &fx).map_err(|e| e.to_string())?;
        let report = compare_operators(&g, SignPolicy::default());
        if let Some(bad) = report.pph.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(format!(
                "jump at node {k} of x={x:?}: pph prediction {bad} left the data range"
            ));
        }
        if report.pph_overshoot != 0.0 {
            return Err(format!(
                "jump at node {k} of x={x:?}: pph overshoot {} is not exactly zero",
                report.pph_overshoot
            ));
        }
        Ok(())
    });

    suite.fixed("step-localization", || {
        let n = 64;
        let x: Vec<f64> = (0..=n).map(|j| j as f64 / n as f64).collect();
        let fx: Vec<f64> = x.iter().map(|&t| crate::signals::step(t)).collect();
        let g = GridFunction::new(&x, &fx).map_err(|e| e.to_string())?;
        let report = compare_operators(&g, SignPolicy::default());

        if (report.linear_overshoot - 0.0625).abs() > 1e-14 {
            return Err(format!(
                "linear overshoot {} differs from 1/16 of the unit jump",
                report.linear_overshoot
            ));
        }
        let violations: Vec<f64> = report
            .linear
            .iter()
            .filter_map(|&p| {
                let excess = (0.0 - p).max(p - 1.0);
                (excess > 0.0).then_some(excess)
            })
            .collect();
        if violations.len() != 2 {
            return Err(format!(
                "expected exactly two linear predictions outside the data range, found {}",
                violations.len()
            ));
        }
        if violations.iter().any(|v| (v - 0.0625).abs() > 1e-14) {
            return Err(format!("violation magnitudes {violations:?} are not all 1/16"));
        }
        if report.pph_overshoot != 0.0 {
            return Err(format!("pph overshoot {} is not exactly zero", report.pph_overshoot));
        }
        Ok(())
    });

    suite.fixed("smooth-order", || {
        for op in [Operator::Linear, Operator::Pph] {
            let rows = convergence_order(&f64::sin, (0.6, 2.5), 4, op, SignPolicy::default())
                .map_err(|e| e.to_string())?;
            let last = rows.last().and_then(|r| r.slope);
            match last {
                Some(slope) if slope >= 3.5 => {}
                other => {
                    return Err(format!(
                        "{op:?} finest refinement slope {other:?} fell below 3.5"
                    ));
                }
            }
        }
        Ok(())
    });

    suite.fixed("cubic-exactness", || {
        let rows = convergence_order(
            &crate::signals::cubic,
            (0.0, 1.0),
            6,
            Operator::Linear,
            SignPolicy::default(),
        )
        .map_err(|e| e.to_string())?;
        for row in rows {
            if row.max_error > 1e-13 {
                return Err(format!(
                    "linear operator missed the cubic by {:e} at level {}",
                    row.max_error, row.level
                ));
            }
        }
        Ok(())
    });

    suite.fixed("translate-clip-agreement", || {
        // One-signed curvature, positive data: the two policies guard the
        // same harmonic blend, so their gap must shrink at second order.
        let f = |t: f64| 2.0 + (3.0 * t).sin();
        let mut diffs = Vec::new();
        for level in 0..4 {
            let n = 16 << level;
            let x: Vec<f64> = (0..=n).map(|j| j as f64 / n as f64).collect();
            let fx: Vec<f64> = x.iter().map(|&t| f(t)).collect();
            let g = GridFunction::new(&x, &fx).map_err(|e| e.to_string())?;
            let clip = reconstruct(&g, Operator::Pph, SignPolicy::ClipToZero);
            let translate =
                reconstruct(&g, Operator::Pph, SignPolicy::Translate { lambda: 1.0 });
            let diff = clip
                .iter()
                .zip(&translate)
                .fold(0.0f64, |acc, (c, t)| acc.max((c - t).abs()));
            diffs.push(diff);
        }
        for pair in diffs.windows(2) {
            if pair[1] <= 1e-14 {
                continue;
            }
            let slope = (pair[0] / pair[1]).log2();
            if slope < 1.75 {
                return Err(format!(
                    "policy gap sequence {diffs:?} refined with slope {slope}, below second order"
                ));
            }
        }
        Ok(())
    });
}
