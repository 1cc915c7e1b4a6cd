//! Command bodies behind the `hk` subcommands.
//!
//! Each body validates input, computes through `hk-core`, and hands one
//! `{config, results, provenance}` envelope to the report layer. Numeric
//! failure is never smoothed over: a non-converged solve aborts the run
//! with its own exit code.

use hk_core::geometry::{chord_height, surface_residuals};
use hk_core::reconstruction::BASE_INTERVALS;
use hk_core::{
    build_scene, compare_operators, convergence_order, corollary_scene, mean_gap,
    numeric_intersection, parabola_pair, prism_heights, sample_surfaces, scaled_uniform_harmonic,
    weighted_arithmetic, weighted_harmonic, FigureData, GridFunction, Marker, NewtonReport,
    Operator, OrderRow, ParabolaPair, PositiveSample, PrismScene, ReconReport, ScalarEntry,
    SignPolicy, SurfaceTrack, WeightVector,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::cli::{
    case_from_index, Cli, Command, FigureArgs, Format, GeometryArgs, MeansArgs, ReconArgs,
    SignalArg, VerifyArgs,
};
use crate::report::{csv_float, deliver, CliError, CliResult, Envelope};
use crate::{signals, verify};

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Means(args) => cmd_means(args),
        Command::Geometry(args) => cmd_geometry(args),
        Command::Figure(args) => cmd_figure(args),
        Command::Recon(args) => cmd_recon(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

/// Builds the sample, surfacing validation failures as input errors.
fn make_sample(a: &[f64]) -> CliResult<PositiveSample> {
    PositiveSample::new(a).map_err(|e| CliError::Input(format!("--a: {e}")))
}

/// Parses `--w`: either the literal `uniform` or a comma-separated list
/// matching `--a` in length. Returns the vector plus its config echo.
fn parse_weights(spec: &str, n: usize) -> CliResult<(WeightVector, Value)> {
    if spec == "uniform" {
        let w = WeightVector::uniform(n).map_err(|e| CliError::Input(format!("--w: {e}")))?;
        return Ok((w, Value::String("uniform".into())));
    }
    let parsed: Vec<f64> = spec
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Input(format!("--w: `{tok}` is not a number")))
        })
        .collect::<CliResult<_>>()?;
    if parsed.len() != n {
        return Err(CliError::Input(format!(
            "--w has {} entries but --a has {n}",
            parsed.len()
        )));
    }
    let w = WeightVector::new(&parsed).map_err(|e| CliError::Input(format!("--w: {e}")))?;
    Ok((w, json!(parsed)))
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

fn max_coordinate_gap(got: &[f64], want: &[f64]) -> f64 {
    got.iter().zip(want).fold(0.0f64, |acc, (g, w)| acc.max((g - w).abs()))
}

/// JSON is always available; CSV only where a flat table projection
/// exists.
fn reject_csv(format: Format, command: &str) -> CliResult<()> {
    if format == Format::Csv {
        return Err(CliError::Input(format!(
            "csv output is a table projection and does not cover `{command}`; use --format json"
        )));
    }
    Ok(())
}

fn cmd_means(args: MeansArgs) -> CliResult<()> {
    reject_csv(args.format, "means")?;
    let a = make_sample(&args.a)?;
    let (w, w_echo) = parse_weights(&args.w, a.len())?;

    let report = mean_gap(&a, &w)?;
    let rescaled = scaled_uniform_harmonic(&a, &w)?;
    let n_times_h = report.n as f64 * report.h_w;
    let scaling_error = (rescaled - n_times_h).abs() / n_times_h.abs().max(1.0);

    let config = json!({
        "command": "means",
        "a": args.a,
        "w": w_echo,
        "n": report.n,
        "format": args.format.name(),
    });
    let results = json!({
        "n": report.n,
        "h_w": report.h_w,
        "m_w": report.m_w,
        "gap": report.gap_closed_form,
        "gap_direct": report.gap_direct,
        "gap_closed_form": report.gap_closed_form,
        "gap_identity_error": (report.gap_direct - report.gap_closed_form).abs(),
        "min_bound": report.min_bound,
        "strict_bound_holds": report.h_w < report.min_bound,
        "scaling_relation": {
            "rescaled_uniform_harmonic": rescaled,
            "n_times_h_w": n_times_h,
            "relative_error": scaling_error,
            "holds": scaling_error <= 1e-12,
        },
    });
    deliver(&Envelope::new(config, results, args.seed).to_json(), args.out.as_deref())
}

fn newton_block(report: &NewtonReport, start: &[f64], analytic: &[f64]) -> Value {
    json!({
        "start": start,
        "root": report.root,
        "iterations": report.iterations,
        "max_residual": report.max_residual,
        "max_gap_to_analytic": max_coordinate_gap(&report.root, analytic),
    })
}

/// Scene assembly shared by `geometry` and `figure`.
fn build_variant_scene(
    a: &PositiveSample,
    w: &WeightVector,
    variant: crate::cli::VariantArg,
) -> CliResult<PrismScene> {
    let scene = match variant.cap() {
        Some(cap) => build_scene(a, w, cap)?,
        None => corollary_scene(a, w)?,
    };
    Ok(scene)
}

fn cmd_geometry(args: GeometryArgs) -> CliResult<()> {
    reject_csv(args.format, "geometry")?;
    let a = make_sample(&args.a)?;
    let (w, w_echo) = parse_weights(&args.w, a.len())?;
    if args.case.is_some() && a.len() != 2 {
        return Err(CliError::Input(format!(
            "--case selects a two-point construction, but --a has {} entries",
            a.len()
        )));
    }

    let scene = build_variant_scene(&a, &w, args.variant)?;
    let n = scene.n();
    let base = &scene.x_bar[..n - 1];

    let residuals = surface_residuals(&scene, &scene.x_bar)?;
    let axis_b: Vec<f64> = scene.axis.iter().map(|s| s.b).collect();
    let cap_c = scene.cap.coefficients(n - 1);
    let degenerate = max_abs(&axis_b) <= 1e-14 && max_abs(&cap_c) <= 1e-14;
    let heights = prism_heights(&scene);

    // One canonical start plus seeded random ones; any non-convergence
    // aborts the command with the solver's exit code.
    let mut canonical = vec![0.5; n - 1];
    canonical.push(scene.m_w);
    let newton = numeric_intersection(&scene, &canonical)?;
    let height_cap = args.a.iter().cloned().fold(0.0f64, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut random_starts = Vec::new();
    for _ in 0..2 {
        let start = verify::newton_start(&mut rng, n, height_cap);
        let report = numeric_intersection(&scene, &start)?;
        random_starts.push(newton_block(&report, &start, &scene.x_bar));
    }

    let mut results = Map::new();
    results.insert("n".into(), json!(n));
    results.insert("variant".into(), json!(args.variant.name()));
    results.insert("kind".into(), json!(format!("{:?}", scene.kind)));
    results.insert("w_normalized".into(), json!(scene.w.as_slice()));
    results.insert("h_w".into(), json!(scene.h_w));
    results.insert("m_w".into(), json!(scene.m_w));
    results.insert("x_bar".into(), json!(scene.x_bar));
    results.insert("barycenter".into(), json!(scene.barycenter));
    results.insert("axis_b".into(), json!(axis_b));
    results.insert("cap_c".into(), json!(cap_c));
    results.insert("residuals_at_x_bar".into(), json!(residuals));
    results.insert("max_residual".into(), json!(max_abs(&residuals)));
    results.insert(
        "heights".into(),
        json!({"at_x_bar": heights.at_x_bar, "at_barycenter": heights.at_barycenter}),
    );
    results.insert("degenerate".into(), json!(degenerate));
    results.insert(
        "newton".into(),
        {
            let mut block = newton_block(&newton, &canonical, &scene.x_bar);
            block["random_starts"] = json!(random_starts);
            block
        },
    );
    if let Some(star) = &scene.star {
        results.insert(
            "star".into(),
            json!({
                "h_star": star.h_star,
                "m_star": star.m_star,
                "plane_at_x_bar": star.plane.eval(base),
            }),
        );
    }
    if let Some(index) = args.case {
        let av = a.as_slice();
        let wv = scene.w.as_slice();
        let pair = parabola_pair(av[0], av[1], wv[0], wv[1], case_from_index(index))?;
        let mut block = serde_json::to_value(&pair).expect("pair serializes");
        block["index"] = json!(index);
        block["chord_at_x_h"] = json!(chord_height(av[0], av[1], pair.x_h));
        results.insert("case".into(), block);
    }

    let config = json!({
        "command": "geometry",
        "a": args.a,
        "w": w_echo,
        "n": n,
        "variant": args.variant.name(),
        "case": args.case,
        "format": args.format.name(),
    });
    deliver(
        &Envelope::new(config, Value::Object(results), args.seed).to_json(),
        args.out.as_deref(),
    )
}

/// Figure for one of the three two-point constructions: both parabolas,
/// the chord, and the crossing markers.
fn pair_figure(pair: &ParabolaPair, a: &[f64], w: &[f64], resolution: usize) -> FigureData {
    let denom = (resolution - 1) as f64;
    let xs: Vec<f64> = (0..resolution).map(|j| j as f64 / denom).collect();
    let track = |name: &str, f: &dyn Fn(f64) -> f64| SurfaceTrack {
        name: name.into(),
        points: xs.iter().map(|&x| vec![x, f(x)]).collect(),
    };
    let surfaces = vec![
        track("p1", &|x| pair.p1.eval(x)),
        track("p2", &|x| pair.p2.eval(x)),
        track("chord", &|x| chord_height(a[0], a[1], x)),
    ];
    let markers = vec![
        Marker { name: "crossing".into(), point: vec![pair.x_h, pair.y_h] },
        Marker {
            name: "crossing_on_chord".into(),
            point: vec![pair.x_h, chord_height(a[0], a[1], pair.x_h)],
        },
        Marker {
            name: "barycenter_on_chord".into(),
            point: vec![w[0], chord_height(a[0], a[1], w[0])],
        },
    ];
    let scalars = vec![
        ScalarEntry { name: "x_h".into(), value: pair.x_h },
        ScalarEntry { name: "y_h".into(), value: pair.y_h },
        ScalarEntry { name: "p1_q2".into(), value: pair.p1.q2 },
        ScalarEntry { name: "p1_q1".into(), value: pair.p1.q1 },
        ScalarEntry { name: "p1_q0".into(), value: pair.p1.q0 },
        ScalarEntry { name: "p2_q2".into(), value: pair.p2.q2 },
        ScalarEntry { name: "p2_q1".into(), value: pair.p2.q1 },
        ScalarEntry { name: "p2_q0".into(), value: pair.p2.q0 },
    ];
    FigureData { n: 2, resolution, surfaces, markers, scalars }
}

/// Every marker that encodes a mean must agree with the mean computed
/// directly; a mismatch is a property failure, not an input problem.
fn check_scene_markers(fig: &FigureData, scene: &PrismScene) -> CliResult<()> {
    for marker in &fig.markers {
        let want = match marker.name.as_str() {
            "x_bar_on_plane" => Some(scene.h_w),
            "barycenter_on_plane" => Some(scene.m_w),
            "x_bar_on_star_plane" => scene.star.as_ref().map(|s| s.h_star),
            _ => None,
        };
        let Some(want) = want else { continue };
        let got = *marker.point.last().expect("markers carry a height");
        if (got - want).abs() > 1e-12 * want.abs().max(1.0) {
            return Err(CliError::Property(format!(
                "figure marker `{}` reads {got} but the mean it encodes is {want}",
                marker.name
            )));
        }
    }
    Ok(())
}

fn check_pair_markers(fig: &FigureData, h_w: f64, m_w: f64, w1: f64) -> CliResult<()> {
    for marker in &fig.markers {
        let want = match marker.name.as_str() {
            "crossing_on_chord" => Some(h_w),
            "barycenter_on_chord" => {
                // The chord over the weight barycenter reads the
                // arithmetic mean; its abscissa is w1.
                debug_assert!((marker.point[0] - w1).abs() <= f64::EPSILON);
                Some(m_w)
            }
            _ => None,
        };
        let Some(want) = want else { continue };
        let got = *marker.point.last().expect("markers carry a height");
        if (got - want).abs() > 1e-12 * want.abs().max(1.0) {
            return Err(CliError::Property(format!(
                "figure marker `{}` reads {got} but the mean it encodes is {want}",
                marker.name
            )));
        }
    }
    Ok(())
}

fn figure_csv(fig: &FigureData, header: &str) -> String {
    let coord_names: Vec<String> =
        (1..fig.n).map(|i| format!("x{i}")).chain(["xn".to_string()]).collect();
    let coord_header = coord_names.join(",");

    let mut out = String::from(header);
    for surface in &fig.surfaces {
        out.push_str(&format!("# surface={}\n{coord_header}\n", surface.name));
        for point in &surface.points {
            let row: Vec<String> = point.iter().map(|&v| csv_float(v)).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
    }
    out.push_str(&format!("# markers\nname,{coord_header}\n"));
    for marker in &fig.markers {
        let row: Vec<String> = marker.point.iter().map(|&v| csv_float(v)).collect();
        out.push_str(&format!("{},{}\n", marker.name, row.join(",")));
    }
    out.push_str("# scalars\nname,value\n");
    for scalar in &fig.scalars {
        out.push_str(&format!("{},{}\n", scalar.name, csv_float(scalar.value)));
    }
    out
}

fn cmd_figure(args: FigureArgs) -> CliResult<()> {
    let a = make_sample(&args.a)?;
    let n = a.len();
    let (w, w_echo) = parse_weights(&args.w, n)?;
    if n > 3 {
        return Err(CliError::Input(format!(
            "surfaces exist for two or three sample points; --a has {n}. \
             Use the geometry command for higher dimensions"
        )));
    }
    if args.case.is_some() && n != 2 {
        return Err(CliError::Input(format!(
            "--case selects a two-point construction, but --a has {n} entries"
        )));
    }
    let resolution = args.resolution.unwrap_or(if n == 2 { 101 } else { 51 });
    if resolution < 2 {
        return Err(CliError::Input(format!(
            "--resolution must be at least 2, got {resolution}"
        )));
    }

    let fig = match args.case {
        Some(index) => {
            let av = a.as_slice();
            let wv = w.as_slice();
            let pair = parabola_pair(av[0], av[1], wv[0], wv[1], case_from_index(index))?;
            let fig = pair_figure(&pair, av, wv, resolution);
            let h_w = weighted_harmonic(&a, &w)?;
            let m_w = weighted_arithmetic(&a, &w)?;
            check_pair_markers(&fig, h_w, m_w, wv[0])?;
            fig
        }
        None => {
            let scene = build_variant_scene(&a, &w, args.variant)?;
            let fig = sample_surfaces(&scene, resolution)?;
            check_scene_markers(&fig, &scene)?;
            fig
        }
    };

    let config = json!({
        "command": "figure",
        "a": args.a,
        "w": w_echo,
        "n": n,
        "variant": args.variant.name(),
        "case": args.case,
        "resolution": resolution,
        "format": args.format.name(),
    });
    let envelope = Envelope::new(
        config,
        serde_json::to_value(&fig).expect("figure serializes"),
        args.seed,
    );
    let text = match args.format {
        Format::Json => envelope.to_json(),
        Format::Csv => figure_csv(&fig, &envelope.csv_header()),
    };
    deliver(&text, args.out.as_deref())
}

fn order_cell(row: &OrderRow) -> Value {
    json!({"max_error": row.max_error, "slope": row.slope})
}

struct LevelStudy {
    linear: Option<Vec<OrderRow>>,
    pph: Option<Vec<OrderRow>>,
    finest: ReconReport,
    levels: usize,
    domain: (f64, f64),
}

fn run_level_study(args: &ReconArgs) -> CliResult<LevelStudy> {
    let (f, domain) =
        signals::built_in(args.signal.name()).expect("caller checked for a built-in signal");
    if args.levels == 0 {
        return Err(CliError::Input("--levels must be at least 1".into()));
    }
    if args.levels > 16 {
        return Err(CliError::Input(format!(
            "--levels {} would sample {} intervals; 16 levels is the supported ceiling",
            args.levels,
            BASE_INTERVALS << (args.levels - 1)
        )));
    }
    let policy = SignPolicy::default();
    let study = |op: Operator| -> CliResult<Option<Vec<OrderRow>>> {
        if args.operator.wants(op) {
            Ok(Some(convergence_order(&f, domain, args.levels, op, policy)?))
        } else {
            Ok(None)
        }
    };
    let linear = study(Operator::Linear)?;
    let pph = study(Operator::Pph)?;

    let intervals = BASE_INTERVALS << (args.levels - 1);
    let h = (domain.1 - domain.0) / intervals as f64;
    let x: Vec<f64> = (0..=intervals).map(|j| domain.0 + j as f64 * h).collect();
    let fx: Vec<f64> = x.iter().map(|&t| f(t)).collect();
    let finest = compare_operators(&GridFunction::new(&x, &fx)?, policy);
    Ok(LevelStudy { linear, pph, finest, levels: args.levels, domain })
}

fn level_table(study: &LevelStudy) -> Vec<Value> {
    let rows = study.linear.as_ref().or(study.pph.as_ref()).expect("one operator ran");
    (0..study.levels)
        .map(|l| {
            let mut row = Map::new();
            row.insert("level".into(), json!(l));
            row.insert("intervals".into(), json!(rows[l].intervals));
            row.insert("h".into(), json!(rows[l].h));
            if let Some(linear) = &study.linear {
                row.insert("linear".into(), order_cell(&linear[l]));
            }
            if let Some(pph) = &study.pph {
                row.insert("pph".into(), order_cell(&pph[l]));
            }
            Value::Object(row)
        })
        .collect()
}

fn overshoot_block(args: &ReconArgs, report: &ReconReport) -> Value {
    let mut block = Map::new();
    if args.operator.wants(Operator::Linear) {
        block.insert("linear".into(), json!(report.linear_overshoot));
    }
    if args.operator.wants(Operator::Pph) {
        block.insert("pph".into(), json!(report.pph_overshoot));
    }
    Value::Object(block)
}

fn slope_cell(row: &OrderRow) -> String {
    row.slope.map(csv_float).unwrap_or_default()
}

fn recon_levels_csv(study: &LevelStudy, args: &ReconArgs, header: &str) -> String {
    let mut out = String::from(header);
    let mut columns = vec!["level".to_string(), "intervals".into(), "h".into()];
    if study.linear.is_some() {
        columns.extend(["linear_max_error".into(), "linear_slope".into()]);
    }
    if study.pph.is_some() {
        columns.extend(["pph_max_error".into(), "pph_slope".into()]);
    }
    out.push_str(&format!("# table=levels\n{}\n", columns.join(",")));
    let template = study.linear.as_ref().or(study.pph.as_ref()).expect("one operator ran");
    for l in 0..study.levels {
        let mut cells = vec![
            l.to_string(),
            template[l].intervals.to_string(),
            csv_float(template[l].h),
        ];
        if let Some(linear) = &study.linear {
            cells.push(csv_float(linear[l].max_error));
            cells.push(slope_cell(&linear[l]));
        }
        if let Some(pph) = &study.pph {
            cells.push(csv_float(pph[l].max_error));
            cells.push(slope_cell(&pph[l]));
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out.push_str("# table=overshoot\noperator,overshoot\n");
    if args.operator.wants(Operator::Linear) {
        out.push_str(&format!("linear,{}\n", csv_float(study.finest.linear_overshoot)));
    }
    if args.operator.wants(Operator::Pph) {
        out.push_str(&format!("pph,{}\n", csv_float(study.finest.pph_overshoot)));
    }
    out
}

fn recon_custom_csv(report: &ReconReport, args: &ReconArgs, header: &str) -> String {
    let mut out = String::from(header);
    let mut columns = vec!["midpoint".to_string()];
    if args.operator.wants(Operator::Linear) {
        columns.push("linear".into());
    }
    if args.operator.wants(Operator::Pph) {
        columns.push("pph".into());
    }
    out.push_str(&format!("# table=predictions\n{}\n", columns.join(",")));
    for (i, &m) in report.midpoints.iter().enumerate() {
        let mut cells = vec![csv_float(m)];
        if args.operator.wants(Operator::Linear) {
            cells.push(csv_float(report.linear[i]));
        }
        if args.operator.wants(Operator::Pph) {
            cells.push(csv_float(report.pph[i]));
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out.push_str("# table=overshoot\noperator,overshoot\n");
    if args.operator.wants(Operator::Linear) {
        out.push_str(&format!("linear,{}\n", csv_float(report.linear_overshoot)));
    }
    if args.operator.wants(Operator::Pph) {
        out.push_str(&format!("pph,{}\n", csv_float(report.pph_overshoot)));
    }
    out
}

fn cmd_recon(args: ReconArgs) -> CliResult<()> {
    if args.signal == SignalArg::Custom {
        let Some(path) = &args.samples else {
            return Err(CliError::Input(
                "--signal custom needs --samples FILE with fields `x` and `f`".into(),
            ));
        };
        let g = signals::load_samples(path)?;
        let report = compare_operators(&g, SignPolicy::default());

        let config = json!({
            "command": "recon",
            "signal": "custom",
            "samples": path.display().to_string(),
            "operator": args.operator.name(),
            "format": args.format.name(),
        });
        let mut results = Map::new();
        results.insert("points".into(), json!(g.len()));
        results.insert("midpoints".into(), json!(report.midpoints));
        if args.operator.wants(Operator::Linear) {
            results.insert("linear".into(), json!(report.linear));
        }
        if args.operator.wants(Operator::Pph) {
            results.insert("pph".into(), json!(report.pph));
        }
        results.insert("data_min".into(), json!(report.data_min));
        results.insert("data_max".into(), json!(report.data_max));
        results.insert("overshoot".into(), overshoot_block(&args, &report));

        let envelope = Envelope::new(config, Value::Object(results), args.seed);
        let text = match args.format {
            Format::Json => envelope.to_json(),
            Format::Csv => recon_custom_csv(&report, &args, &envelope.csv_header()),
        };
        return deliver(&text, args.out.as_deref());
    }

    if args.samples.is_some() {
        return Err(CliError::Input(format!(
            "--samples only applies to --signal custom, not `{}`",
            args.signal.name()
        )));
    }
    let study = run_level_study(&args)?;

    let config = json!({
        "command": "recon",
        "signal": args.signal.name(),
        "levels": args.levels,
        "operator": args.operator.name(),
        "format": args.format.name(),
    });
    let results = json!({
        "domain": [study.domain.0, study.domain.1],
        "base_intervals": BASE_INTERVALS,
        "table": level_table(&study),
        "data_min": study.finest.data_min,
        "data_max": study.finest.data_max,
        "overshoot": overshoot_block(&args, &study.finest),
    });
    let envelope = Envelope::new(config, results, args.seed);
    let text = match args.format {
        Format::Json => envelope.to_json(),
        Format::Csv => recon_levels_csv(&study, &args, &envelope.csv_header()),
    };
    deliver(&text, args.out.as_deref())
}

fn cmd_verify(args: VerifyArgs) -> CliResult<()> {
    reject_csv(args.format, "verify")?;
    if args.cases == 0 {
        return Err(CliError::Input("--cases must be at least 1".into()));
    }
    let report = verify::run_suite(args.seed, args.cases, args.inject_bug);

    let config = json!({
        "command": "verify",
        "cases": args.cases,
        "inject_bug": args.inject_bug,
        "format": args.format.name(),
    });
    let results = serde_json::to_value(&report).expect("verify report serializes");
    let envelope = Envelope::new(config, results, args.seed);
    deliver(&envelope.to_json(), args.out.as_deref())?;

    if let Some(worst) = report.first_failing() {
        let witness = worst.first_failure.as_deref().unwrap_or("input not recorded");
        return Err(CliError::Property(format!(
            "property {} failed {} of {} cases; minimal reproducing input: {witness}",
            worst.name, worst.failures, worst.cases_run
        )));
    }
    Ok(())
}
