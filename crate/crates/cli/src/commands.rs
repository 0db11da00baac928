use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use geotan_core::content::{hausdorff_content_upper, packing_content_lower, packing_premeasure_estimate, SampleSpace};
use geotan_core::demos::{run_demo, DemoResult, DEMO_NAMES};
use geotan_core::generators::{build_ball_tree, BallTreeOptions, GeneratorSpec};
use geotan_core::gh::{dgh_window, pgh_oracle, read_metric_csv, FiniteMetricSpace, SearchMode};
use geotan_core::pointset::{read_point_csv, write_point_csv};
use geotan_core::report::to_json;
use geotan_core::tangent::{analyze, dyadic_scales, AnalysisMode, AnalyzeOptions};
use geotan_core::{EuclideanPointSet, Thresholds};

use crate::{svg, AnalyzeArgs, Cli, Command, Failure, GenerateArgs, GhArgs, Mode, PackArgs, PackMode, Search, SvgArgs};

type Outcome = Result<(), Failure>;

pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Generate(a) => generate(cli, a),
        Command::Analyze(a) => analyze_cmd(cli, a),
        Command::Pack(a) => pack(cli, a),
        Command::Ghdist(a) => ghdist(cli, a),
        Command::Demo(a) => demo(cli, &a.name),
        Command::Svg(a) => svg_cmd(cli, a),
    }
}

fn emit(cli: &Cli, bytes: &[u8]) -> Outcome {
    let res = match &cli.out {
        Some(path) => std::fs::write(path, bytes),
        None => std::io::stdout().lock().write_all(bytes),
    };
    match res {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Data(format!("cannot write output: {e}"))),
        _ => Ok(()),
    }
}

fn emit_json<T: serde::Serialize + ?Sized>(cli: &Cli, value: &T) -> Outcome {
    let mut text = to_json(value)?;
    text.push('\n');
    emit(cli, text.as_bytes())
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn load_points(path: &Path) -> Result<EuclideanPointSet, Failure> {
    read_point_csv(open(path)?).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn load_metric(path: &Path) -> Result<FiniteMetricSpace, Failure> {
    read_metric_csv(open(path)?).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn generator_spec(a: &GenerateArgs) -> Result<GeneratorSpec, Failure> {
    if let Some(path) = &a.spec {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
        return serde_json::from_str(&text).map_err(|e| Failure::Data(format!("invalid generator spec: {e}")));
    }
    let name = a.name.as_deref().ok_or_else(|| Failure::Usage("generate needs --name or --spec".into()))?;
    let spec = match name {
        "spiral" => GeneratorSpec::Spiral {
            t_min: a.t_min.unwrap_or(1e-4),
            t_max: a.t_max.unwrap_or(1.0),
            h: a.h.unwrap_or(1e-3),
        },
        "spiked_cube" => GeneratorSpec::SpikedCube {
            n: a.n.unwrap_or(2),
            k_max: a.k_max.or(a.depth).unwrap_or(4),
            h: a.h.unwrap_or(1.0 / 64.0),
            spike_step: a.spike_step,
        },
        "whitney_disks" => GeneratorSpec::WhitneyDisks {
            n: a.n.unwrap_or(1),
            d: a.d.unwrap_or(2),
            depth: a.depth.unwrap_or(6),
            h: a.h.unwrap_or(1.0 / 256.0),
            p: a.p.unwrap_or(2.0),
        },
        "cantor_cone_graph" => GeneratorSpec::CantorConeGraph {
            n: a.n.unwrap_or(2),
            depth: a.depth.unwrap_or(3),
            h: a.h.unwrap_or(1.0 / 64.0),
        },
        "poke_graph" => GeneratorSpec::PokeGraph {
            n: a.n.unwrap_or(2),
            depth: a.depth.unwrap_or(5),
            h: a.h.unwrap_or(1.0 / 128.0),
            alpha_margin: a.alpha_margin.unwrap_or(1.0),
            lambda: a.lambda.clone(),
            refine: Vec::new(),
        },
        "comb" => GeneratorSpec::Comb { teeth: a.teeth.unwrap_or(64), h: a.h.unwrap_or(1.0 / 256.0) },
        other => return Err(Failure::Usage(format!("unknown generator {other:?}"))),
    };
    Ok(spec)
}

fn generate(cli: &Cli, a: &GenerateArgs) -> Outcome {
    let set = generator_spec(a)?.generate()?;
    let mut buf = Vec::new();
    write_point_csv(&set, &mut buf)?;
    emit(cli, &buf)
}

fn parse_dyadic(text: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::Usage(format!("--dyadic expects a:b with integers a <= b, got {text:?}"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    let (a, b): (i32, i32) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a > b {
        return Err(bad());
    }
    Ok(dyadic_scales(a, b))
}

fn analyze_cmd(cli: &Cli, a: &AnalyzeArgs) -> Outcome {
    let e = load_points(&a.input)?;
    let x: Vec<f64> = match (&a.point, a.index) {
        (Some(p), _) => p.clone(),
        (None, Some(i)) if i < e.len() => e.point(i).to_vec(),
        (None, Some(i)) => return Err(Failure::Data(format!("index {i} out of range for {} samples", e.len()))),
        (None, None) => return Err(Failure::Usage("analyze needs --point or --index".into())),
    };
    let scales = match (&a.scales, &a.dyadic) {
        (Some(s), _) => s.clone(),
        (None, Some(d)) => parse_dyadic(d)?,
        (None, None) => dyadic_scales(3, 5),
    };
    let mode = match a.mode {
        Mode::Aw => AnalysisMode::Aw,
        Mode::Gh => AnalysisMode::Gh,
        Mode::Approx => AnalysisMode::Approx,
        Mode::Expansive => AnalysisMode::Expansive,
    };
    let opts = AnalyzeOptions {
        n: a.n,
        s: a.s.unwrap_or(a.n as f64),
        window_radius: a.radius,
        subsample: a.subsample,
        slab_fraction: a.slab,
        alpha: a.alpha,
        norm_directions: a.norm_directions,
        thresholds: Thresholds::default(),
    };
    let report = analyze(&e, &x, &scales, mode, &opts)?;
    emit_json(cli, &report)
}

fn content<S: SampleSpace + ?Sized>(x: &S, a: &PackArgs) -> Result<geotan_core::ContentEstimate, Failure> {
    let need_delta = || a.delta.ok_or_else(|| Failure::Usage("this mode needs --delta".into()));
    Ok(match a.mode {
        PackMode::Upper => hausdorff_content_upper(x, a.s, need_delta()?)?,
        PackMode::Premeasure => packing_premeasure_estimate(x, a.s, need_delta()?)?,
        PackMode::Lower => {
            let schedule = a.schedule.as_ref().ok_or_else(|| Failure::Usage("lower mode needs --schedule".into()))?;
            packing_content_lower(x, a.s, schedule)?
        }
        PackMode::BallTree => unreachable!("handled by the caller"),
    })
}

fn pack(cli: &Cli, a: &PackArgs) -> Outcome {
    if a.mode == PackMode::BallTree {
        if a.metric {
            return Err(Failure::Usage("ball-tree mode needs point input".into()));
        }
        let e = load_points(&a.input)?;
        let name = a.marker.as_deref().ok_or_else(|| Failure::Usage("ball-tree mode needs --marker".into()))?;
        if e.marker(name).is_none() {
            return Err(Failure::Data(format!("input has no marker {name:?}")));
        }
        let f = e.marker_indices(name);
        let opts = BallTreeOptions { s: a.s, levels: a.levels, min_radius: a.min_radius, ..BallTreeOptions::default() };
        let tree = build_ball_tree(&e, &f, &opts)?;
        return emit_json(cli, &tree);
    }
    let estimate = if a.metric { content(&load_metric(&a.input)?, a)? } else { content(&load_points(&a.input)?, a)? };
    emit_json(cli, &estimate)
}

fn as_space(path: &Path, metric: bool, base: usize) -> Result<FiniteMetricSpace, Failure> {
    if metric {
        let m = load_metric(path)?;
        if m.base().is_none() {
            return Ok(m.with_base(base)?);
        }
        Ok(m)
    } else {
        let set = load_points(path)?;
        if base >= set.len() {
            return Err(Failure::Data(format!("base {base} out of range for {} samples", set.len())));
        }
        Ok(FiniteMetricSpace::from_point_set(&set, Some(base))?)
    }
}

fn ghdist(cli: &Cli, a: &GhArgs) -> Outcome {
    let x = as_space(&a.a, a.metric, a.base_a)?;
    let y = as_space(&a.b, a.metric, a.base_b)?;
    let mode = match a.search {
        Search::Exhaustive => SearchMode::Exhaustive,
        Search::Heuristic => SearchMode::Heuristic { budget: a.budget },
        Search::Auto => SearchMode::Auto,
    };
    let estimate = match a.window {
        Some(r) => dgh_window(&x, &y, r, mode)?,
        None => pgh_oracle(&x, &y, mode)?,
    };
    emit_json(cli, &estimate)
}

fn demo(cli: &Cli, name: &str) -> Outcome {
    let names: Vec<&str> = if name == "all" {
        DEMO_NAMES.to_vec()
    } else if DEMO_NAMES.contains(&name) {
        vec![name]
    } else {
        return Err(Failure::Usage(format!("unknown demo {name:?}; known: all, {}", DEMO_NAMES.join(", "))));
    };
    let th = Thresholds::default();
    let mut results: Vec<DemoResult> = Vec::new();
    for n in &names {
        let mut r = run_demo(n, cli.seed, &th)?;
        if !cli.timing {
            r.runtime_seconds = None;
        }
        results.push(r);
    }
    if results.len() == 1 {
        emit_json(cli, &results[0])?;
    } else {
        emit_json(cli, &results)?;
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.pass).map(|r| r.demo.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Claims(format!("demo claims failed: {}", failed.join(", "))))
    }
}

fn svg_cmd(cli: &Cli, a: &SvgArgs) -> Outcome {
    let e = load_points(&a.input)?;
    let (set, crosshair, title) = match (&a.point, a.scale) {
        (Some(p), Some(r)) => {
            let t = geotan_core::blow_up(&e, p, r, a.radius)?;
            (t.window, true, format!("{} blow-up at scale {r}", e.label()))
        }
        _ => (e.clone(), false, e.label().to_string()),
    };
    let axes = match (&a.axes, set.dim()) {
        (Some(ax), d) => {
            if ax.len() != 2 || ax.iter().any(|&k| k >= d) || ax[0] == ax[1] {
                return Err(Failure::Data(format!("--axes needs two distinct axes below {d}, got {ax:?}")));
            }
            [ax[0], ax[1]]
        }
        (None, 2) => [0, 1],
        (None, d) => return Err(Failure::Data(format!("input has dimension {d}; choose two --axes to project on"))),
    };
    let pts: Vec<[f64; 2]> = set.points().map(|p| [p[axes[0]], p[axes[1]]]).collect();
    emit(cli, svg::render(&pts, crosshair, &title).as_bytes())
}
