//! Command-line interface: files in, reports out.
//!
//! Every subcommand prints a human-readable summary to stdout and, with
//! `--out`, writes a machine-readable sidecar (JSON via the text schema,
//! CSV for traces and polylines, SVG for plots). Outputs are byte-identical
//! across runs for fixed inputs and seeds.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use wdc::dc::DCFunction;
use wdc::error::Error;
use wdc::geom::BoundingBox;
use wdc::sample::SamplingPlan;
use wdc::schema;
use wdc::subdiff::SubdiffMode;

#[derive(Parser, Debug)]
#[command(name = "wdc", version, about = "Polyhedral DC calculus and planar set classification")]
pub struct Cli {
    /// Seed for all sampling plans.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker-thread cap for parallel sweeps.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a DC function at a point.
    Eval {
        #[arg(long = "fn")]
        func: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Subdifferential hull at a point.
    Subdiff {
        #[arg(long = "fn")]
        func: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value = "clarke")]
        mode: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Weak-regularity margin of a level.
    CheckAura {
        #[arg(long = "fn")]
        func: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        level: f64,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long = "box", allow_hyphen_values = true)]
        bbox: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sum two auras after the weak-touch check.
    SumAura {
        #[arg(long = "fn")]
        func: PathBuf,
        #[arg(long = "gn")]
        gn: PathBuf,
        #[arg(long = "box", allow_hyphen_values = true)]
        bbox: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Descent flow from a start point down to the zero level.
    Retract {
        #[arg(long = "fn")]
        func: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Retract a curve pointwise and check the shortening bound.
    BoundaryPath {
        #[arg(long = "fn")]
        func: PathBuf,
        /// CSV file of points, one `x,y` pair per line.
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Euler characteristic of a sublevel set.
    Euler {
        #[arg(long = "fn")]
        func: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        level: f64,
        #[arg(long, default_value = "degree")]
        method: String,
        #[arg(long, default_value_t = 0.05)]
        grid: f64,
        #[arg(long = "box", allow_hyphen_values = true)]
        bbox: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Level loops of a planar DC function.
    Level {
        #[arg(long = "fn")]
        func: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        level: f64,
        #[arg(long, default_value_t = 0.05)]
        grid: f64,
        #[arg(long = "box", allow_hyphen_values = true)]
        bbox: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a model at a direction.
    Classify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        direction: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Characterize raw germ data as a local model.
    Characterize {
        #[arg(long)]
        germ: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the aura of a characterized model.
    SectorAura {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write the sector boundary polylines as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Singular seam segments of one convex component.
    Singular {
        #[arg(long = "fn")]
        func: PathBuf,
        #[arg(long, default_value = "g")]
        part: String,
        #[arg(long)]
        eps: f64,
        #[arg(long = "box", allow_hyphen_values = true)]
        bbox: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Zero-set cover where the subdifferential is large.
    ZeroCover {
        #[arg(long = "fn")]
        func: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long = "box", allow_hyphen_values = true)]
        bbox: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Boundary cover of the zero sublevel set of an aura.
    BoundaryCover {
        #[arg(long = "fn")]
        func: PathBuf,
        #[arg(long = "box", allow_hyphen_values = true)]
        bbox: Option<String>,
        #[arg(long, default_value_t = 0.05)]
        grid: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate the self-similar curve approximation.
    FractalGen {
        #[arg(long)]
        alpha_deg: f64,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify the projection-fan bound over a grid shell.
    FractalCheck {
        #[arg(long)]
        alpha_deg: f64,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, default_value_t = 0.005)]
        grid: f64,
        /// Shell as `inner,outer`.
        #[arg(long, default_value = "0.02,0.2")]
        shell: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hausdorff dimension of the attractor.
    FractalDim {
        #[arg(long)]
        alpha_deg: f64,
    },
}

/// Parse arguments and run; returns the process exit code and stdout text.
pub fn execute<I, S>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return (2, e.to_string());
        }
    };
    let run_it = || match run(&cli) {
        Ok(text) => (0, text),
        Err(e) => (exit_code(&e), format!("error: {e}\n")),
    };
    match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(run_it),
        None => run_it(),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::RegularityViolation { .. }
        | Error::WeakTouch { .. }
        | Error::MaxIterExceeded(_)
        | Error::RefinementFailure { .. }
        | Error::Internal(_) => 3,
        _ => 2,
    }
}

fn run(cli: &Cli) -> Result<String, Error> {
    let seed = cli.seed;
    match &cli.command {
        Command::Eval { func, point } => {
            let f = load_dc(func)?;
            let x = parse_point(point)?;
            let v = f.eval(&x)?;
            Ok(format!("f({}) = {:.12}\n", point, v))
        }
        Command::Subdiff { func, point, mode, tol, out } => {
            let f = load_dc(func)?;
            let x = parse_point(point)?;
            let mode = match mode.as_str() {
                "clarke" => SubdiffMode::Clarke,
                "outer" => SubdiffMode::Outer,
                "convex" | "convex-part" => SubdiffMode::ConvexPart,
                other => return Err(Error::Invalid(format!("unknown mode {other}"))),
            };
            let sd = wdc::subdiff::subdiff(&f, &x, mode, *tol)?;
            let mut text = format!("subdifferential vertices ({:?}):\n", sd.exactness);
            let mut verts = sd.hull.vertices.clone();
            verts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for v in &verts {
                text.push_str(&format!("  {}\n", fmt_vec(v)));
            }
            let mn = wdc::polytope::min_norm_point(&sd.hull)?;
            text.push_str(&format!("min-norm point {} (norm {:.12})\n", fmt_vec(&mn.point), mn.norm));
            write_opt(out, &schema::report_to_json("subdiff", &sd))?;
            Ok(text)
        }
        Command::CheckAura { func, level, eps, bbox, out } => {
            let f = load_dc(func)?;
            let plan = plan_for(&f, bbox, seed)?;
            let report = wdc::aura::check_weak_regularity(&f, *level, *eps, &plan, 0.0)?;
            let mut text = format!(
                "margin {:.12} over shell ({:.12}, {:.12}] ({} strata, {:?})\n",
                report.margin,
                report.level,
                report.level + report.eps_used,
                report.samples,
                report.mode
            );
            if let Some(note) = &report.note {
                text.push_str(&format!("note: {note}\n"));
            }
            write_opt(out, &schema::report_to_json("aura", &report))?;
            Ok(text)
        }
        Command::SumAura { func, gn, bbox, out, report } => {
            let f = load_dc(func)?;
            let g = load_dc(gn)?;
            let plan = plan_for(&f, bbox, seed)?;
            let (sum, touch) = wdc::aura::aura_sum(&f, &g, &plan)?;
            let text = format!("untouched after {} probes; sum written\n", touch.probes);
            write_opt(out, &schema::dc_to_json(&sum))?;
            write_opt(report, &schema::report_to_json("touch", &touch))?;
            Ok(text)
        }
        Command::Retract { func, start, eps, step, out } => {
            let f = load_dc(func)?;
            let x0 = parse_point(start)?;
            let mut cfg = wdc::retraction::RetractionConfig::new(*eps, f.eval(&x0)?);
            if let Some(s) = step {
                cfg.step = *s;
            }
            let trace = wdc::retraction::retract(&f, &x0, &cfg)?;
            let (_, end, f_end) = trace.end();
            let text = format!(
                "endpoint {} (f = {:.2e}) after pseudo-time {:.12} in {} steps\n",
                fmt_vec(end),
                f_end,
                trace.total_time(),
                trace.samples.len() - 1
            );
            if let Some(path) = out {
                match path.extension().and_then(|e| e.to_str()) {
                    Some("svg") if f.dim() == 2 => {
                        let mut scene = wdc::svg::SvgScene::new();
                        let pts: Vec<Vec<f64>> =
                            trace.samples.iter().map(|(_, x, _)| x.clone()).collect();
                        scene.polyline(pts, "black");
                        write_text(path, &scene.render())?;
                    }
                    _ => write_text(path, &trace.to_csv())?,
                }
            }
            Ok(text)
        }
        Command::BoundaryPath { func, curve, eps, out } => {
            let f = load_dc(func)?;
            let pts = read_csv_points(curve)?;
            let cfg = wdc::retraction::RetractionConfig::new(*eps, 1.0);
            let report = wdc::retraction::boundary_path(&f, &pts, &cfg)?;
            let text = format!(
                "input diameter {:.12}, output diameter {:.12}, bound {:.12}: {}\n",
                report.input_diameter,
                report.output_diameter,
                report.bound,
                pass_str(report.pass)
            );
            let mut csv = String::from("x,y\n");
            for p in &report.output {
                csv.push_str(&format!("{},{}\n", p[0], p[1]));
            }
            write_opt(out, &csv)?;
            Ok(text)
        }
        Command::Euler { func, level, method, grid, bbox, out } => {
            let f = load_dc(func)?;
            let bb = parse_box(bbox)?;
            let result = match method.as_str() {
                "degree" => wdc::topology::euler_degree_2d(
                    &f,
                    *level,
                    *grid,
                    &bb,
                    std::f64::consts::FRAC_PI_2,
                )?,
                "cubical" => wdc::topology::euler_cubical(&f, *level, *grid, &bb)?,
                other => return Err(Error::Invalid(format!("unknown method {other}"))),
            };
            let mut text = format!("chi = {}\n", result.chi);
            if !result.per_loop_winding.is_empty() {
                text.push_str(&format!("per-loop windings: {:?}\n", result.per_loop_winding));
            }
            if let Some((v, e, fc)) = result.cell_counts {
                text.push_str(&format!("cells: V = {v}, E = {e}, F = {fc}\n"));
            }
            write_opt(out, &schema::report_to_json("euler", &result))?;
            Ok(text)
        }
        Command::Level { func, level, grid, bbox, out } => {
            let f = load_dc(func)?;
            let bb = parse_box(bbox)?;
            let loops = wdc::topology::level_loops_2d(&f, *level, *grid, &bb)?;
            let mut text = format!("{} loop(s) at level {:.12}\n", loops.loops.len(), level);
            for (i, lp) in loops.loops.iter().enumerate() {
                text.push_str(&format!("  loop {i}: {} vertices\n", lp.len()));
            }
            if let Some(note) = &loops.note {
                text.push_str(&format!("note: {note}\n"));
            }
            if let Some(path) = out {
                match path.extension().and_then(|e| e.to_str()) {
                    Some("svg") => {
                        let mut scene = wdc::svg::SvgScene::new();
                        for lp in &loops.loops {
                            scene.polyline(lp.clone(), "black");
                        }
                        write_text(path, &scene.render())?;
                    }
                    _ => {
                        let mut csv = String::from("loop,x,y\n");
                        for (i, lp) in loops.loops.iter().enumerate() {
                            for p in lp {
                                csv.push_str(&format!("{i},{},{}\n", p[0], p[1]));
                            }
                        }
                        write_text(path, &csv)?;
                    }
                }
            }
            Ok(text)
        }
        Command::Classify { model, direction, out } => {
            let m = schema::model_from_json(&read_text(model)?)?;
            let v = parse_point(direction)?;
            let tag = wdc::planar::classify_direction(&m, &v)?;
            let text = format!(
                "type {:?} at direction {} (r = {:.6}, u = {:.6})\n",
                tag.kind,
                fmt_vec(&v),
                tag.radius,
                tag.half_slope
            );
            write_opt(out, &schema::report_to_json("type-tag", &tag))?;
            Ok(text)
        }
        Command::Characterize { germ, out } => {
            let g = schema::germ_from_json(&read_text(germ)?)?;
            let model = wdc::planar::characterize_local(&g)?;
            let text = match &model {
                wdc::planar::PlanarLocalModel::IsolatedPoint { .. } => {
                    "condition (i): isolated point\n".to_string()
                }
                wdc::planar::PlanarLocalModel::Degenerate { .. } => {
                    "condition (ii): degenerate closed sector\n".to_string()
                }
                wdc::planar::PlanarLocalModel::ComplementOf { sectors, .. } => {
                    format!("condition (iii): complement of {} open sector(s)\n", sectors.len())
                }
            };
            write_opt(out, &schema::model_to_json(&model))?;
            Ok(text)
        }
        Command::SectorAura { model, out, report, svg } => {
            let m = schema::model_from_json(&read_text(model)?)?;
            let (f, rep) = wdc::planar::build_planar_aura(&m)?;
            let text = format!("aura built; exact margin {:.12}\n", rep.margin);
            write_opt(out, &schema::dc_to_json(&f))?;
            write_opt(report, &schema::report_to_json("aura", &rep))?;
            if let Some(path) = svg {
                let mut scene = wdc::svg::SvgScene::new();
                if let wdc::planar::PlanarLocalModel::ComplementOf { sectors, base } = &m {
                    for s in sectors {
                        let pts: Vec<Vec<f64>> =
                            wdc::planar::sector_boundary_polyline(s, 64)
                                .into_iter()
                                .map(|p| vec![p[0] + base[0], p[1] + base[1]])
                                .collect();
                        scene.polyline(pts, "black");
                    }
                }
                write_text(path, &scene.render())?;
            }
            Ok(text)
        }
        Command::Singular { func, part, eps, bbox, out } => {
            let f = load_dc(func)?;
            let bb = parse_box(bbox)?;
            let component = match part.as_str() {
                "g" => &f.g,
                "h" => &f.h,
                other => return Err(Error::Invalid(format!("unknown part {other}"))),
            };
            let cover = wdc::singular::singular_set_pwa_2d(component, *eps, &bb)?;
            Ok(cover_output(&cover, out)?)
        }
        Command::ZeroCover { func, eps, bbox, out } => {
            let f = load_dc(func)?;
            let bb = parse_box(bbox)?;
            let cover = wdc::singular::zero_set_large_subdiff_2d(&f, *eps, &bb)?;
            Ok(cover_output(&cover, out)?)
        }
        Command::BoundaryCover { func, bbox, grid, out } => {
            let f = load_dc(func)?;
            let bb = parse_box(bbox)?;
            let plan = SamplingPlan::new(seed, bb, 400);
            let report = wdc::singular::boundary_cover_2d(&f, &plan, *grid)?;
            let mut text = cover_output(&report.cover, &None)?;
            text.push_str(&format!(
                "margin {:.12}; trace check {} (worst distance {:.3e})\n",
                report.margin,
                pass_str(report.verified),
                report.worst_trace_distance
            ));
            write_opt(out, &schema::report_to_json("boundary-cover", &report))?;
            Ok(text)
        }
        Command::FractalGen { alpha_deg, depth, out } => {
            let spec = wdc::fractal::IFSSpec::from_degrees(*alpha_deg)?;
            let approx = wdc::fractal::ifs_generate(&spec, *depth)?;
            let text = format!(
                "{} segments at depth {}, hausdorff bound {:.3e}\n",
                approx.segment_count(),
                depth,
                approx.hausdorff_bound
            );
            if let Some(path) = out {
                match path.extension().and_then(|e| e.to_str()) {
                    Some("svg") => {
                        let mut scene = wdc::svg::SvgScene::new();
                        scene.polyline(approx.points.clone(), "black");
                        write_text(path, &scene.render())?;
                    }
                    _ => {
                        let mut csv = String::from("x,y\n");
                        for p in &approx.points {
                            csv.push_str(&format!("{},{}\n", p[0], p[1]));
                        }
                        write_text(path, &csv)?;
                    }
                }
            }
            Ok(text)
        }
        Command::FractalCheck { alpha_deg, depth, grid, shell, out } => {
            let spec = wdc::fractal::IFSSpec::from_degrees(*alpha_deg)?;
            let parts = parse_point(shell)?;
            if parts.len() != 2 {
                return Err(Error::Invalid("shell must be inner,outer".into()));
            }
            let check =
                wdc::fractal::fractal_regularity_check(&spec, *depth, *grid, (parts[0], parts[1]))?;
            let text = format!(
                "min fan norm {:.12} over {} samples; bound {:.12} - slack {:.12}: {}\n",
                check.min_norm,
                check.samples,
                check.bound,
                check.slack,
                pass_str(check.pass)
            );
            write_opt(out, &schema::report_to_json("fractal-check", &check))?;
            Ok(text)
        }
        Command::FractalDim { alpha_deg } => {
            let spec = wdc::fractal::IFSSpec::from_degrees(*alpha_deg)?;
            Ok(format!("hausdorff dimension {:.12}\n", spec.hausdorff_dim()))
        }
    }
}

fn cover_output(
    cover: &wdc::singular::SegmentCover,
    out: &Option<PathBuf>,
) -> Result<String, Error> {
    let mut text = format!("{} segment(s)", cover.segments.len());
    if cover.clipped {
        text.push_str(" (clipped to the box)");
    }
    text.push('\n');
    for s in &cover.segments {
        text.push_str(&format!("  {} -- {}\n", fmt_vec(&s.a), fmt_vec(&s.b)));
    }
    if let Some(path) = out {
        match path.extension().and_then(|e| e.to_str()) {
            Some("svg") => {
                let mut scene = wdc::svg::SvgScene::new();
                for s in &cover.segments {
                    scene.segment(&s.a, &s.b, "black");
                }
                write_text(path, &scene.render())?;
            }
            _ => write_text(path, &schema::report_to_json("cover", cover))?,
        }
    }
    Ok(text)
}

fn fmt_vec(v: &[f64]) -> String {
    let inner: Vec<String> = v.iter().map(|x| format!("{x:.12}")).collect();
    format!("({})", inner.join(", "))
}

fn pass_str(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn load_dc(path: &Path) -> Result<DCFunction, Error> {
    schema::dc_from_json(&read_text(path)?)
}

fn read_text(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text)
        .map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))
}

fn write_opt(path: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    if let Some(p) = path {
        write_text(p, text)?;
    }
    Ok(())
}

fn parse_point(text: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::Invalid(format!("bad coordinate {t:?}: {e}")))
        })
        .collect()
}

/// Box given as `x0,y0,x1,y1`; defaults to a centered square of radius 6.
fn parse_box(text: &Option<String>) -> Result<BoundingBox, Error> {
    match text {
        None => Ok(BoundingBox::centered(2, 6.0)),
        Some(t) => {
            let v = parse_point(t)?;
            if v.len() != 4 {
                return Err(Error::Invalid("box must be x0,y0,x1,y1".into()));
            }
            if v[0] >= v[2] || v[1] >= v[3] {
                return Err(Error::Invalid("box bounds out of order".into()));
            }
            Ok(BoundingBox::new(vec![v[0], v[1]], vec![v[2], v[3]]))
        }
    }
}

fn plan_for(f: &DCFunction, bbox: &Option<String>, seed: u64) -> Result<SamplingPlan, Error> {
    let bb = match f.dim() {
        2 => parse_box(bbox)?,
        d => BoundingBox::centered(d, 6.0),
    };
    Ok(SamplingPlan::new(seed, bb, 4096))
}

fn read_csv_points(path: &Path) -> Result<Vec<Vec<f64>>, Error> {
    let text = read_text(path)?;
    let mut pts = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('x') {
            continue;
        }
        pts.push(parse_point(line)?);
    }
    if pts.is_empty() {
        return Err(Error::Invalid("empty curve file".into()));
    }
    Ok(pts)
}
