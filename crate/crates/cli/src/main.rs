use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use earsight::config::{Report, RunConfig};
use earsight::geometry::{
    calibrate_reference, calibrate_rig, design_space_from_csv, design_space_table, design_space_to_csv,
    BlindSpot, DesignSpaceRow,
};
use earsight::imaging::{decode_pgm, encode_pgm, ground_truth_homography, render_pair, FramePreset, PlanarScene};
use earsight::link::{simulate_dual_acquisition, simulate_stream, trace_to_csv};
use earsight::pipeline::{run_query, InferenceClient, LatencyConfig, MockClient, QueryContext, RemoteClient};
use earsight::power::{
    always_on_discrepancy, always_on_life, battery_life_table, estimate_vs_measured, life_table_to_csv, BatteryPreset,
};
use earsight::stitch::{try_stitch, StitchReport, StitchResult};

const EXIT_MODULE_ERROR: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "earsight", version, about = "Camera earbud modeling toolkit")]
struct Cli {
    /// JSON file overriding the default run configuration.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Seed for RANSAC and mock jitter.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Primary output path; stdout when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Orientation design-space table as CSV.
    Geometry {
        /// Comma-separated yaw angles in degrees; empty for none.
        #[arg(long, default_value = "0,5,10,15,20", value_parser = parse_list)]
        thetas: NumList,
        /// Fit the rig first: `reference` or a design-space CSV.
        #[arg(long, value_name = "SOURCE")]
        calibrate: Option<String>,
        /// Also write an SVG chart of blind spot against yaw.
        #[arg(long, value_name = "FILE")]
        svg: Option<PathBuf>,
        /// Also write a JSON report with the effective config.
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
    },
    /// Streaming and dual-acquisition timing as JSON.
    Link {
        /// Frame format; defaults to the run config.
        #[arg(long, value_name = "qvga|qqvga")]
        frame: Option<FramePreset>,
        /// Frames to stream per device.
        #[arg(long, default_value_t = 10)]
        frames: usize,
        /// Devices sharing the link.
        #[arg(long, default_value_t = 1)]
        devices: u8,
        /// Write the event trace as CSV.
        #[arg(long, value_name = "FILE")]
        trace: Option<PathBuf>,
    },
    /// Battery-life table as CSV.
    Power {
        /// `sony`, `airpods` or a preset JSON file.
        #[arg(long)]
        battery: Option<String>,
        /// Comma-separated query rates per hour.
        #[arg(long, default_value = "0,5,10,20,60", value_parser = parse_list)]
        queries: NumList,
        /// Also write a JSON report with always-on life and discrepancies.
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
    },
    /// Stitch two PGM frames; `--out` receives the panorama.
    Stitch {
        /// Left frame (PGM).
        left: PathBuf,
        /// Right frame (PGM).
        right: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
        /// Include wall-clock runtime, which makes the report run-dependent.
        #[arg(long)]
        timing: bool,
    },
    /// Simulate one spoken query end to end.
    Pipeline {
        /// Latency configuration.
        #[arg(long = "config", value_name = "A|B|C")]
        latency: LatencyConfig,
        /// Spoken text, including the wake word.
        #[arg(long)]
        transcript: String,
        /// Scene description JSON.
        #[arg(long, value_name = "FILE")]
        scene: Option<PathBuf>,
        /// Inference backend.
        #[arg(long, value_enum, default_value_t = ClientKind::Mock)]
        client: ClientKind,
        /// Remote inference URL; required with `--client remote`.
        #[arg(long, value_name = "URL", required_if_eq("client", "remote"))]
        endpoint: Option<String>,
    },
    /// Render a left/right pair into the `--out` directory.
    Render {
        /// Camera yaw in degrees; defaults to the run config.
        #[arg(long)]
        theta: Option<f64>,
        /// Scene depth in cm from the eyes; defaults to the run config.
        #[arg(long)]
        depth: Option<f64>,
        /// Scene description JSON; defaults to the run config.
        #[arg(long, value_name = "FILE")]
        scene: Option<PathBuf>,
        /// Frame format; defaults to the run config.
        #[arg(long, value_name = "qvga|qqvga")]
        frame: Option<FramePreset>,
        /// Write the ground-truth right-to-left homography as JSON.
        #[arg(long, value_name = "FILE")]
        truth: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ClientKind {
    Mock,
    Remote,
}

#[derive(Debug, Clone)]
struct NumList(Vec<f64>);

fn parse_list(s: &str) -> Result<NumList, String> {
    if s.trim().is_empty() {
        return Ok(NumList(Vec::new()));
    }
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()
        .map(NumList)
}

/// A module or I/O failure, reported as JSON on stderr.
#[derive(Debug, Serialize)]
struct Failure {
    kind: &'static str,
    message: String,
}

trait Context<T> {
    fn ctx(self, kind: &'static str) -> Result<T, Failure>;
}

impl<T, E: std::fmt::Display> Context<T> for Result<T, E> {
    fn ctx(self, kind: &'static str) -> Result<T, Failure> {
        self.map_err(|e| Failure { kind, message: e.to_string() })
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure { kind: "io", message: format!("{}: {e}", path.display()) })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure { kind: "io", message: format!("{}: {e}", path.display()) })
}

/// Writes to `path`, or stdout when there is none.
fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => write_file(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn report_json<T: Serialize>(cfg: &RunConfig, body: T) -> Result<String, Failure> {
    Report::new(cfg, body).to_json().ctx("serialize")
}

fn load_scene(path: Option<&Path>, cfg: &RunConfig) -> Result<PlanarScene, Failure> {
    match path {
        Some(p) => PlanarScene::from_json(&read_text(p)?).ctx("imaging"),
        None => Ok(cfg.scene.clone()),
    }
}

fn blind_spot_svg(rows: &[DesignSpaceRow<f64>]) -> String {
    const W: f64 = 480.0;
    const H: f64 = 320.0;
    const M: f64 = 48.0;
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| match r.blind_spot {
            BlindSpot::Finite(v) => Some((r.theta_deg, v)),
            BlindSpot::Infinite => None,
        })
        .collect();
    let x_max = pts.iter().map(|p| p.0).fold(1.0, f64::max);
    let y_max = pts.iter().map(|p| p.1).fold(1.0, f64::max);
    let sx = |x: f64| M + x / x_max * (W - 2.0 * M);
    let sy = |y: f64| H - M - y / y_max * (H - 2.0 * M);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <line x1=\"{M}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{M}\" y1=\"{M}\" x2=\"{M}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <text x=\"{cx}\" y=\"{t}\" font-size=\"12\" text-anchor=\"middle\">yaw (deg)</text>\n\
         <text x=\"12\" y=\"{cy}\" font-size=\"12\" transform=\"rotate(-90 12 {cy})\" text-anchor=\"middle\">blind spot (cm)</text>\n",
        b = H - M,
        r = W - M,
        cx = W / 2.0,
        t = H - 12.0,
        cy = H / 2.0,
    );
    let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
    svg.push_str(&format!("<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"{}\"/>\n", path.join(" ")));
    for &(x, y) in &pts {
        svg.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"steelblue\"/>\n\
             <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\" text-anchor=\"middle\">{:.1}</text>\n",
            sx(x),
            sy(y),
            sx(x),
            sy(y) - 8.0,
            y
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn cmd_geometry(
    cfg: &mut RunConfig,
    out: Option<&Path>,
    thetas: &[f64],
    calibrate: Option<&str>,
    svg: Option<&Path>,
    report: Option<&Path>,
) -> Result<(), Failure> {
    let calibration = match calibrate {
        None => None,
        Some("reference") => Some(calibrate_reference::<f64>().ctx("geometry")?),
        Some(file) => {
            let rows = design_space_from_csv(&read_text(Path::new(file))?).ctx("geometry")?;
            let targets: Vec<(f64, f64)> =
                rows.iter().filter_map(|r| r.blind_spot.finite().map(|b| (r.theta_deg, b))).collect();
            Some(calibrate_rig(&targets, &cfg.rig, &cfg.blind_spot).ctx("geometry")?)
        }
    };
    if let Some(c) = &calibration {
        cfg.rig = c.rig;
    }
    let rows = design_space_table(&cfg.rig, thetas, &cfg.blind_spot).ctx("geometry")?;
    let csv = design_space_to_csv(&rows);
    emit(out, &csv)?;
    if let Some(p) = svg {
        write_file(p, blind_spot_svg(&rows).as_bytes())?;
    }
    if let Some(p) = report {
        let body = json!({ "calibration": calibration, "rows": rows });
        write_file(p, report_json(cfg, body)?.as_bytes())?;
    }
    Ok(())
}

fn cmd_link(
    cfg: &mut RunConfig,
    out: Option<&Path>,
    frame: Option<FramePreset>,
    frames: usize,
    devices: u8,
    trace: Option<&Path>,
) -> Result<(), Failure> {
    if let Some(f) = frame {
        cfg.frame = f;
    }
    let spec = cfg.frame.spec();
    let timing = simulate_stream(&cfg.link, spec, frames, devices).ctx("link")?;
    let dual = simulate_dual_acquisition(&cfg.link, spec).ctx("link")?;
    if let Some(p) = trace {
        write_file(p, trace_to_csv(&timing.trace).as_bytes())?;
    }
    emit(out, &report_json(cfg, json!({ "timing": timing, "dual_acquisition": dual }))?)
}

fn cmd_power(
    cfg: &mut RunConfig,
    out: Option<&Path>,
    battery: Option<&str>,
    queries: &[f64],
    report: Option<&Path>,
) -> Result<(), Failure> {
    if let Some(b) = battery {
        cfg.battery = match b.parse::<BatteryPreset>() {
            Ok(p) => p,
            Err(e) if !Path::new(b).is_file() => return Err(e).ctx("power"),
            Err(_) => BatteryPreset::from_json(&read_text(Path::new(b))?).ctx("power")?,
        };
    }
    let model = cfg.battery.to_model::<f64>().ctx("power")?;
    let rows = battery_life_table(&cfg.power, &model, queries).ctx("power")?;
    emit(out, &life_table_to_csv(&rows))?;
    if let Some(p) = report {
        let body = json!({
            "rows": rows,
            "nominal_voltage_v": model.nominal_voltage_v,
            "always_on_h": always_on_life(&model, &cfg.power),
            "always_on_discrepancy": always_on_discrepancy(&cfg.battery, &cfg.power).ctx("power")?,
            "estimate_vs_measured": estimate_vs_measured(),
        });
        write_file(p, report_json(cfg, body)?.as_bytes())?;
    }
    Ok(())
}

fn cmd_stitch(
    cfg: &RunConfig,
    out: Option<&Path>,
    left: &Path,
    right: &Path,
    report: Option<&Path>,
    timing: bool,
) -> Result<(), Failure> {
    let read_pgm = |p: &Path| -> Result<_, Failure> {
        let bytes = fs::read(p).map_err(|e| Failure { kind: "io", message: format!("{}: {e}", p.display()) })?;
        decode_pgm(&bytes).ctx("imaging")
    };
    let (l, r) = (read_pgm(left)?, read_pgm(right)?);
    let start = Instant::now();
    let result = try_stitch(&l, &r, &cfg.stitch, cfg.seed);
    let runtime_ms = timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    if let (Some(p), StitchResult::Stitched { panorama, .. }) = (out, &result) {
        write_file(p, &encode_pgm(&panorama.image))?;
    }
    let text = report_json(cfg, StitchReport::new(&result, &l, &r, runtime_ms))?;
    emit(report, &text)
}

fn cmd_pipeline(
    cfg: &RunConfig,
    out: Option<&Path>,
    latency: LatencyConfig,
    transcript: &str,
    scene: Option<&Path>,
    client: ClientKind,
    endpoint: Option<&str>,
) -> Result<(), Failure> {
    let scene = load_scene(scene, cfg)?;
    let mut client: Box<dyn InferenceClient> = match client {
        ClientKind::Mock => Box::new(MockClient::new(cfg.mock.clone(), cfg.seed).ctx("pipeline")?),
        ClientKind::Remote => {
            let timeout = Duration::try_from_secs_f64(cfg.remote_timeout_s).ctx("config")?;
            Box::new(RemoteClient::new(endpoint.unwrap_or_default(), timeout))
        }
    };
    let rig = cfg.rig;
    let ctx = QueryContext {
        rig: &rig,
        frame: cfg.frame.spec(),
        link: &cfg.link,
        stitch: &cfg.stitch,
        stitch_seed: cfg.seed,
        pipeline: &cfg.pipeline,
    };
    let timeline = run_query(latency, transcript, &scene, &ctx, client.as_mut()).ctx("pipeline")?;
    let text = report_json(cfg, &timeline)?;
    match out {
        Some(p) => {
            write_file(p, text.as_bytes())?;
            println!("{}", timeline.summary_line());
        }
        None => {
            print!("{text}");
            eprintln!("{}", timeline.summary_line());
        }
    }
    Ok(())
}

fn cmd_render(
    cfg: &mut RunConfig,
    out: Option<&Path>,
    theta: Option<f64>,
    depth: Option<f64>,
    scene: Option<&Path>,
    frame: Option<FramePreset>,
    truth: Option<&Path>,
) -> Result<(), Failure> {
    cfg.scene = load_scene(scene, cfg)?;
    if let Some(t) = theta {
        cfg.rig.yaw_deg = t;
    }
    if let Some(d) = depth {
        cfg.scene.depth_cm = d;
    }
    if let Some(f) = frame {
        cfg.frame = f;
    }
    let spec = cfg.frame.spec();
    let (l, r) = render_pair(&cfg.rig, &cfg.scene, spec).ctx("imaging")?;
    let dir = out.unwrap_or(Path::new("."));
    write_file(&dir.join("left.pgm"), &encode_pgm(&l))?;
    write_file(&dir.join("right.pgm"), &encode_pgm(&r))?;
    if let Some(p) = truth {
        let h = ground_truth_homography(&cfg.rig, cfg.scene.depth_cm, spec).ctx("imaging")?;
        let body = json!({
            "theta_deg": cfg.rig.yaw_deg,
            "depth_cm": cfg.scene.depth_cm,
            "h": h.to_row_major(),
        });
        write_file(p, report_json(cfg, body)?.as_bytes())?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_json(&read_text(p)?).ctx("config")?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Geometry { thetas, calibrate, svg, report } => {
            cmd_geometry(&mut cfg, out, &thetas.0, calibrate.as_deref(), svg.as_deref(), report.as_deref())
        }
        Command::Link { frame, frames, devices, trace } => {
            cmd_link(&mut cfg, out, *frame, *frames, *devices, trace.as_deref())
        }
        Command::Power { battery, queries, report } => {
            cmd_power(&mut cfg, out, battery.as_deref(), &queries.0, report.as_deref())
        }
        Command::Stitch { left, right, report, timing } => {
            cmd_stitch(&cfg, out, left, right, report.as_deref(), *timing)
        }
        Command::Pipeline { latency, transcript, scene, client, endpoint } => {
            cmd_pipeline(&cfg, out, *latency, transcript, scene.as_deref(), *client, endpoint.as_deref())
        }
        Command::Render { theta, depth, scene, frame, truth } => {
            cmd_render(&mut cfg, out, *theta, *depth, scene.as_deref(), *frame, truth.as_deref())
        }
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", json!({ "error": f }));
            ExitCode::from(EXIT_MODULE_ERROR)
        }
    }
}
