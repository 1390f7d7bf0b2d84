//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use earsight::config::{Report, RunConfig};
use earsight::geometry::{
    blind_spot_length, calibrate_reference, design_space_table, design_space_to_csv, BlindSpotQuery,
    HeadCameraRig, HARMON_DISTANCE_CM, REFERENCE_BLIND_SPOTS,
};
use earsight::homography::Homography;
use earsight::imaging::{
    encode_pgm, ground_truth_homography, render_pair, simulate_blind_spot, FrameSpec, GrayImage, Pattern,
    PlanarScene,
};
use earsight::link::{
    bridge_encode, device_encode_frame, frame_bytes, reassemble, simulate_dual_acquisition, simulate_stream, trace_to_csv,
    Demux, HostParser, LinkConfig, MacAddress, ParseEvent, PREAMBLE,
};
use earsight::pipeline::{run_query, LatencyConfig, MockClient, MockConfig, PipelineConfig, QueryContext};
use earsight::power::{
    always_on_discrepancy, always_on_life, average_added_power, battery_life_table, life_table_to_csv,
    BatteryModel, BatteryPreset, PowerProfile,
};
use earsight::stitch::{
    estimate_homography_ransac, fit_homography, overlap_error, try_stitch, FallbackReason, Point, StitchParams,
    StitchReport, StitchResult, DEFAULT_STITCH_SEED,
};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn design_space() -> Outcome {
    let cal = calibrate_reference::<f64>().map_err(|e| e.to_string())?;
    let thetas: Vec<f64> = REFERENCE_BLIND_SPOTS.iter().map(|r| r.0).collect();
    let rows = design_space_table(&cal.rig, &thetas, &BlindSpotQuery::default()).map_err(|e| e.to_string())?;
    let blind = [14.1, 18.6, 24.7, 34.0, 50.7];
    let fov = [88.0, 98.0, 108.0, 118.0, 128.0];
    let overlap = [Some(0.64), Some(0.46), Some(0.28), Some(0.14), None];
    let mut worst_blind: f64 = 0.0;
    let mut worst_overlap: f64 = 0.0;
    for (i, row) in rows.iter().enumerate() {
        let b = row.blind_spot.finite().ok_or("infinite blind spot")?;
        ensure!(close(b, blind[i], 0.5), "theta {}: blind spot {b:.2} vs {}", row.theta_deg, blind[i]);
        ensure!(row.binocular_fov_deg == fov[i], "theta {}: fov {}", row.theta_deg, row.binocular_fov_deg);
        match (row.overlap_at_harmon, overlap[i]) {
            (Some(got), Some(want)) => {
                ensure!(close(got, want, 0.04), "theta {}: overlap {got:.3} vs {want}", row.theta_deg);
                worst_overlap = worst_overlap.max((got - want).abs());
            }
            (None, None) => {}
            (got, want) => return Err(format!("theta {}: overlap {got:?} vs {want:?}", row.theta_deg)),
        }
        worst_blind = worst_blind.max((b - blind[i]).abs());
    }
    Ok(format!("max blind-spot error {worst_blind:.2} cm, max overlap error {:.1} pt", worst_overlap * 100.0))
}

fn analytic_vs_simulated() -> Outcome {
    let rig = HeadCameraRig::<f64>::default();
    let q = BlindSpotQuery::default();
    let mut worst: f64 = 0.0;
    for theta in [0.0, 5.0, 10.0] {
        let r = rig.with_yaw(theta);
        let analytic = blind_spot_length(&r, &q).map_err(|e| e.to_string())?.finite().ok_or("infinite")?;
        let sim = simulate_blind_spot(&r, &q, 0.1).map_err(|e| e.to_string())?;
        let rel = (sim - analytic).abs() / analytic;
        ensure!(rel <= 0.03, "theta {theta}: simulated {sim:.2} vs analytic {analytic:.2}");
        worst = worst.max(rel);
    }
    Ok(format!("max relative gap {:.2}%", worst * 100.0))
}

fn link_timing() -> Outcome {
    let cfg = LinkConfig::default();
    let cases = [(FrameSpec::QQVGA, 6.4, 5.7, 175.0, 19.3, 1), (FrameSpec::QVGA, 1.6, 1.4, 714.0, 77.4, 2)];
    for (spec, fps, eff, latency, acquire, dma) in cases {
        let r = simulate_stream(&cfg, spec, 10, 1).map_err(|e| e.to_string())?;
        ensure!(close(r.theoretical_fps, fps, 0.05), "{spec:?}: theoretical fps {}", r.theoretical_fps);
        ensure!(close(r.effective_fps, eff, 0.1), "{spec:?}: effective fps {}", r.effective_fps);
        ensure!(close(r.frame_latency_ms, latency, 0.02 * latency), "{spec:?}: latency {}", r.frame_latency_ms);
        ensure!(close(r.t_acquire_ms, acquire, 0.1), "{spec:?}: acquisition {}", r.t_acquire_ms);
        ensure!(r.dma_transactions == dma, "{spec:?}: {} dma transactions", r.dma_transactions);
    }
    let dual = simulate_dual_acquisition(&cfg, FrameSpec::QVGA).map_err(|e| e.to_string())?;
    ensure!(close(dual.completion_ms, 800.0, 20.0), "dual acquisition {} ms", dual.completion_ms);
    Ok(format!("dual acquisition {:.1} ms", dual.completion_ms))
}

const MACS: [MacAddress; 2] = [[0x10, 0x20, 0x30, 0x40, 0x50, 0x60], [0xF1, 0xE2, 0xD3, 0xC4, 0xB5, 0xA6]];

fn random_frame(rng: &mut ChaCha8Rng) -> GrayImage {
    let spec = match rng.gen_range(0..20) {
        0 => FrameSpec::QVGA,
        1 | 2 => FrameSpec::QQVGA,
        _ => FrameSpec::new(rng.gen_range(1..=96), rng.gen_range(1..=72)).unwrap(),
    };
    let mut px = vec![0u8; spec.width * spec.height];
    rng.fill(px.as_mut_slice());
    GrayImage::new(spec, px).unwrap()
}

/// Bridge records for both devices, interleaved at random while keeping each
/// device's packet order.
fn interleaved_records(
    frames: &[(usize, u16, GrayImage)],
    rng: &mut ChaCha8Rng,
) -> Vec<(usize, u16, usize, Vec<u8>)> {
    let mut queues: [Vec<(u16, Vec<u8>)>; 2] = [Vec::new(), Vec::new()];
    for (dev, id, img) in frames {
        let payload = rng.gen_range(20..=247);
        for p in device_encode_frame(img, *id, payload).unwrap() {
            queues[*dev].push((*id, p));
        }
    }
    let mut heads = [0usize; 2];
    let mut out = Vec::new();
    while heads[0] < queues[0].len() || heads[1] < queues[1].len() {
        let left = queues[0].len() - heads[0];
        let right = queues[1].len() - heads[1];
        let dev = if right == 0 || (left > 0 && rng.gen_bool(0.5)) { 0 } else { 1 };
        let (id, packet) = &queues[dev][heads[dev]];
        out.push((dev, *id, packet.len(), bridge_encode(MACS[dev], packet).unwrap()));
        heads[dev] += 1;
    }
    out
}

/// Feeds the stream in random chunks and reassembles each device's frames.
fn receive(stream: &[u8], rng: &mut ChaCha8Rng) -> (BTreeMap<MacAddress, Vec<(u16, GrayImage)>>, usize) {
    let mut parser = HostParser::new();
    let mut demux = Demux::default();
    let mut losses = 0;
    let mut pos = 0;
    let mut handle = |events: Vec<ParseEvent>, demux: &mut Demux| {
        for e in events {
            match e {
                ParseEvent::Record(r) => demux.push(&r),
                ParseEvent::SyncLoss(_) => losses += 1,
            }
        }
    };
    while pos < stream.len() {
        let n = rng.gen_range(1..=4096).min(stream.len() - pos);
        handle(parser.push(&stream[pos..pos + n]), &mut demux);
        pos += n;
    }
    handle(parser.finish(), &mut demux);
    let frames = demux.into_streams().into_iter().map(|(mac, s)| (mac, reassemble(&s))).collect();
    (frames, losses)
}

fn wire_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let frames: Vec<(usize, u16, GrayImage)> =
        (0..1000).map(|i| (rng.gen_range(0..2), i as u16, random_frame(&mut rng))).collect();
    let expected = |dev: usize| -> Vec<(u16, GrayImage)> {
        frames.iter().filter(|f| f.0 == dev).map(|f| (f.1, f.2.clone())).collect()
    };
    let records = interleaved_records(&frames, &mut rng);

    // clean stream
    let clean: Vec<u8> = records.iter().flat_map(|r| r.3.iter().copied()).collect();
    let (got, losses) = receive(&clean, &mut rng);
    ensure!(losses == 0, "{losses} sync losses on a clean stream");
    for dev in 0..2 {
        ensure!(got.get(&MACS[dev]) == Some(&expected(dev)), "device {dev} frames differ on a clean stream");
    }

    // garbage bursts between records, biased towards preamble fragments
    let mut noisy = Vec::new();
    let mut bursts = 0;
    for r in &records {
        if rng.gen_bool(0.03) {
            bursts += 1;
            for _ in 0..rng.gen_range(1..=48) {
                noisy.push(match rng.gen_range(0..4) {
                    0 => 0xAA,
                    1 => 0x55,
                    _ => rng.gen(),
                });
            }
        }
        noisy.extend_from_slice(&r.3);
    }
    let (got, losses) = receive(&noisy, &mut rng);
    ensure!(losses >= 1, "no sync loss reported for {bursts} bursts");
    for dev in 0..2 {
        ensure!(got.get(&MACS[dev]) == Some(&expected(dev)), "device {dev} frames differ after garbage bursts");
    }

    // destroyed record headers: those records are lost and the reassembler
    // may over-read up to the damaged frame's declared length, but every
    // intact frame starting past that point must come back exactly
    let mut damaged_ids = std::collections::BTreeSet::new();
    let mut received_len: BTreeMap<u16, usize> = BTreeMap::new();
    let mut broken = Vec::new();
    for r in &records {
        let mut bytes = r.3.clone();
        if rng.gen_bool(0.01) {
            damaged_ids.insert(r.1);
            let n = rng.gen_range(1..=PREAMBLE.len());
            for b in &mut bytes[..n] {
                *b = rng.gen_range(0..0xAA);
            }
        } else {
            *received_len.entry(r.1).or_default() += r.2;
        }
        broken.extend_from_slice(&bytes);
    }
    let (got, losses) = receive(&broken, &mut rng);
    ensure!(losses >= 1, "no sync loss reported");
    let mut recovered_after_damage = 0;
    for dev in 0..2 {
        let have: BTreeMap<u16, &GrayImage> =
            got.get(&MACS[dev]).map(|v| v.iter().map(|(id, img)| (*id, img)).collect()).unwrap_or_default();
        let (mut offset, mut blocked_until, mut seen_damage) = (0usize, 0usize, false);
        for (id, img) in expected(dev) {
            let declared = frame_bytes(&img, id).unwrap().len();
            if damaged_ids.contains(&id) {
                blocked_until = blocked_until.max(offset + declared);
                seen_damage = true;
            } else if offset >= blocked_until {
                ensure!(have.get(&id) == Some(&&img), "device {dev}: intact frame {id} not recovered");
                recovered_after_damage += usize::from(seen_damage);
            }
            offset += received_len.get(&id).copied().unwrap_or(0);
        }
    }
    ensure!(recovered_after_damage > 0, "damage never followed by a recovered frame");
    Ok(format!(
        "1000 frames exact; {bursts} garbage bursts and {} damaged frames resynchronized",
        damaged_ids.len()
    ))
}

fn power_model() -> Outcome {
    let profile = PowerProfile::<f64>::default();
    let sony = BatteryModel::<f64>::sony();
    let rates = [0.0, 5.0, 10.0, 20.0, 60.0];
    let want = [5.48, 5.47, 5.46, 5.44, 5.35];
    let rows = battery_life_table(&profile, &sony, &rates).map_err(|e| e.to_string())?;
    for (r, w) in rows.iter().zip(want) {
        ensure!(close(r.life_h, w, 0.01), "{} q/h: {:.3} h vs {w}", r.queries_per_hour, r.life_h);
    }
    let added = average_added_power(&profile, 60.0).map_err(|e| e.to_string())?;
    ensure!(close(added, 4.855, 5e-4), "added power at 60 q/h {added}");
    let always_on = always_on_life(&sony, &profile);
    ensure!(close(always_on, 3.5, 0.25), "always-on {always_on:.2} h");
    let note = always_on_discrepancy(&BatteryPreset::SONY, &profile).map_err(|e| e.to_string())?;
    ensure!(note.as_ref().is_some_and(|d| d.reference_h == 3.5 && !d.note.is_empty()), "discrepancy missing");
    Ok(format!("added {added:.3} mW at 60 q/h; always-on {always_on:.2} h vs 3.5 h documented"))
}

fn text_scene() -> PlanarScene {
    PlanarScene::new(Pattern::Text { seed: 7 }, HARMON_DISTANCE_CM, [200.0, 200.0]).unwrap()
}

fn stitching_properties() -> Outcome {
    let params = StitchParams::default();
    // identity on self-pairs
    let scenes = [
        text_scene(),
        PlanarScene::new(Pattern::Text { seed: 99 }, 60.0, [200.0, 200.0]).unwrap(),
        PlanarScene::new(Pattern::Checkerboard { cell_cm: 2.0 }, HARMON_DISTANCE_CM, [200.0, 200.0]).unwrap(),
    ];
    for (i, scene) in scenes.iter().enumerate() {
        let (l, _) = render_pair(&HeadCameraRig::default().with_yaw(5.0), scene, FrameSpec::QVGA).unwrap();
        let res = try_stitch(&l, &l, &params, DEFAULT_STITCH_SEED);
        let h = res.homography().copied().ok_or("no homography on a self-pair")?;
        ensure!(res.is_stitched(), "self-pair {i} fell back: {:?}", res.reason());
        ensure!(h.max_abs_diff(&Homography::identity()) < 1e-3, "self-pair {i}: {:?}", h.to_row_major());
    }

    // noiseless and contaminated correspondences
    let truth = Homography::from_row_major([0.95, 0.04, 30.0, -0.03, 1.01, -12.0, 2e-4, -1e-4, 1.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let src: Vec<Point> = (0..300).map(|_| (rng.gen_range(0.0..324.0), rng.gen_range(0.0..239.0))).collect();
    let dst: Vec<Point> = src.iter().map(|p| truth.apply(p.0, p.1).unwrap()).collect();
    let rel = |h: &Homography| {
        let (a, b) = (h.to_row_major(), truth.to_row_major());
        a.iter().zip(b).map(|(x, y)| (x - y).abs() / y.abs().max(1e-3)).fold(0.0, f64::max)
    };
    let fit = fit_homography(&src, &dst).ok_or("fit failed")?;
    ensure!(rel(&fit) < 1e-6, "least-squares fit off by {:e}", rel(&fit));
    let mut noisy = dst.clone();
    let mut outlier = vec![false; src.len()];
    for i in (0..src.len()).filter(|i| i % 10 < 3) {
        noisy[i] = (rng.gen_range(0.0..324.0), rng.gen_range(0.0..239.0));
        let (x, y) = truth.apply(src[i].0, src[i].1).unwrap();
        outlier[i] = (x - noisy[i].0).hypot(y - noisy[i].1) >= params.ransac_threshold_px;
    }
    let (est, mask) = estimate_homography_ransac(&src, &noisy, &params, 5).map_err(|e| e.to_string())?;
    let inliers = outlier.iter().filter(|&&o| !o).count();
    let found = mask.iter().zip(&outlier).filter(|(&m, &o)| m && !o).count();
    let ratio = found as f64 / inliers as f64;
    ensure!(ratio >= 0.95, "recovered {:.1}% of inliers", ratio * 100.0);
    ensure!(rel(&est) < 1e-6, "ransac estimate off by {:e}", rel(&est));

    // rendered stereo pairs against the ground-truth homography
    let (mut worst_err, mut est_worst): (f64, f64) = (0.0, 0.0);
    for theta in [0.0, 5.0] {
        let rig = HeadCameraRig::default().with_yaw(theta);
        let (l, r) = render_pair(&rig, &text_scene(), FrameSpec::QVGA).unwrap();
        let res = try_stitch(&l, &r, &params, DEFAULT_STITCH_SEED);
        ensure!(res.is_stitched(), "theta {theta}: fell back with {:?}", res.reason());
        let h = *res.homography().unwrap();
        let gt = ground_truth_homography(&rig, HARMON_DISTANCE_CM, FrameSpec::QVGA).unwrap();
        let err = overlap_error(&l, &r, &gt).ok_or("singular ground truth")?;
        ensure!(err < 8.0, "theta {theta}: ground-truth overlap error {err:.2}");
        let est_err = overlap_error(&l, &r, &h).ok_or("singular estimate")?;
        let mut reproj = Vec::new();
        for y in (0..239).step_by(6) {
            for x in (0..324).step_by(6) {
                let (u, v) = gt.apply(x as f64, y as f64).unwrap();
                if (0.0..324.0).contains(&u) && (0.0..239.0).contains(&v) {
                    let (a, b) = h.apply(x as f64, y as f64).unwrap();
                    reproj.push((a - u).hypot(b - v));
                }
            }
        }
        let mean = reproj.iter().sum::<f64>() / reproj.len() as f64;
        ensure!(mean < 1.5, "theta {theta}: mean reprojection {mean:.2} px against ground truth");
        worst_err = worst_err.max(err);
        est_worst = est_worst.max(est_err);
    }

    // flat frames never stitch
    for (v, spec) in [(0u8, FrameSpec::QVGA), (128, FrameSpec::QQVGA), (255, FrameSpec::QVGA)] {
        let flat = GrayImage::filled(spec, v);
        let res = try_stitch(&flat, &flat, &params, DEFAULT_STITCH_SEED);
        ensure!(res.reason() == Some(FallbackReason::InsufficientFeatures), "flat {v}: {:?}", res.reason());
    }
    Ok(format!(
        "ransac kept {:.1}% of inliers; overlap error {worst_err:.2} with ground truth, {est_worst:.2} with estimate",
        ratio * 100.0
    ))
}

fn pipeline_budgets() -> Outcome {
    let rig = HeadCameraRig::default().with_yaw(5.0);
    let link = LinkConfig::default();
    let stitch = StitchParams::default();
    let pipeline = PipelineConfig::default();
    let ctx = QueryContext {
        rig: &rig,
        frame: FrameSpec::QVGA,
        link: &link,
        stitch: &stitch,
        stitch_seed: DEFAULT_STITCH_SEED,
        pipeline: &pipeline,
    };
    let query = "Hey Vue, can you translate this for me?";
    let run = |config, scene: &PlanarScene| {
        let mut client = MockClient::new(MockConfig::default(), 0).unwrap();
        run_query(config, query, scene, &ctx, &mut client).map_err(|e| e.to_string())
    };
    let scene = text_scene();
    let a = run(LatencyConfig::A, &scene)?;
    let b = run(LatencyConfig::B, &scene)?;
    let c = run(LatencyConfig::C, &scene)?;
    ensure!(close(a.acquisition_s, 0.80, 0.02), "capture {:.3} s", a.acquisition_s);
    for (t, want) in [(&a, 2.95), (&b, 2.15), (&c, 1.14)] {
        ensure!(close(t.total_latency_s, want, 0.02), "{}: {:.3} s vs {want}", t.config, t.total_latency_s);
    }
    let gain = 100.0 * (b.total_latency_s - c.total_latency_s) / b.total_latency_s;
    ensure!(close(gain, 47.0, 1.0), "C over B {gain:.1}%");
    let flat = PlanarScene::new(Pattern::Flat { value: 90 }, HARMON_DISTANCE_CM, [200.0, 200.0]).unwrap();
    let cf = run(LatencyConfig::C, &flat)?;
    let bf = run(LatencyConfig::B, &flat)?;
    ensure!(cf.total_latency_s == bf.total_latency_s, "fallback {} vs B {}", cf.total_latency_s, bf.total_latency_s);
    Ok(format!(
        "A {:.3} s, B {:.3} s, C {:.3} s, gain {gain:.1}%, fallback {:.3} s",
        a.total_latency_s, b.total_latency_s, c.total_latency_s, cf.total_latency_s
    ))
}

/// Writes every report kind into `dir`.
fn write_reports(dir: &Path) -> std::io::Result<()> {
    let cfg = RunConfig::default();
    let json = |body: serde_json::Value| Report::new(&cfg, body).to_json().unwrap();
    let cal = calibrate_reference::<f64>().unwrap();
    let rows = design_space_table(&cal.rig, &[0.0, 5.0, 10.0, 15.0, 20.0, 40.0], &cfg.blind_spot).unwrap();
    std::fs::write(dir.join("design.csv"), design_space_to_csv(&rows))?;

    let sony = cfg.battery.to_model::<f64>().unwrap();
    let life = battery_life_table(&cfg.power, &sony, &[0.0, 5.0, 10.0, 20.0, 60.0]).unwrap();
    std::fs::write(dir.join("life.csv"), life_table_to_csv(&life))?;
    let discrepancy = always_on_discrepancy(&cfg.battery, &cfg.power).unwrap();
    std::fs::write(dir.join("power.json"), json(serde_json::json!({ "rows": life, "always_on": discrepancy })))?;

    let timing = simulate_stream(&cfg.link, FrameSpec::QVGA, 3, 2).unwrap();
    let dual = simulate_dual_acquisition(&cfg.link, FrameSpec::QVGA).unwrap();
    std::fs::write(dir.join("trace.csv"), trace_to_csv(&timing.trace))?;
    std::fs::write(dir.join("link.json"), json(serde_json::json!({ "timing": timing, "dual": dual })))?;

    let (l, r) = render_pair(&cfg.rig, &cfg.scene, cfg.frame.spec()).unwrap();
    std::fs::write(dir.join("left.pgm"), encode_pgm(&l))?;
    std::fs::write(dir.join("right.pgm"), encode_pgm(&r))?;
    let res = try_stitch(&l, &r, &cfg.stitch, cfg.seed);
    if let StitchResult::Stitched { panorama, .. } = &res {
        std::fs::write(dir.join("panorama.pgm"), encode_pgm(&panorama.image))?;
    }
    let report = StitchReport::new(&res, &l, &r, None);
    std::fs::write(dir.join("stitch.json"), Report::new(&cfg, report).to_json().unwrap())?;

    let ctx = QueryContext {
        rig: &cfg.rig,
        frame: cfg.frame.spec(),
        link: &cfg.link,
        stitch: &cfg.stitch,
        stitch_seed: cfg.seed,
        pipeline: &cfg.pipeline,
    };
    let jitter = MockConfig { jitter_sd_s: 0.05, ..cfg.mock.clone() };
    for config in [LatencyConfig::A, LatencyConfig::B, LatencyConfig::C] {
        let mut client = MockClient::new(jitter.clone(), cfg.seed).unwrap();
        let t = run_query(config, "vuebuds what does this sign say", &cfg.scene, &ctx, &mut client).unwrap();
        std::fs::write(dir.join(format!("timeline_{config}.json")), Report::new(&cfg, &t).to_json().unwrap())?;
    }
    Ok(())
}

fn determinism() -> Outcome {
    let dirs = [tempfile::tempdir().map_err(|e| e.to_string())?, tempfile::tempdir().map_err(|e| e.to_string())?];
    for d in &dirs {
        write_reports(d.path()).map_err(|e| e.to_string())?;
    }
    let mut names: Vec<_> = std::fs::read_dir(dirs[0].path())
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    ensure!(names.len() >= 11, "only {} report files written", names.len());
    for name in &names {
        let a = std::fs::read(dirs[0].path().join(name)).map_err(|e| e.to_string())?;
        let b = std::fs::read(dirs[1].path().join(name)).map_err(|e| e.to_string())?;
        ensure!(a == b, "{name:?} differs between runs");
    }
    Ok(format!("{} report files byte-identical", names.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 8] = [
        ("design-space table", Duration::from_secs(1), design_space),
        ("analytic vs simulated blind spot", Duration::from_secs(30), analytic_vs_simulated),
        ("link timing", Duration::from_secs(5), link_timing),
        ("wire-format round trip", Duration::from_secs(60), wire_round_trip),
        ("power model", Duration::from_secs(1), power_model),
        ("stitching properties", Duration::from_secs(60), stitching_properties),
        ("pipeline budgets", Duration::from_secs(5), pipeline_budgets),
        ("determinism", Duration::from_secs(120), determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > *limit => Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {} {name} ({elapsed:.2?}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name} ({elapsed:.2?}): {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
