//! End-to-end tests of the `depth` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use meshstereo_cli::formats::pfm::load_pfm;
use meshstereo_cli::formats::pgm::save_pgm;
use meshstereo_cli::formats::png16::{load_gt_png16, save_disparity_png16};
use meshstereo_core::synth::shifted_pair;
use meshstereo_core::DisparityMap;
use tempfile::TempDir;

fn depth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_depth"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Writes a shifted stereo pair; returns (left path, right path).
fn fixture_pair(dir: &Path, shift: u16, seed: u64) -> (PathBuf, PathBuf) {
    let (l, r) = shifted_pair(96, 64, shift, seed);
    let lp = dir.join(format!("l{seed}.pgm"));
    let rp = dir.join(format!("r{seed}.pgm"));
    save_pgm(&lp, &l).unwrap();
    save_pgm(&rp, &r).unwrap();
    (lp, rp)
}

#[test]
fn default_run_writes_each_output_format() {
    let dir = TempDir::new().unwrap();
    let (l, r) = fixture_pair(dir.path(), 5, 1);
    for name in ["out.png", "out.pgm", "out.pfm"] {
        let out_path = dir.path().join(name);
        let out = depth(&[
            "-l",
            l.to_str().unwrap(),
            "-r",
            r.to_str().unwrap(),
            "-o",
            out_path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{name}: {}", stderr_of(&out));
        assert!(out_path.is_file());
        assert!(String::from_utf8_lossy(&out.stdout).contains("pixels valid"));
    }
    // The PNG comes back as a readable 16-bit map with plausible content.
    let gt = load_gt_png16(&dir.path().join("out.png")).unwrap();
    assert_eq!((gt.width(), gt.height()), (96, 64));
    let hits = (10..90)
        .flat_map(|u| (5..60).map(move |v| (u, v)))
        .filter(|&(u, v)| gt.disparity(u, v) == Some(5.0))
        .count();
    assert!(hits > 3000, "{hits}");
}

#[test]
fn config_file_changes_the_run_and_bad_configs_are_rejected() {
    let dir = TempDir::new().unwrap();
    let (l, r) = fixture_pair(dir.path(), 3, 2);
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "disparity_range = 16\nexecutor = stream\nmedian_radius = 0\n").unwrap();
    let out_path = dir.path().join("out.png");
    let out = depth(&[
        "-l",
        l.to_str().unwrap(),
        "-r",
        r.to_str().unwrap(),
        "-o",
        out_path.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));

    std::fs::write(&cfg, "disparty_range = 16\n").unwrap();
    let out = depth(&[
        "-l",
        l.to_str().unwrap(),
        "-r",
        r.to_str().unwrap(),
        "-o",
        out_path.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("disparty_range"));
}

#[test]
fn missing_required_arguments_exit_with_usage() {
    let out = depth(&["-l", "only-left.pgm"]);
    assert_eq!(out.status.code(), Some(2));
    let out = depth(&["-l", "a.pgm", "-r", "b.pgm", "-o", "out.gif"]);
    assert_ne!(out.status.code(), Some(0));
}

/// Builds a left/right dataset with ground truth equal to the true shift
/// over the region where the shifted texture actually exists.
fn fixture_dataset(dir: &Path, images: usize) -> (PathBuf, PathBuf) {
    let root = dir.join("data");
    let gt_dir = dir.join("gt");
    std::fs::create_dir_all(root.join("left")).unwrap();
    std::fs::create_dir_all(root.join("right")).unwrap();
    std::fs::create_dir_all(&gt_dir).unwrap();
    for i in 0..images {
        let shift = 4 + i as u16;
        let (l, r) = shifted_pair(96, 64, shift, 60 + i as u64);
        save_pgm(&root.join(format!("left/img{i}.pgm")), &l).unwrap();
        save_pgm(&root.join(format!("right/img{i}.pgm")), &r).unwrap();
        let mut gt = DisparityMap::new_invalid(96, 64);
        for v in 0..64 {
            for u in shift as usize..96 {
                gt.set(u, v, shift);
            }
        }
        save_disparity_png16(&gt_dir.join(format!("img{i}.png")), &gt).unwrap();
    }
    (root, gt_dir)
}

#[test]
fn eval_writes_per_image_csv_rows() {
    let dir = TempDir::new().unwrap();
    let (root, gt_dir) = fixture_dataset(dir.path(), 2);
    let csv_path = dir.path().join("eval.csv");
    let out = depth(&[
        "eval",
        "--dataset",
        root.to_str().unwrap(),
        "--gt",
        gt_dir.to_str().unwrap(),
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "image,bad_pct,bad_pct_all,density_pct,compared");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("img0,"));
    assert!(lines[2].starts_with("img1,"));
    assert!(stderr_of(&out).contains("mean bad-pixel rate"));
}

#[test]
fn sweep_emits_one_row_per_config_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (root, gt_dir) = fixture_dataset(dir.path(), 2);
    let run = |path: &Path| {
        let out = depth(&[
            "sweep",
            "--dataset",
            root.to_str().unwrap(),
            "--gt",
            gt_dir.to_str().unwrap(),
            "--windows",
            "7,9",
            "--dense",
            "5",
            "--downsample",
            "1,8",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr_of(&out));
        std::fs::read_to_string(path).unwrap()
    };
    let a = run(&dir.path().join("a.csv"));
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(
        lines[0],
        "sparse_window,dense_window,downsample,error_pct,density_pct,ms_per_frame"
    );
    // 2 windows x 1 dense x 2 downsample = 4 rows.
    assert_eq!(lines.len(), 5);
    assert!(lines.iter().skip(1).any(|l| l.starts_with("7,5,1,")));
    assert!(lines.iter().skip(1).any(|l| l.starts_with("9,5,8,")));
    // Error and density columns are bit-stable across runs; only the
    // timing column may move.
    let b = run(&dir.path().join("b.csv"));
    let strip_ms = |csv: &str| -> Vec<String> {
        csv.lines()
            .map(|l| l.rsplit_once(',').map(|(head, _)| head.to_string()).unwrap())
            .collect()
    };
    assert_eq!(strip_ms(&a), strip_ms(&b));
}

#[test]
fn bench_stream_reports_step_counts_that_match_the_model() {
    let dir = TempDir::new().unwrap();
    let (l, r) = fixture_pair(dir.path(), 6, 3);
    let json_path = dir.path().join("bench.json");
    let out = depth(&[
        "bench",
        "-l",
        l.to_str().unwrap(),
        "-r",
        r.to_str().unwrap(),
        "--executor",
        "stream",
        "--frames-in-flight",
        "2",
        "--iterations",
        "2",
        "--warmup",
        "1",
        "--out",
        json_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(report["executor"], "stream");
    assert_eq!(report["frames_in_flight"], 2);
    assert_eq!(report["stream"]["model_matches"], true);
    assert_eq!(
        report["stream"]["measured"]["total_steps"],
        report["stream"]["model"]["total_steps"]
    );
    assert!(report["stage_ms"]["dense_match"].as_f64().unwrap() >= 0.0);
}

#[test]
fn bench_batch_omits_stream_section() {
    let dir = TempDir::new().unwrap();
    let (l, r) = fixture_pair(dir.path(), 6, 4);
    let out = depth(&[
        "bench",
        "-l",
        l.to_str().unwrap(),
        "-r",
        r.to_str().unwrap(),
        "--iterations",
        "1",
        "--warmup",
        "0",
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let report: serde_json::Value =
        serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["executor"], "batch");
    assert!(report.get("stream").is_none());
}

#[test]
fn inspect_dumps_every_stage_in_its_format() {
    let dir = TempDir::new().unwrap();
    let (l, r) = fixture_pair(dir.path(), 7, 5);
    let dump = |stage: &str, name: &str| -> PathBuf {
        let path = dir.path().join(name);
        let out = depth(&[
            "inspect",
            "-l",
            l.to_str().unwrap(),
            "-r",
            r.to_str().unwrap(),
            "--stage",
            stage,
            "-o",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{stage}: {}", stderr_of(&out));
        path
    };

    let support = std::fs::read_to_string(dump("support", "support.csv")).unwrap();
    assert!(support.starts_with("u,v,d\n"));
    assert!(support.lines().count() > 10);

    let filtered = std::fs::read_to_string(dump("filtered", "filtered.csv")).unwrap();
    assert!(filtered.starts_with("u,v,d\n"));
    // Filtering never adds points.
    assert!(filtered.lines().count() <= support.lines().count());

    let grid = std::fs::read_to_string(dump("grid", "grid.csv")).unwrap();
    let row = grid.lines().nth(1).unwrap();
    let mask = row.split(',').nth(2).unwrap();
    assert_eq!(mask.len(), 64, "256-bit mask as 64 hex digits: {row}");

    let mesh = std::fs::read_to_string(dump("mesh", "mesh.obj")).unwrap();
    let vertices = mesh.lines().filter(|l| l.starts_with("v ")).count();
    let faces = mesh.lines().filter(|l| l.starts_with("f ")).count();
    assert!(vertices >= 3 && faces >= 1, "v={vertices} f={faces}");
    // Face indices are 1-based and in range.
    for line in mesh.lines().filter(|l| l.starts_with("f ")) {
        for idx in line.split_whitespace().skip(1) {
            let i: usize = idx.parse().unwrap();
            assert!(i >= 1 && i <= vertices);
        }
    }

    let prior_path = dump("prior", "prior.pfm");
    let (w, h, rows) = load_pfm(&prior_path).unwrap();
    assert_eq!((w, h), (96, 64));
    assert!(rows.iter().any(|&x| x >= 0.0), "some pixel is covered");
}
