use std::fs;
use std::path::Path;
use std::process::Command;

use corona_sim::denoise::{encode_pgm, ImageBuffer};

fn corona_sim(args: &[&str], out: &Path) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_corona-sim"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap();
    (o.status.code().unwrap(), String::from_utf8_lossy(&o.stderr).into_owned())
}

fn files_under(dir: &Path) -> Vec<String> {
    let mut v = Vec::new();
    if let Ok(rd) = fs::read_dir(dir) {
        for e in rd {
            let p = e.unwrap().path();
            if p.is_dir() {
                v.extend(files_under(&p));
            } else {
                v.push(p.file_name().unwrap().to_string_lossy().into_owned());
            }
        }
    }
    v.sort();
    v
}

#[test]
fn lifetime_sweep_emits_one_summary_per_protocol_and_count() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = corona_sim(&["--mode", "lifetime", "--nodes", "100,1000", "--seeds", "3", "--max-rounds", "300"], dir.path());
    assert_eq!(code, 0, "{err}");
    for p in ["proposed", "leach"] {
        for l in [100, 1000] {
            let s: serde_json::Value =
                serde_json::from_str(&fs::read_to_string(dir.path().join(format!("summary_{p}_L{l}.json"))).unwrap()).unwrap();
            assert_eq!(s["node_count"], l);
            assert_eq!(s["runs"].as_array().unwrap().len(), 1);
            let csv = fs::read_to_string(dir.path().join(format!("lifetime/metrics_{p}_L{l}_seed3.csv"))).unwrap();
            assert_eq!(csv.lines().next().unwrap(), "round,protocol,alive,residual_j,packets_bs,coverage_rate");
            assert_eq!(csv.lines().count(), 301);
            let plot = fs::read_to_string(dir.path().join(format!("lifetime/plot_alive_{p}_L{l}_seed3.dat"))).unwrap();
            assert_eq!(plot.lines().nth(1).unwrap().split(' ').count(), 2);
        }
    }
}

#[test]
fn usage_errors_exit_one_and_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    assert_eq!(corona_sim(&["--mode", "lifetime", "--seeds", ""], &out).0, 1);
    assert_eq!(corona_sim(&["--mode", "bogus"], &out).0, 1);
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "diameter = 300\nwidgets = 4\n").unwrap();
    let (code, err) = corona_sim(&["--mode", "lifetime", "--config", cfg.to_str().unwrap()], &out);
    assert_eq!(code, 1);
    assert!(err.contains("line 2"), "{err}");
    assert!(files_under(&out).is_empty());
}

#[test]
fn config_file_drives_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("net.cfg");
    fs::write(&cfg, "# small field\ndiameter = 200\nnode_count = 40\nrng_seed = 9\n").unwrap();
    let (code, err) = corona_sim(&["--mode", "lifetime", "--config", cfg.to_str().unwrap(), "--protocols", "proposed", "--max-rounds", "10"], dir.path());
    assert_eq!(code, 0, "{err}");
    assert!(dir.path().join("lifetime/metrics_proposed_L40_seed9.csv").exists());
}

#[test]
fn missing_images_are_listed_and_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let images = dir.path().join("img");
    fs::create_dir(&images).unwrap();
    let img = ImageBuffer::from_fn(128, 128, |x, y| 30.0 + ((x * 5 + y * 9) % 190) as f64).unwrap();
    fs::write(images.join("tile.pgm"), encode_pgm(&img)).unwrap();
    let out = dir.path().join("o");
    let (code, err) = corona_sim(
        &["--mode", "denoise", "--images", "tile,absent", "--sigmas", "0,20", "--image-dir", images.to_str().unwrap()],
        &out,
    );
    assert_eq!(code, 2);
    assert!(err.contains("absent.pgm"), "{err}");
    let csv = fs::read_to_string(out.join("denoise/results.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    let zero: Vec<&str> = rows[0].split(',').collect();
    assert_eq!(zero[..3], ["tile", "0", "inf"]);
    assert!(zero[4].parse::<f64>().unwrap() >= 50.0);
    let noisy: Vec<f64> = rows[1].split(',').skip(2).map(|v| v.parse().unwrap()).collect();
    assert!((noisy[0] - 20.0 * (255.0f64 / 20.0).log10()).abs() < 0.3, "{rows:?}");
    assert!(out.join("denoise/tile_s20_denoised.pgm").exists());
    assert!(out.join("denoise/table.txt").exists());
}

#[test]
fn failed_run_removes_partial_outputs() {
    let dir = tempfile::tempdir().unwrap();
    // a directory squatting on the summary path makes the final write fail
    fs::create_dir_all(dir.path().join("summary_proposed_L100.json")).unwrap();
    let (code, _) = corona_sim(&["--mode", "lifetime", "--protocols", "proposed", "--max-rounds", "20"], dir.path());
    assert_eq!(code, 2);
    assert!(files_under(&dir.path().join("lifetime")).is_empty());
}

#[test]
fn lemma1_and_coverage_modes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(corona_sim(&["--mode", "lemma1"], dir.path()).0, 0);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("lemma1/report.json")).unwrap()).unwrap();
    assert_eq!(report.as_array().unwrap().len(), 3);
    assert!(report.as_array().unwrap().iter().all(|r| r["pass"] == true));

    assert_eq!(corona_sim(&["--mode", "coverage", "--seeds", "2", "--grid-res", "1"], dir.path()).0, 0);
    let pgm = fs::read(dir.path().join("coverage/mask_L100_seed2.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n300 300\n255\n"));
}

#[test]
fn timing_reports_median_and_machine() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = corona_sim(&["--mode", "timing", "--nodes", "100,1000", "--max-rounds", "200", "--grid-res", "0"], dir.path());
    assert_eq!(code, 0, "{err}");
    let csv = fs::read_to_string(dir.path().join("timing/timing.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    let med = |p: &str, l: &str| -> f64 {
        csv.lines()
            .find(|r| r.starts_with(&format!("{p},{l},")))
            .unwrap()
            .split(',')
            .nth(4)
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!(med("leach", "1000") > med("leach", "100"));
    assert!(fs::read_to_string(dir.path().join("timing/machine.txt")).unwrap().contains("cpus="));
}

#[test]
fn thread_cap_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_corona-sim"))
        .args(["--mode", "lemma1", "--out"])
        .arg(dir.path())
        .env("CORONA_SIM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}
