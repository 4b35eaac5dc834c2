use std::path::Path;
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use wten::{load_tensor, save_tensor, Tensor3};

fn wten(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wten"))
        .args(args)
        .output()
        .expect("failed to launch wten")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "wten failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is not JSON")
}

fn write_cube(dir: &Path, name: &str, n1: usize, n2: usize, p: usize) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let t = Tensor3::random(n1, n2, p, &mut rng);
    let path = dir.join(name);
    save_tensor(&t, &path).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn opcount_prints_exact_count() {
    let out = wten(&[
        "opcount", "--kind", "w", "--n1", "8", "--n2", "8", "--n3", "8", "--p", "8",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["kind"], "w");
    assert_eq!(v["count"].as_u64(), Some(8 * 8 * 8 * 8 + 2 * 8 * 3 * 64));
}

#[test]
fn opcount_rejects_w_for_non_dyadic_p() {
    let out = wten(&[
        "opcount", "--kind", "w", "--n1", "4", "--n2", "4", "--n3", "4", "--p", "6",
    ]);
    assert!(!out.status.success());
    assert!(!out.stderr.is_empty());
}

#[test]
fn svd_full_rank_reports_infinite_psnr() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_cube(dir.path(), "x.npy", 6, 5, 4);
    let out_path = dir.path().join("recon.npy");
    let out = wten(&[
        "svd",
        "--input",
        &input,
        "--rank",
        "5",
        "--method",
        "t",
        "--reps",
        "1",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    let v = stdout_json(&out);
    let rec = &v.as_array().unwrap()[0];
    assert_eq!(rec["method"], "t-svd");
    assert_eq!(rec["psnr_db"], "inf");
    assert_eq!(rec["shape"], serde_json::json!([6, 5, 4]));

    let x = load_tensor(Path::new(&input)).unwrap();
    let recon = load_tensor(&out_path).unwrap();
    assert!(recon.relative_distance(&x) < 1e-12);
}

#[test]
fn svd_writes_csv_report_and_preview() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_cube(dir.path(), "x.npy", 8, 8, 8);
    let report = dir.path().join("r.csv");
    let preview = dir.path().join("p.pgm");
    let out = wten(&[
        "svd",
        "--input",
        &input,
        "--rank",
        "2",
        "--method",
        "spw",
        "--reps",
        "1",
        "--format",
        "csv",
        "--report",
        report.to_str().unwrap(),
        "--preview",
        preview.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out.stdout.is_empty());

    let csv = std::fs::read_to_string(&report).unwrap();
    let mut lines = csv.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("method,shape,levels,rank"));
    assert!(lines.next().unwrap().starts_with("sp-w-svd,"));
    let pgm = std::fs::read(&preview).unwrap();
    assert!(pgm.starts_with(b"P5"));
}

#[test]
fn deblur_spw_matches_w_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_cube(dir.path(), "x.npy", 16, 16, 4);
    let mut outs = Vec::new();
    for method in ["w", "spw"] {
        let out_path = dir.path().join(format!("{method}.npy"));
        let out = wten(&[
            "deblur",
            "--input",
            &input,
            "--bv",
            "2",
            "--bh",
            "2",
            "--method",
            method,
            "--reps",
            "1",
            "--no-baseline",
            "--out",
            out_path.to_str().unwrap(),
        ]);
        let v = stdout_json(&out);
        assert!(v[0]["time_median_s"].as_f64().unwrap() >= 0.0);
        outs.push(load_tensor(&out_path).unwrap());
    }
    assert!(outs[0].relative_distance(&outs[1]) < 1e-10);
}

#[test]
fn bench_emits_one_record_per_product_and_size() {
    let out = wten(&["bench", "--pmax", "8", "--reps", "1"]);
    let v = stdout_json(&out);
    let recs = v.as_array().unwrap();
    for p in [2, 4, 8] {
        for m in ["m", "t", "w"] {
            assert!(
                recs.iter()
                    .any(|r| r["shape"][2] == p && r["method"].as_str().unwrap().starts_with(m)),
                "missing {m} at p={p}: {v}"
            );
        }
    }
}

#[test]
fn preview_of_single_band() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_cube(dir.path(), "x.npy", 5, 7, 3);
    let out_path = dir.path().join("b.pgm");
    let out = wten(&[
        "preview",
        "--input",
        &input,
        "--band",
        "2",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let pgm = std::fs::read(&out_path).unwrap();
    let header = String::from_utf8_lossy(&pgm[..12]);
    assert!(header.starts_with("P5\n7 5\n"), "{header:?}");
}

#[test]
fn missing_input_fails_cleanly() {
    let out = wten(&["svd", "--input", "/nonexistent/x.npy", "--rank", "1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("wten:"));
}
