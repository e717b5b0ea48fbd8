use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use umi_prop::io::parse_fit;
use umi_prop::ModelParams;

fn umi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_umi-prop"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("spawn umi-prop")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn testdata(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("testdata").join(name)
}

#[test]
fn fit_cif_on_four_bands() {
    let input = testdata("multiband_los_omni.csv");
    let o = umi(&["fit", "--model", "cif", "--input", input.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["model"], "CIF");
    assert_eq!(v["n_records"], 24);
    assert_eq!(v["per_band_counts"].as_array().unwrap().len(), 4);
    // equal counts per band put f0 at the plain mean of the bands
    assert_eq!(v["f0_ghz"], 70.25);
    let n = v["n"].as_f64().unwrap();
    assert!((1.8..2.2).contains(&n), "{n}");
}

#[test]
fn cif_on_one_band_is_rank_deficient() {
    let input = testdata("single_band_nlos.csv");
    let o = umi(&["fit", "--model", "cif", "--input", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("rank deficiency"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let o = umi(&["fit", "--model", "ci", "--input", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn output_file_round_trips_through_the_fit_parser() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fit.json");
    let input = testdata("multiband_los_omni.csv");
    let o = umi(&[
        "fit", "--model", "ci", "--input", input.to_str().unwrap(), "--format", "json", "--output", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let fit = parse_fit(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(fit.n_records, 24);
    assert!(matches!(fit.params, ModelParams::Ci(p) if p.n > 1.5 && p.sigma_db > 0.0));
}

#[test]
fn stats_on_delay_and_angular_profiles() {
    let pdp = testdata("two_tap.pdp.csv");
    let pas = testdata("two_lobe.pas.csv");
    let o = umi(&["stats", "--input", pdp.to_str().unwrap(), "--input", pas.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("RMS DS 50 ns"), "{text}");
    assert!(text.contains("2 direction(s)"), "{text}");
    // raising the threshold to 10 dB keeps only the strong lobe
    let o = umi(&["stats", "--input", pas.to_str().unwrap(), "--threshold-db", "10", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["profiles"][0]["directions"], 1);
}

#[test]
fn predict_csv_rows_per_distance() {
    let o = umi(&[
        "predict", "--catalog", "142,NLOS_BEST,DIRECTIONAL", "--model", "cif", "--distance", "100", "--distance", "200",
        "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "freq_ghz,distance_m,path_loss_db\n142,100,137.208\n142,200,146.497\n");
}

#[test]
fn coverage_csv_carries_outage() {
    let o = umi(&["coverage", "--catalog", "28,LOS,OMNI", "--n-drops", "500", "--seed", "3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# n_drops=500");
    assert!(lines[1].starts_with("# outage_fraction="));
    assert_eq!(lines[2], "percentile,snr_db");
    let pct: Vec<&str> = lines[3..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(pct, ["5", "50", "95"]);
}

#[test]
fn error_classes_map_to_exit_codes() {
    let o = umi(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    let o = umi(&["predict", "--catalog", "142,LOS,OMNI"]);
    assert_eq!(o.status.code(), Some(2), "missing --distance is a usage error");
    let o = umi(&["fit", "--model", "ci", "--input", "does-not-exist.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("does-not-exist.csv"));
    let o = umi(&["predict", "--catalog", "140,LOS,OMNI", "--distance", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("did you mean 142"));
    let o = umi(&["sample", "--catalog", "38,LOS,OMNI", "--distance", "50"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("asa"), "{}", stderr(&o));
}
