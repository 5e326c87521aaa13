use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

fn stationplot(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stationplot"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

fn diagnostic(out: &Output) -> serde_json::Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().last().expect("diagnostic on stderr");
    serde_json::from_str(line).unwrap_or_else(|_| panic!("not JSON: {line}"))
}

/// Bonn-style integer records: class A white noise, class E random walk.
fn dataset(records: usize, len: usize) -> TempDir {
    let tmp = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (class, prefix) in [("A", "Z"), ("E", "S")] {
        let dir = tmp.path().join(class);
        fs::create_dir_all(&dir).unwrap();
        for r in 0..records {
            let mut acc = 0i64;
            let text: String = (0..len)
                .map(|_| {
                    let step = rng.random_range(-40..=40);
                    let v = if class == "E" {
                        acc += step;
                        acc
                    } else {
                        step
                    };
                    format!("{v}\n")
                })
                .collect();
            fs::write(dir.join(format!("{prefix}{r:03}.txt")), text).unwrap();
        }
    }
    tmp
}

#[test]
fn embed_writes_one_row_per_point() {
    let tmp = dataset(1, 120);
    let out = stationplot(
        &["embed", "--data", "A=A", "--data", "E=E", "--order", "1", "-o", "out"],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(tmp.path().join("out/embeddings/A/Z000_n1.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "x,y");
    assert_eq!(lines.len() - 1, 120 - 2);
    assert!(!tmp.path().join("out/embeddings/A/Z000_n1.svg").exists());

    let out = stationplot(
        &[
            "embed",
            "--data",
            "A=A",
            "--data",
            "E=E",
            "--order",
            "0",
            "--dimension",
            "3",
            "--plot",
            "-o",
            "out3",
        ],
        tmp.path(),
    );
    assert!(out.status.success());
    let csv = fs::read_to_string(tmp.path().join("out3/embeddings/E/S000_n0.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.split(',').count() == 3));
    assert!(tmp.path().join("out3/embeddings/E/S000_n0.svg").exists());
}

#[test]
fn missing_directory_is_a_validation_error() {
    let tmp = dataset(1, 50);
    let out = stationplot(&["features", "--data", "A=A", "--data", "E=nowhere"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let d = diagnostic(&out);
    assert_eq!(d["error"]["kind"], "validation");
    assert!(d["error"]["message"].as_str().unwrap().contains("nowhere"));
}

#[test]
fn unknown_kernel_lists_valid_kinds() {
    let tmp = dataset(4, 200);
    fs::write(
        tmp.path().join("cfg.json"),
        r#"{"data": {"A": "A", "E": "E"}, "kernels": ["sigmoid"]}"#,
    )
    .unwrap();
    let out = stationplot(&["pipeline", "--config", "cfg.json"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let msg = diagnostic(&out)["error"]["message"].as_str().unwrap().to_string();
    for kind in ["linear", "quadratic", "polynomial", "rbf"] {
        assert!(msg.contains(kind), "{msg}");
    }
}

#[test]
fn unknown_config_field_rejected() {
    let tmp = dataset(1, 50);
    fs::write(tmp.path().join("cfg.json"), r#"{"runz": 3}"#).unwrap();
    let out = stationplot(&["features", "--config", "cfg.json"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_arguments_exit_with_validation_code() {
    let tmp = TempDir::new().unwrap();
    let out = stationplot(&["classify", "--runs", "many"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(diagnostic(&out)["error"]["kind"], "validation");
    let out = stationplot(&["--threads", "0", "features"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_feature_file_is_a_data_error() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("f.csv"), "source_id,label,order,area\nZ1,A,0,oops\n").unwrap();
    let out = stationplot(&["stats", "--features", "f.csv"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let msg = diagnostic(&out)["error"]["message"].as_str().unwrap().to_string();
    assert!(msg.contains("f.csv:2"), "{msg}");
}

#[test]
fn features_are_reproducible_and_degenerate_records_listed() {
    let tmp = dataset(6, 300);
    fs::write(tmp.path().join("A/Z999.txt"), "5\n".repeat(300)).unwrap();
    for out_dir in ["o1", "o2"] {
        let out = stationplot(
            &["features", "--data", "A=A", "--data", "E=E", "-o", out_dir],
            tmp.path(),
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = fs::read(tmp.path().join("o1/features/features.csv")).unwrap();
    let b = fs::read(tmp.path().join("o2/features/features.csv")).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    // 12 records × 3 orders
    assert_eq!(text.lines().count(), 1 + 12 * 3);
    assert!(text.starts_with("source_id,label,order,area,perimeter,circularity,aspect_ratio\n"));
    let excluded = fs::read_to_string(tmp.path().join("o1/features/excluded.csv")).unwrap();
    assert_eq!(excluded.lines().filter(|l| l.starts_with("Z999,A,")).count(), 3);
}

#[test]
fn stats_and_classify_from_feature_file() {
    let tmp = dataset(10, 400);
    let out = stationplot(&["features", "--data", "A=A", "--data", "E=E", "-o", "o"], tmp.path());
    assert!(out.status.success());

    let out = stationplot(&["stats", "-o", "o", "--order", "1"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(tmp.path().join("o/stats/significance_n1.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "feature,a-vs-e_anova_p,a-vs-e_kruskal_p");
    assert_eq!(csv.lines().count(), 5);
    assert!(tmp.path().join("o/figures/boxplot_area_n1.svg").exists());

    let mut reports = Vec::new();
    for _ in 0..2 {
        let out = stationplot(
            &[
                "classify", "-o", "o", "--runs", "1", "--seed", "9", "--kernel", "linear", "--kernel", "rbf:2",
            ],
            tmp.path(),
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        reports.push(fs::read(tmp.path().join("o/reports/a-vs-e_n0.json")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    let report: serde_json::Value = serde_json::from_slice(&reports[0]).unwrap();
    assert_eq!(report["evaluation"]["runs"], 1);
    assert_eq!(report["evaluation"]["kernels"][0]["accuracy"]["std"], 0.0);
}

#[test]
fn single_class_feature_file_rejected() {
    let tmp = TempDir::new().unwrap();
    let mut csv = String::from("source_id,label,order,area\n");
    for i in 0..5 {
        csv.push_str(&format!("Z{i},A,0,{}\n", i + 1));
    }
    fs::write(tmp.path().join("f.csv"), csv).unwrap();
    let out = stationplot(&["stats", "--features", "f.csv", "--problem", "a-vs-e"], tmp.path());
    assert!(!out.status.success());
    assert!(diagnostic(&out)["error"]["message"].as_str().unwrap().contains('E'));
}

#[test]
fn pipeline_flags_override_config() {
    let tmp = dataset(8, 300);
    fs::write(
        tmp.path().join("cfg.json"),
        r#"{"data": {"A": "A", "E": "E"}, "runs": 50, "orders": [0, 1, 2], "kernels": ["cubic"], "output": "from-config"}"#,
    )
    .unwrap();
    let out = stationplot(
        &[
            "pipeline",
            "--config",
            "cfg.json",
            "--runs",
            "2",
            "--order",
            "1",
            "--kernel",
            "linear",
            "--no-plot",
            "-o",
            "flags",
        ],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!tmp.path().join("from-config").exists());
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("flags/reports/a-vs-e_n1.json")).unwrap()).unwrap();
    assert_eq!(report["evaluation"]["runs"], 2);
    assert_eq!(report["evaluation"]["kernels"].as_array().unwrap().len(), 1);
    assert_eq!(report["evaluation"]["kernels"][0]["name"], "linear");
    assert!(!tmp.path().join("flags/reports/a-vs-e_n0.json").exists());
    assert!(!tmp.path().join("flags/figures").exists());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("best for a-vs-e"), "{stdout}");
}
