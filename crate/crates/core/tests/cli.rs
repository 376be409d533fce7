use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use integrated_auc::cli::strip_timestamp;
use tempfile::TempDir;

fn iauc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iauc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

/// `marker` equals the gold value, `anti` is its negation, `noise` is unrelated.
fn marker_file(dir: &Path) -> PathBuf {
    let mut s = String::from("marker,anti,noise,gold\n");
    for i in 0..40 {
        let z = (i as f64 * 0.37).sin() * 3.0 + i as f64 * 0.05;
        let noise = (i as f64 * 2.71).cos();
        s.push_str(&format!("{z},{},{noise},{z}\n", -z));
    }
    write(dir, "markers.csv", &s)
}

fn body_rows(report: &str) -> Vec<Vec<String>> {
    report
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .skip(1)
        .map(|l| l.split('\t').map(String::from).collect())
        .collect()
}

#[test]
fn evaluate_ranks_perfect_marker_first_and_flags_anti_marker() {
    let dir = TempDir::new().unwrap();
    let input = marker_file(dir.path());
    let o = iauc(&["evaluate", "--input", input.to_str().unwrap(), "--gold", "gold", "--boot", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows = body_rows(&text);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][0], "marker");
    // uniform weight stays inside the data range; the kernel weight leaks a little mass past it
    assert!(rows[0][1].starts_with("1.000"));
    let a_i3: f64 = rows[0][3].split('(').next().unwrap().parse().unwrap();
    assert!(a_i3 > 0.9 && a_i3 < 1.0);
    let p: f64 = rows[0][7].parse().unwrap();
    assert!(p < 1e-7);
    let anti = rows.iter().find(|r| r[0] == "anti").unwrap();
    assert!(anti[1].starts_with("0.000"));
    let anti_a_i3: f64 = anti[3].split('(').next().unwrap().parse().unwrap();
    assert!((anti_a_i3 + a_i3 - 1.0).abs() < 1e-3);
    assert_eq!(anti.last().unwrap(), "reversed");
    assert!(text.contains("# notice: anti runs against the gold standard"));
}

#[test]
fn evaluate_cells_carry_value_and_sd() {
    let dir = TempDir::new().unwrap();
    let input = marker_file(dir.path());
    let o =
        iauc(&["evaluate", "--input", input.to_str().unwrap(), "--gold", "3", "--boot", "20", "--weight", "empirical"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let header = text.lines().find(|l| l.starts_with("variable")).unwrap();
    assert!(header.contains("A[empirical]"));
    let noise = body_rows(&text).into_iter().find(|r| r[0] == "noise").unwrap();
    for cell in &noise[1..6] {
        let (v, sd) = cell.trim_end_matches(')').split_once('(').unwrap();
        assert!(v.parse::<f64>().is_ok() && sd.parse::<f64>().is_ok(), "{cell}");
    }
}

#[test]
fn combine_reports_both_methods_with_unit_anchor() {
    let dir = TempDir::new().unwrap();
    let mut s = String::from("a\tb\tc\tz\n");
    for i in 0..60 {
        let a = (i as f64 * 0.91).sin();
        let b = (i as f64 * 1.73).cos();
        let c = (i as f64 * 0.29).sin() * (i as f64 * 0.53).cos();
        let z = a + 0.7 * b + 0.3 * (i as f64 * 3.1).sin();
        s.push_str(&format!("{a}\t{b}\t{c}\t{z}\n"));
    }
    let input = write(dir.path(), "combo.tsv", &s);
    let o = iauc(&["combine", "--input", input.to_str().unwrap(), "--gold", "z", "--boot", "20"]);
    assert!(matches!(o.status.code(), Some(0) | Some(4)));
    let text = stdout(&o);
    let header = text.lines().find(|l| l.starts_with("variable")).unwrap();
    assert_eq!(header, "variable\tCC\tTGDM");
    let coefs: Vec<Vec<String>> = text
        .lines()
        .skip_while(|l| !l.starts_with("variable"))
        .skip(1)
        .take(3)
        .map(|l| l.split('\t').map(String::from).collect())
        .collect();
    assert!(coefs.iter().any(|r| r[2] == "1.000" || r[2] == "-1.000"));
    let methods: Vec<&str> = text.lines().skip_while(|l| !l.starts_with("method")).skip(1).collect();
    assert_eq!(methods.len(), 2);
    assert!(methods[0].starts_with("CC\t") && methods[1].starts_with("TGDM\t"));
}

#[test]
fn combine_needs_two_variables() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "one.csv", "x,z\n1,2\n2,3\n3,1\n4,5\n");
    let o = iauc(&["combine", "--input", input.to_str().unwrap(), "--gold", "z", "--boot", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("combination requires ≥2 variables"));
}

#[test]
fn input_errors_exit_with_two_and_name_the_line() {
    let dir = TempDir::new().unwrap();
    let o = iauc(&["evaluate", "--input", dir.path().join("missing.csv").to_str().unwrap(), "--gold", "z"]);
    assert_eq!(o.status.code(), Some(2));
    let input = write(dir.path(), "ragged.csv", "x,z\n1,2\n2\n3,1\n");
    let o = iauc(&["evaluate", "--input", input.to_str().unwrap(), "--gold", "z"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"), "{}", String::from_utf8_lossy(&o.stderr));
    let o = iauc(&["evaluate", "--input", input.to_str().unwrap(), "--gold", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reports_repeat_byte_for_byte_and_replay_from_header() {
    let dir = TempDir::new().unwrap();
    let input = marker_file(dir.path());
    for format in ["delimited", "records"] {
        let out1 = dir.path().join(format!("r1.{format}"));
        let out2 = dir.path().join(format!("r2.{format}"));
        let out3 = dir.path().join(format!("r3.{format}"));
        let args = |out: &Path| {
            vec![
                "evaluate".to_string(),
                "--input".into(),
                input.to_str().unwrap().into(),
                "--gold".into(),
                "gold".into(),
                "--boot".into(),
                "30".into(),
                "--seed".into(),
                "9".into(),
                "--format".into(),
                format.into(),
                "--out".into(),
                out.to_str().unwrap().into(),
            ]
        };
        let a1 = args(&out1);
        let a2 = args(&out2);
        assert_eq!(iauc(&a1.iter().map(String::as_str).collect::<Vec<_>>()).status.code(), Some(0));
        assert_eq!(iauc(&a2.iter().map(String::as_str).collect::<Vec<_>>()).status.code(), Some(0));
        let o = iauc(&["replay", out1.to_str().unwrap(), "--out", out3.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let r1 = std::fs::read_to_string(&out1).unwrap();
        let r2 = std::fs::read_to_string(&out2).unwrap();
        let r3 = std::fs::read_to_string(&out3).unwrap();
        assert_eq!(strip_timestamp(&r1), strip_timestamp(&r2));
        assert_eq!(strip_timestamp(&r1), strip_timestamp(&r3));
        assert_eq!(r1.lines().count(), strip_timestamp(&r1).lines().count() + 1);
    }
}

#[test]
fn records_are_one_json_object_per_line() {
    let dir = TempDir::new().unwrap();
    let input = marker_file(dir.path());
    let o =
        iauc(&["evaluate", "--input", input.to_str().unwrap(), "--gold", "gold", "--boot", "0", "--format", "records"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["record"], "config");
    assert_eq!(lines[1]["record"], "generated");
    let vars: Vec<&serde_json::Value> = lines.iter().filter(|l| l["record"] == "variable").collect();
    assert_eq!(vars.len(), 3);
    assert_eq!(vars[0]["variable"], "marker");
    assert_eq!(vars[0]["a_i1"]["value"], 1.0);
    assert!(vars[0]["a_i1"]["sd"].is_null());
}

#[test]
fn simulate_emits_quantile_triplets() {
    let o = iauc(&["simulate", "--design", "null", "--n", "30", "--replicates", "4", "--boot", "10", "--seed", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let header = text.lines().find(|l| l.starts_with("cell")).unwrap();
    assert!(header.contains("q25\tq50\tq75"));
    assert_eq!(body_rows(&text).len(), 15);
    let again = stdout(&iauc(&[
        "simulate",
        "--design",
        "null",
        "--n",
        "30",
        "--replicates",
        "4",
        "--boot",
        "10",
        "--seed",
        "2",
    ]));
    assert_eq!(strip_timestamp(&text), strip_timestamp(&again));
}

#[test]
fn bad_arguments_are_rejected() {
    let o = iauc(&["simulate", "--design", "linear", "--p", "1", "--replicates", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = iauc(&["simulate", "--design", "bivariate", "--boot", "1"]);
    assert_eq!(o.status.code(), Some(2));
}
