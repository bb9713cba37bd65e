use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const ATOM1: &str = r#"{"atoms":[{"t":1,"w":1}],"segments":[]}"#;
const UNIFORM_1_2: &str =
    r#"{"segments":[{"lo":1,"hi":2,"density":{"kind":"const","params":[1]}}]}"#;
const LEBESGUE_1_INF: &str =
    r#"{"segments":[{"lo":1,"hi":"inf","density":{"kind":"const","params":[1]},"exp_hi":0}]}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hausdorff"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn value_line(out: &str) -> &str {
    out.lines()
        .find_map(|l| l.strip_prefix("value = "))
        .expect("value line")
}

#[test]
fn apply_single_atom_is_identity() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "atom1.json", ATOM1);
    let o = run(&[
        "apply",
        "-m",
        s(&m),
        "-f",
        "ratpow:shift=1,exp=2",
        "-z",
        "0+1i",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(value_line(&stdout(&o)), "-0.25+0i");
}

#[test]
fn apply_uniform_segment() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "u.json", UNIFORM_1_2);
    let o = run(&[
        "apply",
        "-m",
        s(&m),
        "-f",
        "ratpow:shift=1,exp=2",
        "-z",
        "0+1i",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = value_line(&stdout(&o))
        .trim_end_matches("+0i")
        .parse::<f64>()
        .unwrap();
    let exact = -(1.5f64.ln() - 1.0 / 6.0);
    assert!((v - exact).abs() < 1e-10, "{v}");
}

#[test]
fn quasi_routes_agree() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "u.json", UNIFORM_1_2);
    let base = [
        "apply",
        "-m",
        s(&m),
        "-f",
        "test:p=2,eps=0.3",
        "-z",
        "0.5+0.7i",
        "--quasi",
    ];
    let a = run(&base);
    let mut direct = base.to_vec();
    direct.push("--direct");
    let b = run(&direct);
    let parse = |o: &Output| {
        let t = stdout(o);
        let v = value_line(&t).trim_end_matches('i').to_string();
        let k = v[1..].find(['+', '-']).unwrap() + 1;
        (
            v[..k].parse::<f64>().unwrap(),
            v[k..].parse::<f64>().unwrap(),
        )
    };
    let (ra, ia) = parse(&a);
    let (rb, ib) = parse(&b);
    assert!(
        (ra - rb).abs() < 1e-9 && (ia - ib).abs() < 1e-9,
        "{ra}{ia} vs {rb}{ib}"
    );
}

#[test]
fn batch_points_write_csv() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "atom1.json", ATOM1);
    let pts = write(&dir, "pts.txt", "0+1i\n# comment\n\n2-0.5i\n");
    let bad = run(&[
        "apply",
        "-m",
        s(&m),
        "-f",
        "ratpow:shift=1,exp=2",
        "--points",
        s(&pts),
    ]);
    assert_eq!(
        bad.status.code(),
        Some(2),
        "lower half-plane point is a config error"
    );

    let pts = write(&dir, "pts.txt", "0+1i\n# comment\n\n2+0.5i\n");
    let out = dir.path().join("out.csv");
    let o = run(&[
        "apply",
        "-m",
        s(&m),
        "-f",
        "ratpow:shift=1,exp=2",
        "--points",
        s(&pts),
        "-o",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["x", "y", "re", "im", "err"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][2].parse::<f64>().unwrap(), -0.25);
}

#[test]
fn divergent_moment_asks_for_delta() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "leb.json", LEBESGUE_1_INF);
    let o = run(&[
        "apply",
        "-m",
        s(&m),
        "-f",
        "ratpow:shift=1,exp=2",
        "-z",
        "0+1i",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("moment diverges; supply --delta"),
        "{}",
        stderr(&o)
    );

    let o = run(&[
        "apply",
        "-m",
        s(&m),
        "-f",
        "ratpow:shift=1,exp=2",
        "-z",
        "0+1i",
        "--delta",
        "0.1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let o = run(&["moment", "-m", s(&m), "-p", "2"]);
    assert_eq!(stdout(&o).lines().next(), Some("inf"));
    let o = run(&["moment", "-m", s(&m), "-p", "2", "--delta", "0.1"]);
    let v: f64 = stdout(&o).lines().next().unwrap().parse().unwrap();
    assert!((v - 9.0).abs() < 1e-9);
}

#[test]
fn classify_reports_boundedness() {
    let dir = TempDir::new().unwrap();
    let leb = write(&dir, "leb.json", LEBESGUE_1_INF);
    let u = write(&dir, "u.json", UNIFORM_1_2);
    assert_eq!(
        stdout(&run(&["classify", "-m", s(&leb), "-p", "2"])).trim(),
        "Unbounded"
    );
    assert_eq!(
        stdout(&run(&["classify", "-m", s(&u), "-p", "2"])).trim(),
        "Bounded"
    );
    assert_eq!(
        run(&["classify", "-m", s(&u), "-p", "0.5"]).status.code(),
        Some(2)
    );
}

#[test]
fn norm_of_image_below_theoretical() {
    let dir = TempDir::new().unwrap();
    let u = write(&dir, "u.json", UNIFORM_1_2);
    let o = run(&["norm", "-f", "ratpow:shift=1,exp=2", "-p", "2", "-m", s(&u)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let get = |k: &str| -> f64 {
        out.lines()
            .find_map(|l| l.strip_prefix(k))
            .and_then(|v| v.trim_start_matches(" = ").parse().ok())
            .unwrap()
    };
    assert!((get("input_norm") - 0.5).abs() < 1e-8);
    assert_eq!(get("theoretical_norm"), 1.0);
    assert!(get("ratio") < 1.0 && get("ratio") > 0.9);
}

#[test]
fn usage_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "atom1.json", ATOM1);
    let cases: [&[&str]; 5] = [
        &[
            "apply",
            "-m",
            s(&m),
            "-f",
            "ratpow:shift=1,exp=2",
            "-z",
            "0+1i",
            "--bogus",
        ],
        &[
            "apply",
            "-m",
            "/nonexistent.json",
            "-f",
            "ratpow:shift=1,exp=2",
            "-z",
            "0+1i",
        ],
        &["apply", "-m", s(&m), "-f", "nonsense", "-z", "0+1i"],
        &[
            "apply",
            "-m",
            s(&m),
            "-f",
            "ratpow:shift=1,exp=2",
            "-z",
            "0-1i",
        ],
        &["frobnicate"],
    ];
    for args in cases {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
    let bad = write(&dir, "bad.json", r#"{"atoms":[{"t":-1,"w":1}]}"#);
    let o = run(&["classify", "-m", s(&bad), "-p", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_writes_reports_and_sets_exit_code() {
    let dir = TempDir::new().unwrap();
    let suite = write(
        &dir,
        "suite.json",
        r#"{"experiments":[{"kind":"atom_norm","cases":[[2,1,1]],"rel_err":1e-5},
                           {"kind":"sector","case":"I","p":6,"epsilon":0.05,"samples":500}]}"#,
    );
    let out = dir.path().join("ok");
    let o = run(&["verify", "-c", s(&suite), "-o", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let reports: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("reports.json")).unwrap()).unwrap();
    let arr = reports.as_array().unwrap();
    assert_eq!(arr.len(), 3);
    assert!(arr
        .iter()
        .all(|r| r["schema_version"] == 1 && r["passed"] == true));
    let csv = fs::read_to_string(out.join("reports.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);

    let failing = write(
        &dir,
        "fail.json",
        r#"{"experiments":[{"kind":"minkowski","samples":2,"ceiling":-0.5}]}"#,
    );
    let o = run(&[
        "verify",
        "-c",
        s(&failing),
        "-o",
        s(&dir.path().join("fail")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL minkowski"));

    let empty = write(&dir, "empty.json", r#"{"experiments":[]}"#);
    let eout = dir.path().join("empty");
    let o = run(&["verify", "-c", s(&empty), "-o", s(&eout)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        fs::read_to_string(eout.join("reports.json"))
            .unwrap()
            .trim(),
        "[]"
    );

    let unknown = write(
        &dir,
        "unknown.json",
        r#"{"experiments":[{"kind":"atom_norm","cases":[],"rel_err":1,"x":1}]}"#,
    );
    assert_eq!(
        run(&["verify", "-c", s(&unknown), "-o", s(&eout)])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn sweep_then_plotdata_round_trips_target() {
    let dir = TempDir::new().unwrap();
    let u = write(&dir, "u.json", UNIFORM_1_2);
    let o = run(&[
        "sweep",
        "-m",
        s(&u),
        "-p",
        "2",
        "--delta",
        "0.75",
        "-o",
        s(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let target_line = stdout(&o)
        .lines()
        .find(|l| l.starts_with("target = "))
        .unwrap()
        .to_string();

    let plots = dir.path().join("plots");
    let o = run(&[
        "report",
        "-r",
        s(&dir.path().join("sweep.json")),
        "-o",
        s(&plots),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let file = fs::read_dir(&plots)
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .path();
    let body = fs::read_to_string(file).unwrap();
    assert_eq!(body.lines().next().unwrap(), format!("# {target_line}"));
    let rows: Vec<(f64, f64)> = body
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let mut it = l.split_whitespace().map(|x| x.parse::<f64>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0].0, 0.2);

    assert_eq!(
        run(&["plotdata", "-r", s(&dir.path().join("missing.json"))])
            .status
            .code(),
        Some(2)
    );
}
