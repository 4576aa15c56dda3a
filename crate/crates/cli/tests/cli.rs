use std::process::{Command, Output};

fn refcommit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_refcommit"))
        .args(args)
        .env_remove("REFCOMMIT_ENUM_BUDGET")
        .output()
        .expect("run refcommit")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value(report: &str, section: &str, key: &str) -> Option<String> {
    refcommit::security::parse_report(report)
        .unwrap()
        .into_iter()
        .find(|(s, k, _)| s == section && k == key)
        .map(|(_, _, v)| v)
}

#[test]
fn analyze_lattice_reports_one_over_d() {
    let o = refcommit(&["analyze", "--protocol", "lattice", "--d", "3", "--L", "8", "--predicate", "lenient"]);
    assert_eq!(o.status.code(), Some(0));
    let r = stdout(&o);
    assert_eq!(value(&r, "binding", "flip_lenient").as_deref(), Some("1/3"));
    assert_eq!(value(&r, "binding", "flip_strict").as_deref(), Some("1/6"));
    assert_eq!(value(&r, "soundness", "probability").as_deref(), Some("1"));
    assert_eq!(value(&r, "config", "seed").as_deref(), Some("42"));
    assert_eq!(value(&r, "concealing", "bound_holds").as_deref(), Some("true"));
}

#[test]
fn analyze_simple_schemes() {
    let r = stdout(&refcommit(&["analyze", "--protocol", "four-symbol"]));
    assert_eq!(value(&r, "four_symbol", "concealing_distance").as_deref(), Some("0"));
    assert_eq!(value(&r, "four_symbol", "binding_flip").as_deref(), Some("1/2"));
    let r = stdout(&refcommit(&["analyze", "--protocol", "continuous", "--alpha", "0.5"]));
    assert_eq!(value(&r, "interpolation", "p_accept_0").as_deref(), Some("0.750000000000000"));
    assert_eq!(value(&r, "interpolation", "p_accept_1").as_deref(), Some("0.750000000000000"));
}

#[test]
fn simulate_honest_lattice_is_sound() {
    let r = stdout(&refcommit(&["simulate", "--protocol", "lattice", "--trials", "3000"]));
    assert_eq!(value(&r, "soundness_mc", "successes").as_deref(), Some("3000"));
    assert_eq!(value(&r, "binding_mc", "within_3sigma").as_deref(), Some("true"));
}

#[test]
fn output_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("refcommit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.txt");
    let o = refcommit(&["mingap", "--d", "3", "--L", "8", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(value(&text, "mingap", "pass").as_deref(), Some("true"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn mingap_thresholds() {
    let r = stdout(&refcommit(&["mingap", "--d", "1", "--L", "2"]));
    let gap: f64 = value(&r, "mingap", "min_gap").unwrap().parse().unwrap();
    assert!((gap - std::f64::consts::PI / 6.0).abs() < 1e-15);

    let base = stdout(&refcommit(&["mingap", "--d", "3", "--L", "8"]));
    let safe: f64 = value(&base, "mingap", "safe_eps").unwrap().parse().unwrap();
    let half = format!("{:e}", safe / 2.0);
    let twice = format!("{:e}", safe * 2.0);
    assert_eq!(refcommit(&["mingap", "--d", "3", "--L", "8", "--eps", &half]).status.code(), Some(0));
    let o = refcommit(&["mingap", "--d", "3", "--L", "8", "--eps", &twice]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(value(&stdout(&o), "mingap", "pass").as_deref(), Some("false"));
}

#[test]
fn exit_codes() {
    assert_eq!(refcommit(&["analyze", "--d", "0"]).status.code(), Some(1));
    assert_eq!(refcommit(&["analyze", "--nonsense"]).status.code(), Some(1));
    assert_eq!(refcommit(&["analyze", "--eps", "0.5"]).status.code(), Some(1));
    assert_eq!(refcommit(&["analyze", "--budget", "10"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_refcommit"))
        .args(["analyze", "--d", "3", "--L", "8"])
        .env("REFCOMMIT_ENUM_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
    assert_eq!(refcommit(&["--help"]).status.code(), Some(0));
}

#[test]
fn twirl_check_groups() {
    let o = refcommit(&["twirl-check", "--group", "z8"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(value(&stdout(&o), "verdict", "pass").as_deref(), Some("true"));
    for bad in ["mixture", "segment"] {
        let o = refcommit(&["twirl-check", "--group", bad]);
        assert_eq!(o.status.code(), Some(1));
        assert!(String::from_utf8_lossy(&o.stderr).contains("not a uniform group distribution"));
    }
    assert_eq!(refcommit(&["twirl-check", "--group", "q7"]).status.code(), Some(1));
}

#[test]
fn sweep_tables() {
    let o = refcommit(&["sweep", "--d", "1,2", "--L", "4,8"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    assert_eq!(&rows[3][col("flip_lenient")], "1/2");
    assert_eq!(&rows[3][col("concealing")], "1/4");

    let text = stdout(&refcommit(&["sweep", "--protocol", "continuous", "--alpha", "0,0.5,1"]));
    assert!(text.contains("\n0.500000000000000,0.750000000000000,0.750000000000000,"));
}
