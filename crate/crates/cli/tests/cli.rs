use std::process::{Command, Output};

fn castor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_castor"))
        .args(args)
        .env_remove("CASTOR_KNOWN_BOUNDS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn simulate_reports_kind_steps_and_head() {
    let o = castor(&["simulate", "1RB1LB_1LA0LC_0LZ0LD_1RD0LB"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("halted-blank 34\n"));

    let o = castor(&["simulate", "1RB1RA_1LB1LC_1RD0RE_0LE0RA_0RZ0RF_0RB0RC"]);
    assert_eq!(stdout(&o).lines().next(), Some("halted-blank 438120"));

    let o = castor(&["simulate", "1RA1RA", "--max-steps", "50"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("cutoff 50\n"));
}

#[test]
fn simulate_trace_has_one_line_per_step() {
    let o = castor(&["simulate", "0RB---_1LA0LZ", "--trace"]);
    let text = stdout(&o);
    let steps = text.lines().filter(|l| l.split('\t').count() == 5).count();
    assert_eq!(steps, 4);
}

#[test]
fn decide_exit_codes() {
    let o = castor(&["decide", "--strict", "0RB0LA_1LA0RC_1RB0LZ"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "halts-blank 12");
    // the escape rule misjudges this halter unless strict
    let o = castor(&["decide", "0RB0LA_1LA0RC_1RB0LZ"]);
    assert_eq!(stdout(&o).trim(), "non-halting escape-heuristic");

    let o = castor(&["decide", "--format", "records", "1RA1RA"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1RA1RA\tnon-halting\thalt-unreachable\n");

    // an undefined entry is reached, so no verdict
    let o = castor(&["decide", "1RB---_1LA---"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn malformed_input_exits_with_two() {
    for args in [
        vec!["simulate", "1RB1LX"],
        vec!["decide", "1RB"],
        vec!["count", "--states", "0"],
        vec!["search", "--states", "0"],
        vec!["verify", "--certificate", "/nonexistent/cert.txt"],
    ] {
        let o = castor(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(
            String::from_utf8_lossy(&o.stderr).contains("error"),
            "{args:?}"
        );
    }
}

#[test]
fn count_matches_the_closed_form() {
    let o = castor(&["count", "--states", "5"]);
    assert_eq!(stdout(&o).trim(), "63403380965376");
}

#[test]
fn verify_prints_the_certificate_summary() {
    let o = castor(&["verify"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o).trim(),
        "certificate ok: 13 macro steps, total 438120, cross-check passed"
    );
}

#[test]
fn exported_certificate_round_trips_and_tampering_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let o = castor(&["verify", "--export"]);
    let text = stdout(&o);
    let cert: String = text
        .lines()
        .filter(|l| !l.starts_with("certificate ok"))
        .map(|l| format!("{l}\n"))
        .collect();
    let path = dir.path().join("cert.txt");
    std::fs::write(&path, &cert).unwrap();
    let o = castor(&["verify", "--certificate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));

    let tampered = cert.replacen(" 2676 ", " 2677 ", 1);
    assert_ne!(tampered, cert);
    std::fs::write(&path, tampered).unwrap();
    let o = castor(&["verify", "--certificate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn search_report_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for n in ["2", "3"] {
        let path = dir.path().join(format!("r{n}.json"));
        let o = castor(&[
            "search",
            "--states",
            n,
            "--strict",
            "--max-steps",
            "10000",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(String::from_utf8_lossy(&o.stderr).contains("wall time"));
        files.push(path.to_str().unwrap().to_owned());
    }
    let o = castor(&["--format", "json", "search", "--states", "2", "--strict"]);
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["champion"]["steps"], 4);
    assert_eq!(json["champion"]["proven"], true);

    let mut args = vec!["table"];
    args.extend(files.iter().map(String::as_str));
    let o = castor(&args);
    let text = stdout(&o);
    assert!(text.contains("4*"));
    assert!(text.contains("12*"));
}

#[test]
fn search_records_stream_one_line_per_machine() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("records.tsv");
    let o = castor(&[
        "--format",
        "records",
        "search",
        "--states",
        "2",
        "--strict",
        "--records",
        records.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let summary = stdout(&o);
    assert!(summary.starts_with("champion\t0RB---_1LA0LZ\t4\ttrue\n"));
    let lines = std::fs::read_to_string(&records).unwrap();
    let total: u64 = summary
        .lines()
        .filter_map(|l| l.strip_prefix("count\t"))
        .map(|l| l.rsplit('\t').next().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(lines.lines().count() as u64, total);
}

#[test]
fn sampled_search_is_inconclusive() {
    let o = castor(&["search", "--states", "4", "--node-budget", "20"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("sampled"));
}
