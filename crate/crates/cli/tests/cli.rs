//! The binary: exit codes, diagnostics and subcommand output.

use std::path::PathBuf;
use std::process::{Command, Output};

use zcycles::points::PointModel;
use zcycles::symbols::{resolve, ProxyTarget, SymbolExpr};

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(format!("{name}.toml"))
}

fn zcycles(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zcycles"))
        .args(args)
        .output()
        .unwrap()
}

fn with_config(name: &str, args: &[&str]) -> Output {
    let path = config(name);
    let mut all = vec!["--config", path.to_str().unwrap()];
    all.extend_from_slice(args);
    zcycles(&all)
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn temp_config(tag: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("zcycles-cli-{}-{tag}.toml", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn trivial_group_passes_everything() {
    let out = with_config("trivial", &["verify"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["schema"], "zcycles.report/v1");
    assert_eq!(report["summary"]["fail"], 0);
    assert_eq!(report["summary"]["skip"], 0);
    assert_eq!(report["model"]["size"], 1);
}

#[test]
fn malformed_config_exits_2_with_position() {
    let path = temp_config(
        "bad",
        "name = \"x\"\nn = 3\n[model]\nkind = \"mock\"\nfactors = [3, 3\nfrob = []\n",
    );
    let out = zcycles(&["--config", path.to_str().unwrap(), "verify"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains(&format!("{}:6:", path.display())), "{err}");
    let path = temp_config("kind", "name = \"x\"\nn = 3\n[model]\nkind = \"torus\"\n");
    assert_eq!(
        zcycles(&["--config", path.to_str().unwrap(), "verify"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn invalid_parameters_exit_2() {
    assert_eq!(
        with_config("swap", &["--rmax", "7", "verify"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        with_config("swap", &["verify", "--suite", "nonsense"])
            .status
            .code(),
        Some(2)
    );
    let singular = temp_config(
        "singular",
        "name = \"s\"\nn = 2\n[model]\nkind = \"elliptic\"\np = 5\na = 0\nb = 0\nN = 1\n",
    );
    assert_eq!(
        zcycles(&["--config", singular.to_str().unwrap(), "verify"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn cap_exceeded_exits_3() {
    assert_eq!(
        with_config("swap", &["--cap", "4", "verify"]).status.code(),
        Some(3)
    );
    assert_eq!(
        with_config("default", &["--cap", "1000", "filtration"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn failing_check_exits_1_and_names_its_citation() {
    let out = with_config("z9-squared", &["verify", "--suite", "galois"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("galois.cycle_class.r2") && err.contains("kills F^{r+1}"),
        "{err}"
    );
}

#[test]
fn suite_filter_runs_only_that_suite() {
    let out = with_config("swap", &["verify", "--suite", "roundtrip"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    let ids: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["id"].as_str().unwrap())
        .collect();
    assert_eq!(ids, ["roundtrip.r1", "roundtrip.r2", "roundtrip.r3"]);
    assert_eq!(
        report["scenario"]["suites"],
        serde_json::json!(["roundtrip"])
    );
}

#[test]
fn seed_is_echoed_and_timings_are_opt_in() {
    let out = with_config("swap", &["--seed", "7", "verify", "--suite", "roundtrip"]);
    let report = json(&out);
    assert_eq!(report["scenario"]["seed"], 7);
    assert!(report["checks"][0].get("wall_ms").is_none());
    let timed = json(&with_config(
        "swap",
        &["--timings", "verify", "--suite", "roundtrip"],
    ));
    assert!(timed["checks"][0]["wall_ms"].is_u64());
}

#[test]
fn text_format_has_one_line_per_check() {
    let out = with_config(
        "swap",
        &["--format", "text", "verify", "--suite", "albanese"],
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.lines()
            .any(|l| l.starts_with("PASS albanese.symbol_image")),
        "{text}"
    );
    assert!(text.contains("1 checks: 1 passed"));
}

#[test]
fn filtration_without_extensions_has_r_equal_to_g() {
    let path = temp_config("flat", "name = \"flat\"\nn = 2\n[model]\nkind = \"mock\"\nfactors = [2, 4]\nfrob = [[1, 0], [0, 1]]\nN = 1\n");
    let out = zcycles(&["--config", path.to_str().unwrap(), "filtration"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for row in &rows[2..] {
        assert_eq!(row["R_equals_G"], true, "{row}");
        assert_eq!(row["R"], row["G"]);
    }
}

#[test]
fn symbols_eval_matches_the_library() {
    let out = with_config("swap", &["symbols", "eval", "{P1,P2}_2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let model = PointModel::build_mock(&[3, 3], vec![vec![0, 1], vec![1, 0]], 2, 1 << 20).unwrap();
    let s = SymbolExpr::parse(&model, "{P1,P2}_2").unwrap();
    let want: Vec<String> = resolve(&model, &ProxyTarget::new(&model, 2), &s)
        .iter()
        .map(|c| c.to_string())
        .collect();
    assert_eq!(v["coords"], serde_json::json!(want));
    assert_eq!(v["arity"], 2);
    assert_eq!(
        with_config("swap", &["symbols", "eval", "{P1,"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn cohomology_reports_tables_and_symbol_classes() {
    let out = with_config("z9-squared", &["cohomology", "--symbol", "{P30,P30}_1"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert_eq!(v["modules"]["A[3]"].as_array().unwrap().len(), 3);
    assert_eq!(v["symbol"]["H^r"], "Z/3");
    assert!(v["delta"]
        .as_array()
        .unwrap()
        .iter()
        .all(|d| d["kernel_is_nA"] == true));
    // no 3-division point for P1 in the swap model
    let out = with_config("swap", &["cohomology", "--symbol", "{P1}_2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("division point"));
}

#[test]
fn default_scenario_matches_the_regression_fixture() {
    let out = zcycles(&["verify"]);
    assert_eq!(out.status.code(), Some(0));
    let fixture = std::fs::read(
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/default_report.json"),
    )
    .unwrap();
    assert!(
        out.stdout == fixture,
        "report differs from tests/fixtures/default_report.json"
    );
}

#[test]
fn output_flag_writes_the_report() {
    let path = std::env::temp_dir().join(format!("zcycles-cli-{}-out.json", std::process::id()));
    let out = with_config("trivial", &["--output", path.to_str().unwrap(), "verify"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with('{') && text.ends_with("}\n"));
}
