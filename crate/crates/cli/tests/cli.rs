use std::path::PathBuf;

use serde_json::Value;
use sheetlens_cli::{run, EXIT_CYCLE, EXIT_FINDINGS, EXIT_OK, EXIT_USAGE};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).display().to_string()
}

fn sheetlens(args: &[&str]) -> (u8, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("sheetlens").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn classify_profit() {
    let (code, out, err) = sheetlens(&["classify", &fixture("profit.grid")]);
    assert_eq!(code, EXIT_OK, "{err}");
    let report = json(&out);
    let fills: Vec<(String, String)> = report["fills"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| (f["ref"].as_str().unwrap().into(), f["class"].as_str().unwrap().into()))
        .collect();
    let want = [("B1", "input"), ("B2", "input"), ("B3", "processing"), ("B4", "input"), ("B5", "output")];
    assert_eq!(fills, want.map(|(a, b)| (a.to_string(), b.to_string())));
    assert!(err.is_empty());
}

#[test]
fn lint_findings_exit_one() {
    let (code, out, err) = sheetlens(&["lint", &fixture("profit_broken.grid")]);
    assert_eq!(code, EXIT_FINDINGS);
    let report = json(&out);
    let cells: Vec<&str> =
        report["diagnostics"].as_array().unwrap().iter().map(|d| d["cells"][0].as_str().unwrap()).collect();
    assert_eq!(cells, ["B1", "B2"]);
    assert!(err.contains("2 findings"));

    let (code, _, _) = sheetlens(&["lint", &fixture("profit.grid")]);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn cycle_exits_three() {
    let (code, out, err) = sheetlens(&["levels", &fixture("cyclic.grid")]);
    assert_eq!(code, EXIT_CYCLE);
    assert_eq!(json(&out)["diagnostics"][0]["code"], "CYCLE");
    assert!(err.contains("A1, B1"), "{err}");
}

#[test]
fn usage_errors_name_the_argument() {
    let cases: [(&[&str], &str); 6] = [
        (&["precedents", "P"], "--block"),
        (&["classify", "P", "--region", "B0"], "--region"),
        (&["classify", "P", "--depth", "zero"], "depth"),
        (&["lint", "P", "--checks", "irregular"], "--block"),
        (&["lint", "P", "--checks", "spelling"], "spelling"),
        (&["svg", "P", "--tool", "sparkle"], "sparkle"),
    ];
    let profit = fixture("profit.grid");
    for (args, needle) in cases {
        let args: Vec<&str> = args.iter().map(|a| if *a == "P" { profit.as_str() } else { a }).collect();
        let (code, out, err) = sheetlens(&args);
        assert_eq!(code, EXIT_USAGE, "{args:?}");
        assert!(out.is_empty());
        assert!(err.contains(needle), "{args:?}: {err}");
        assert_eq!(err.lines().count(), 1, "{err}");
    }
    let (code, _, _) = sheetlens(&["frobnicate"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, out, _) = sheetlens(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("classify"));
}

#[test]
fn input_errors_name_the_file_and_cell() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.grid");
    std::fs::write(&bad, "1,=A1+*2\n").unwrap();
    let (code, _, err) = sheetlens(&["classify", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("bad.grid") && err.contains("B1"), "{err}");

    let (code, _, err) = sheetlens(&["classify", dir.path().join("missing.grid").to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("missing.grid"));

    let (code, _, err) = sheetlens(&["classify", "sheet.xlsx"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains(".grid or .json"));
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["classify", "F"],
        vec!["blockprec", "F", "--block", "B20:G20", "--depth", "2"],
        vec!["components", "F", "--region", "B5:G17"],
        vec!["levels", "F", "--format", "text"],
        vec!["svg", "F", "--tool", "level_labels"],
    ] {
        let file = fixture("fixed_assets.grid");
        let args: Vec<&str> = args.iter().map(|a| if *a == "F" { file.as_str() } else { a }).collect();
        assert_eq!(sheetlens(&args), sheetlens(&args));
    }
}

#[test]
fn output_file_takes_the_document() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let (code, out, _) = sheetlens(&["classify", &fixture("profit.grid"), "-o", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    let (_, direct, _) = sheetlens(&["classify", &fixture("profit.grid")]);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), direct);
}

#[test]
fn svg_output() {
    let (code, out, _) = sheetlens(&["svg", &fixture("profit.grid")]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("<svg"));
    assert_eq!(out.matches("class=\"cell\"").count(), 10);

    let (_, out, _) = sheetlens(&["precedents", &fixture("profit.grid"), "--block", "B5", "--format", "svg"]);
    assert_eq!(out.matches("class=\"arrow\"").count(), 4);
}

#[test]
fn text_output_lists_entries() {
    let (_, out, _) = sheetlens(&["inblock", &fixture("profit_broken.grid"), "--region", "B1:B5", "--format", "text"]);
    let arrows: Vec<&str> = out.lines().filter(|l| l.starts_with("arrow")).collect();
    assert_eq!(arrows, ["arrow B3 -> B5", "arrow B4 -> B5"]);
}

#[test]
fn json_workbooks_load() {
    let (code, out, _) = sheetlens(&["lint", &fixture("deposit.json"), "--block", "C2:C5"]);
    assert_eq!(code, EXIT_FINDINGS);
    let report = json(&out);
    let codes: Vec<&str> = report["diagnostics"].as_array().unwrap().iter().map(|d| d["code"].as_str().unwrap()).collect();
    assert!(codes.contains(&"IRREGULAR_PATTERN") && codes.contains(&"VALUE_MISMATCH"), "{codes:?}");
}

#[test]
fn serve_rejects_a_missing_directory() {
    let (code, _, err) = sheetlens(&["serve", "/definitely/not/here"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("not a directory"));
}
