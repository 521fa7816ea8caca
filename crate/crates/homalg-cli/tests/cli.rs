//! End-to-end tests of the batch front end: fixtures in, deterministic
//! output out, documented exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_homalg"))
}

fn write_fixture(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("homalg-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Two columns Z at internal degree 0 joined by multiplication by 2.
const TWO_COLUMN: &str = r#"{
  "columns": {
    "0": {"support": [0, 0], "ranks": {"0": 1}, "differentials": {}},
    "1": {"support": [0, 0], "ranks": {"0": 1}, "differentials": {}}
  },
  "horizontal": {
    "0": {"components": {"0": [["2"]]}}
  }
}"#;

#[test]
fn ss_pages_two_column_fixture() {
    let path = write_fixture("two_column.json", TWO_COLUMN);
    let out = bin()
        .args(["ss", "pages", "--input"])
        .arg(&path)
        .args(["--r-max", "2", "--format", "json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let pages = v.as_array().unwrap();
    assert_eq!(pages.len(), 2);
    // E_1 has Z at (0,0) and (1,0) with d_1 = 2
    assert_eq!(pages[0]["entries"]["0,0"]["rank"], 1);
    assert_eq!(pages[0]["entries"]["1,0"]["rank"], 1);
    assert_eq!(pages[0]["differentials"]["0,0"][0][0], "2");
    // E_2 is Z/2 at (1,0) only
    assert_eq!(pages[1]["entries"]["1,0"]["torsion"][0], "2");
    assert!(pages[1]["entries"]["0,0"].is_null());
}

/// Golden-file pin of the page dump: deterministic ordering and exact bytes.
#[test]
fn ss_pages_golden_bytes() {
    let path = write_fixture("two_column_golden.json", TWO_COLUMN);
    let out = bin()
        .args(["ss", "pages", "--input"])
        .arg(&path)
        .args(["--r-max", "2", "--format", "json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let expected = r#"[
  {
    "r": 1,
    "entries": {
      "0,0": {
        "rank": 1,
        "torsion": []
      },
      "1,0": {
        "rank": 1,
        "torsion": []
      }
    },
    "differentials": {
      "0,0": [
        [
          "2"
        ]
      ]
    }
  },
  {
    "r": 2,
    "entries": {
      "1,0": {
        "rank": 0,
        "torsion": [
          "2"
        ]
      }
    },
    "differentials": {}
  }
]
"#;
    assert_eq!(stdout_of(&out), expected);
}

#[test]
fn ss_converge_two_column_fixture() {
    let path = write_fixture("two_column_conv.json", TWO_COLUMN);
    let out = bin()
        .args(["ss", "converge", "--input"])
        .arg(&path)
        .args(["--format", "json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["all_match"], true);
    assert_eq!(v["e_infinity"]["entries"]["1,0"]["torsion"][0], "2");
}

#[test]
fn ss_decalage_output_reingests() {
    let path = write_fixture("two_column_dec.json", TWO_COLUMN);
    let out = bin()
        .args(["ss", "decalage", "--input"])
        .arg(&path)
        .args(["--format", "json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let dec_path = write_fixture("decalee.json", &stdout_of(&out));
    // feed the décalée filtration back in: its first page must already be
    // the stable answer
    let out2 = bin()
        .args(["ss", "pages", "--input"])
        .arg(&dec_path)
        .args(["--r-max", "1", "--format", "json"])
        .output()
        .unwrap();
    assert!(out2.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out2)).unwrap();
    assert_eq!(v[0]["entries"]["0,1"]["torsion"][0], "2");
}

#[test]
fn tot_degenerate_row() {
    // row 0 -> Z --2--> Z -> 0 as a double complex of groups in degree 0
    let path = write_fixture("row.json", TWO_COLUMN);
    let out = bin()
        .args(["tot", "--input"])
        .arg(&path)
        .args(["--format", "json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["total_homology"]["1"]["torsion"][0], "2");
}

#[test]
fn day_unit_law_through_files() {
    let f = write_fixture(
        "one_jump.json",
        r#"{
          "ambient": {"support": [0, 1], "ranks": {"0": 1, "1": 1},
                      "differentials": {"0": [["2"]]}},
          "levels": {"0": {"0": [["1"]], "1": [["1"]]}}
        }"#,
    );
    let unit = write_fixture(
        "unit.json",
        r#"{
          "ambient": {"support": [0, 0], "ranks": {"0": 1}, "differentials": {}},
          "levels": {"0": {"0": [["1"]]}}
        }"#,
    );
    let out = bin()
        .args(["day", "--input"])
        .arg(&f)
        .arg("--input")
        .arg(&unit)
        .args(["--format", "json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    // the convolution with the unit re-serializes to the original document
    let original = bin()
        .args(["day", "--input"])
        .arg(&unit)
        .arg("--input")
        .arg(&f)
        .args(["--format", "json"])
        .output()
        .unwrap();
    assert_eq!(stdout_of(&out), stdout_of(&original));
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["ambient"]["ranks"]["0"], 1);
    assert_eq!(v["ambient"]["differentials"]["0"][0][0], "2");
}

#[test]
fn verify_is_deterministic_and_filters() {
    let run = || {
        bin()
            .args(["verify", "--only", "massey", "--seed", "7"])
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    assert!(a.status.success());
    assert_eq!(stdout_of(&a), stdout_of(&b), "transcripts must be identical");
    assert!(stdout_of(&a).contains("massey-powers"));
}

#[test]
fn verify_rejects_unknown_filter() {
    let out = bin()
        .args(["verify", "--only", "no-such-criterion"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn schema_violation_exits_two_with_location() {
    let path = write_fixture("bad.json", r#"{"columns": {"0": {"support": [0, 0]}}}"#);
    let out = bin()
        .args(["ss", "pages", "--input"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("error"), "{err}");
}

#[test]
fn invariant_violation_exits_two_named() {
    // differentials that do not square to zero
    let path = write_fixture(
        "not_complex.json",
        r#"{
          "ambient": {"support": [0, 2], "ranks": {"0": 1, "1": 1, "2": 1},
                      "differentials": {"0": [["1"]], "1": [["1"]]}},
          "levels": {"0": {"0": [["1"]], "1": [["1"]], "2": [["1"]]}}
        }"#,
    );
    let out = bin()
        .args(["ss", "pages", "--input"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("not a complex"), "{err}");
}

#[test]
fn koszul_massey_json_verdicts() {
    let out = bin()
        .args(["koszul", "massey", "--n", "4", "--format", "json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["is_cycle"], true);
    assert_eq!(v["generates"], true);
    assert_eq!(v["vanishes_after_attachment"], true);
    // r_4 = e1 e3 - e2^2 + e3 e1 in canonical term order
    let words: Vec<String> = v["power"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| {
            format!(
                "{}{}",
                t["coeff"].as_str().unwrap(),
                t["word"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|w| w.as_str().unwrap())
                    .collect::<Vec<_>>()
                    .join("")
            )
        })
        .collect();
    assert_eq!(words, vec!["1e1e3", "-1e2e2", "1e3e1"]);
}

#[test]
fn barcobar_cobar_matches_tower() {
    let out = bin()
        .args(["barcobar", "cobar", "--n", "5", "--format", "json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["matches_tower_presentation"], true);
    assert_eq!(v["generators"].as_array().unwrap().len(), 5);
}

#[test]
fn barcobar_roundtrip_lambda2() {
    let out = bin()
        .args([
            "barcobar",
            "roundtrip",
            "--alg",
            "lambda2",
            "--max-weight",
            "4",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["mismatches"].as_array().unwrap().len(), 0);
}
