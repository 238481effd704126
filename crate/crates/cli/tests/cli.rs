//! End-to-end tests driving the `mdlts` binary against the shipped
//! fixtures: exit codes, report payloads, and determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("../../fixtures");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdlts"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn validate_passes_on_the_two_dim_fixture() {
    let out = run(&["validate", &fixture("two_dim.json")]);
    assert_eq!(exit_code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["command"], "validate");
}

#[test]
fn validate_passes_on_remaining_valid_fixtures() {
    for name in ["two_dim_k101.json", "four_dim.json", "abelian3.json", "lie_induced.json"] {
        let out = run(&["validate", &fixture(name)]);
        assert_eq!(exit_code(&out), 0, "{name}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn validate_rejects_the_alternate_four_dim_parameters() {
    // k1 = k2 = 1 breaks the modified Leibniz rule on (u1, u2, u3).
    let out = run(&["validate", &fixture("four_dim_alt.json")]);
    assert_eq!(exit_code(&out), 1);
    let v = json_of(&out);
    assert_eq!(v["status"], "fail");
    let checks = v["payload"]["checks"].as_array().unwrap();
    let mdo_check = &checks[1];
    assert_eq!(mdo_check["pass"], false);
    assert_eq!(mdo_check["violations"][0]["tuple"], serde_json::json!([0, 1, 2]));
}

#[test]
fn validate_reports_skew_violation_with_witness() {
    let out = run(&["validate", &fixture("broken_skew.json")]);
    assert_eq!(exit_code(&out), 1);
    let v = json_of(&out);
    let violation = &v["payload"]["checks"][0]["violations"][0];
    assert_eq!(violation["identity"], "skew symmetry");
    assert!(violation["tuple"].is_array());
}

#[test]
fn parse_errors_exit_with_code_two() {
    let out = run(&["validate", "/nonexistent/file.json"]);
    assert_eq!(exit_code(&out), 2);

    let dir = std::env::temp_dir();
    let bad_json = dir.join("mdlts_bad.json");
    std::fs::write(&bad_json, "{ not json").unwrap();
    let out = run(&["validate", bad_json.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);

    let bad_rational = dir.join("mdlts_bad_rational.json");
    std::fs::write(
        &bad_rational,
        r#"{"dim": 1, "lambda": "1/0", "d": [["0"]]}"#,
    )
    .unwrap();
    let out = run(&["validate", bad_rational.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);

    let unknown_key = dir.join("mdlts_unknown_key.json");
    std::fs::write(
        &unknown_key,
        r#"{"dim": 1, "lambda": "0", "d": [["0"]], "extra": true}"#,
    )
    .unwrap();
    let out = run(&["validate", unknown_key.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn cohomology_dimensions_at_both_levels() {
    let out = run(&["cohomology", &fixture("two_dim_k101.json"), "--level", "3"]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let v = json_of(&out);
    assert_eq!(v["payload"]["dimZ"], 5);
    assert_eq!(v["payload"]["dimB"], 2);
    assert_eq!(v["payload"]["dimH"], 3);
    assert_eq!(v["payload"]["space"], "minimal");
    assert_eq!(v["payload"]["class_well_defined_spot_check"]["passed"], true);

    let out = run(&["cohomology", &fixture("two_dim_k101.json"), "--level", "1"]);
    let v = json_of(&out);
    assert_eq!(v["payload"]["dimH"], 2);
    assert_eq!(v["payload"]["dimB"], 0);
}

#[test]
fn cohomology_is_deterministic_and_honors_strict_space() {
    let a = run(&["cohomology", &fixture("two_dim.json"), "--level", "3", "--seed", "9"]);
    let b = run(&["cohomology", &fixture("two_dim.json"), "--level", "3", "--seed", "9"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(exit_code(&a), 0);

    let strict = run(&[
        "cohomology",
        &fixture("two_dim.json"),
        "--level",
        "3",
        "--strict-space",
    ]);
    assert_eq!(exit_code(&strict), 0, "minimal space closes on this fixture");
}

#[test]
fn cohomology_level_five_and_resource_limit() {
    let out = run(&["cohomology", &fixture("two_dim.json"), "--level", "5"]);
    assert_eq!(exit_code(&out), 0);

    // Level 7 needs degree-9 bases, beyond the default max degree.
    let out = run(&["cohomology", &fixture("two_dim.json"), "--level", "7"]);
    assert_eq!(exit_code(&out), 3);
}

#[test]
fn semidirect_and_dual_commands() {
    let out = run(&["semidirect", &fixture("two_dim.json")]);
    assert_eq!(exit_code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["payload"]["product"]["dim"], 4);
    assert_eq!(v["payload"]["representation"], "adjoint (default)");

    let out = run(&["dual", &fixture("two_dim.json")]);
    assert_eq!(exit_code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["payload"]["pass"], true);
}

#[test]
fn deform_verify_and_rigidity() {
    let out = run(&[
        "deform",
        "verify",
        &fixture("two_dim.json"),
        &fixture("deformations/constant_order2.json"),
    ]);
    assert_eq!(exit_code(&out), 0);

    let out = run(&[
        "deform",
        "verify",
        &fixture("two_dim.json"),
        &fixture("deformations/derivation_order1.json"),
    ]);
    assert_eq!(exit_code(&out), 0);

    let out = run(&[
        "deform",
        "verify",
        &fixture("two_dim.json"),
        &fixture("deformations/broken_skew_order1.json"),
    ]);
    assert_eq!(exit_code(&out), 1);
    let v = json_of(&out);
    assert_eq!(v["payload"]["orders"][1]["pass"], false);
    assert_eq!(
        v["payload"]["orders"][1]["violations"][0]["identity"],
        "skew symmetry"
    );

    let out = run(&["deform", "rigidity", &fixture("two_dim_k101.json")]);
    assert_eq!(exit_code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["payload"]["dimH3"], 3);
    assert_eq!(v["payload"]["rigid_certified"], false);
    assert!(v["payload"]["candidate_cocycle"].is_object());
}

#[test]
fn extension_build_and_equivalence_pipeline() {
    let dir = std::env::temp_dir();

    let out = run(&["extend", "build", &fixture("two_dim.json"), &fixture("cocycles/zero.json")]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let ext_zero = json_of(&out)["payload"]["extension"].clone();
    let zero_path = dir.join("mdlts_ext_zero.json");
    std::fs::write(&zero_path, serde_json::to_string_pretty(&ext_zero).unwrap()).unwrap();

    let out = run(&[
        "extend",
        "build",
        &fixture("two_dim.json"),
        &fixture("cocycles/coboundary.json"),
    ]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let ext_cob = json_of(&out)["payload"]["extension"].clone();
    let cob_path = dir.join("mdlts_ext_coboundary.json");
    std::fs::write(&cob_path, serde_json::to_string_pretty(&ext_cob).unwrap()).unwrap();

    // The two totals differ, but the cocycles are cohomologous, so the
    // extensions are equivalent with an explicit witness.
    let out = run(&[
        "extend",
        "equiv",
        &fixture("two_dim.json"),
        zero_path.to_str().unwrap(),
        cob_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let v = json_of(&out);
    assert_eq!(v["payload"]["equivalent"], true);
    assert!(v["payload"]["witness"].is_array());
}

#[test]
fn inequivalent_extensions_exit_with_failure() {
    // Over the abelian base with adjoint (zero) coefficients nothing is a
    // coboundary, so a nonzero cocycle is never cohomologous to zero.
    let dir = std::env::temp_dir();
    let out = run(&[
        "extend",
        "build",
        &fixture("abelian3.json"),
        &fixture("cocycles/abelian_zero.json"),
    ]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let e_zero = json_of(&out)["payload"]["extension"].clone();
    let zero_path = dir.join("mdlts_abelian_ext_zero.json");
    std::fs::write(&zero_path, serde_json::to_string_pretty(&e_zero).unwrap()).unwrap();

    let out = run(&[
        "extend",
        "build",
        &fixture("abelian3.json"),
        &fixture("cocycles/abelian_nonzero.json"),
    ]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let e_nonzero = json_of(&out)["payload"]["extension"].clone();
    let nonzero_path = dir.join("mdlts_abelian_ext_nonzero.json");
    std::fs::write(&nonzero_path, serde_json::to_string_pretty(&e_nonzero).unwrap()).unwrap();

    let out = run(&[
        "extend",
        "equiv",
        &fixture("abelian3.json"),
        zero_path.to_str().unwrap(),
        nonzero_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 1, "{}", String::from_utf8_lossy(&out.stdout));
    let v = json_of(&out);
    assert_eq!(v["status"], "fail");
    assert_eq!(v["payload"]["equivalent"], false);
    assert!(v["payload"]["witness"].is_null());
}

#[test]
fn extension_build_rejects_non_cocycles() {
    let dir = std::env::temp_dir();
    let bad = dir.join("mdlts_bad_cocycle.json");
    std::fs::write(&bad, r#"{"varpi": [["0", "0"], ["1", "0"]]}"#).unwrap();
    let out = run(&["extend", "build", &fixture("two_dim.json"), bad.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 1);
    let v = json_of(&out);
    assert_eq!(v["status"], "fail");
    assert!(v["payload"]["residual"].is_string());
}

#[test]
fn text_mode_renders_aligned_output() {
    let out = run(&["validate", &fixture("two_dim.json"), "--text"]);
    assert_eq!(exit_code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("command: validate"));
    assert!(text.contains("status:  pass"));
    // Text mode must not be JSON.
    assert!(serde_json::from_str::<serde_json::Value>(&text).is_err());
}
