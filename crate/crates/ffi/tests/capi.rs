//! Exercises the C surface from Rust, plus a real C compilation of the
//! generated header against the static library.

use std::ffi::{c_char, CStr};
use std::ptr;

use k1inv_ffi::{
    k1inv_corpus, k1inv_problem_free, k1inv_problem_parse, k1inv_problem_run,
    k1inv_problem_verify, k1inv_string_free, k1inv_version, K1invFormat, K1invProblem,
    K1invStatus,
};

const QUADRATIC: &str = r#"{
    "group": {"order": 2, "permutation_generators": [[1, 0]]},
    "modules": {"norm_one_quadratic": {"rank": 1, "generator_actions": [[[-1]]]}},
    "tasks": [{"op": "pic_torus", "module": "norm_one_quadratic"}]
}"#;

unsafe fn take_string(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = CStr::from_ptr(p).to_str().expect("utf-8").to_string();
    k1inv_string_free(p);
    s
}

#[test]
fn parse_run_free_cycle() {
    unsafe {
        let mut handle: *mut K1invProblem = ptr::null_mut();
        let mut error: *mut c_char = ptr::null_mut();
        let status = k1inv_problem_parse(
            QUADRATIC.as_ptr(),
            QUADRATIC.len(),
            &mut handle,
            &mut error,
        );
        assert_eq!(status, K1invStatus::Ok);
        assert!(error.is_null());
        assert!(!handle.is_null());

        let mut report: *mut c_char = ptr::null_mut();
        let status = k1inv_problem_run(handle, K1invFormat::Text, false, &mut report);
        assert_eq!(status, K1invStatus::Ok);
        let text = take_string(report);
        assert!(text.contains("group: Z/2"), "{text}");

        let mut report: *mut c_char = ptr::null_mut();
        let status = k1inv_problem_run(handle, K1invFormat::Json, true, &mut report);
        assert_eq!(status, K1invStatus::Ok);
        let json: serde_json::Value = serde_json::from_str(&take_string(report)).unwrap();
        assert_eq!(json["all_checks_passed"], true);

        let mut report: *mut c_char = ptr::null_mut();
        let status = k1inv_problem_verify(handle, K1invFormat::Text, &mut report);
        assert_eq!(status, K1invStatus::Ok);
        let text = take_string(report);
        assert!(text.contains("check exact_at_kernel: PASS"));

        k1inv_problem_free(handle);
    }
}

#[test]
fn parse_error_reports_message() {
    unsafe {
        let bad = b"{ not json";
        let mut handle: *mut K1invProblem = ptr::null_mut();
        let mut error: *mut c_char = ptr::null_mut();
        let status = k1inv_problem_parse(bad.as_ptr(), bad.len(), &mut handle, &mut error);
        assert_eq!(status, K1invStatus::InputError);
        assert!(handle.is_null());
        let message = take_string(error);
        assert!(message.contains("parse error"), "{message}");
    }
}

#[test]
fn null_pointers_are_rejected() {
    unsafe {
        let mut report: *mut c_char = ptr::null_mut();
        assert_eq!(
            k1inv_problem_run(ptr::null(), K1invFormat::Text, false, &mut report),
            K1invStatus::NullPointer
        );
        assert_eq!(
            k1inv_problem_parse(ptr::null(), 0, ptr::null_mut(), ptr::null_mut()),
            K1invStatus::NullPointer
        );
        k1inv_problem_free(ptr::null_mut());
        k1inv_string_free(ptr::null_mut());
    }
}

#[test]
fn corpus_is_deterministic_across_calls() {
    unsafe {
        let mut first: *mut c_char = ptr::null_mut();
        let mut second: *mut c_char = ptr::null_mut();
        assert_eq!(k1inv_corpus(K1invFormat::Text, &mut first), K1invStatus::Ok);
        assert_eq!(k1inv_corpus(K1invFormat::Text, &mut second), K1invStatus::Ok);
        let a = take_string(first);
        let b = take_string(second);
        assert_eq!(a, b);
        assert!(a.contains("summary: 79 tasks, 79 ok, 0 failed"));
    }
}

#[test]
fn version_is_a_static_string() {
    unsafe {
        let v = CStr::from_ptr(k1inv_version()).to_str().unwrap();
        assert_eq!(v, env!("CARGO_PKG_VERSION"));
    }
}

/// Compile and run a small C program against the generated header and the
/// static library, proving the header is valid C and the symbols resolve.
#[test]
fn c_smoke_program_compiles_and_runs() {
    let manifest = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header_dir = manifest.join("include");
    let profile_dir = if cfg!(debug_assertions) { "debug" } else { "release" };
    let target_dir = std::env::var("CARGO_TARGET_DIR")
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|_| manifest.join("../../target"));
    // `cargo build` puts the archive in the profile directory, `cargo test`
    // leaves it under deps/
    let staticlib = [
        target_dir.join(profile_dir).join("libk1inv_ffi.a"),
        target_dir.join(profile_dir).join("deps").join("libk1inv_ffi.a"),
    ]
    .into_iter()
    .find(|p| p.exists())
    .expect("static library was built alongside the tests");

    let scratch = std::env::temp_dir().join(format!("k1inv_c_smoke_{}", std::process::id()));
    std::fs::create_dir_all(&scratch).unwrap();
    let c_source = scratch.join("smoke.c");
    std::fs::write(
        &c_source,
        r#"
#include <stdio.h>
#include <string.h>
#include "k1inv.h"

static const char *PROBLEM =
    "{\"group\": {\"order\": 2, \"permutation_generators\": [[1, 0]]},"
    " \"modules\": {\"t\": {\"rank\": 1, \"generator_actions\": [[[-1]]]}},"
    " \"tasks\": [{\"op\": \"pic_torus\", \"module\": \"t\"}]}";

int main(void) {
    K1invProblem *problem = NULL;
    char *error = NULL;
    char *report = NULL;
    if (k1inv_problem_parse((const uint8_t *)PROBLEM, strlen(PROBLEM), &problem, &error)
            != K1INV_STATUS_OK) {
        fprintf(stderr, "parse failed: %s\n", error ? error : "?");
        return 1;
    }
    if (k1inv_problem_run(problem, K1INV_FORMAT_TEXT, false, &report) != K1INV_STATUS_OK) {
        return 2;
    }
    if (strstr(report, "group: Z/2") == NULL) {
        return 3;
    }
    fputs(report, stdout);
    k1inv_string_free(report);
    k1inv_problem_free(problem);
    return 0;
}
"#,
    )
    .unwrap();

    let binary = scratch.join("smoke");
    let compile = std::process::Command::new("cc")
        .arg(&c_source)
        .arg("-I")
        .arg(&header_dir)
        .arg(&staticlib)
        .arg("-lpthread")
        .arg("-ldl")
        .arg("-lm")
        .arg("-o")
        .arg(&binary)
        .output()
        .expect("cc is available");
    assert!(
        compile.status.success(),
        "C compilation failed:\n{}",
        String::from_utf8_lossy(&compile.stderr)
    );
    let run = std::process::Command::new(&binary).output().unwrap();
    assert!(run.status.success(), "smoke binary exited nonzero");
    let stdout = String::from_utf8(run.stdout).unwrap();
    assert!(stdout.contains("group: Z/2"));
    std::fs::remove_dir_all(&scratch).ok();
}
