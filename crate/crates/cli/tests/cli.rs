//! End-to-end checks of the command line driver: golden classification lines,
//! byte-identical reruns, the exact scale-map outputs, and exit codes.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn cbtree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cbtree"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = cbtree(args);
    assert!(out.status.success(), "command {args:?} failed: {out:?}");
    String::from_utf8(out.stdout).expect("utf-8 output")
}

#[test]
fn classify_matches_the_golden_file() {
    let golden = fs::read_to_string(corpus_dir().join("golden_classify.txt")).unwrap();
    let mut checked = 0;
    for line in golden.lines() {
        let (file, expected) = line.split_once(' ').expect("golden line format");
        let path = corpus_dir().join(file);
        let got = stdout_of(&["classify", path.to_str().unwrap()]);
        assert_eq!(got.trim_end(), expected, "{file}");
        checked += 1;
    }
    assert!(checked >= 30, "golden file must cover the whole corpus");
}

#[test]
fn output_is_byte_identical_across_runs() {
    let escale = corpus_dir().join("escale.set");
    let escale = escale.to_str().unwrap();
    for args in [
        vec!["classify", escale],
        vec!["classify", escale, "--oracle"],
        vec!["kernel", escale, "--emit", "dot"],
        vec!["kernel", escale, "--emit", "text"],
        vec!["truncate", escale, "--depth", "6"],
        vec!["scale", "--name", "E", "--count", "12"],
        vec!["back-and-forth", "--a", "D", "--b", "E", "--n", "20"],
        vec!["closure", "--order", "E", "--depth", "10"],
    ] {
        let first = cbtree(&args);
        let second = cbtree(&args);
        assert!(first.status.success(), "{args:?}");
        assert_eq!(first.stdout, second.stdout, "{args:?} output drifted");
    }
}

#[test]
fn the_half_point_maps_exactly() {
    assert_eq!(
        stdout_of(&[
            "map-point",
            "--scale",
            "E",
            "--point",
            "1/2^1",
            "--rule",
            "right"
        ]),
        "value=1/2^2\n"
    );
    assert_eq!(
        stdout_of(&[
            "map-point",
            "--scale",
            "E",
            "--point",
            "1/2^1",
            "--rule",
            "left"
        ]),
        "pre=00 per=01 value=1/12\n"
    );
    assert_eq!(
        stdout_of(&[
            "map-point",
            "--scale",
            "D",
            "--point",
            "5/2^3",
            "--rule",
            "left"
        ]),
        "value=5/2^3\n"
    );
}

#[test]
fn classify_lines_match_spec_shapes() {
    let full = corpus_dir().join("full.set");
    assert_eq!(
        stdout_of(&["classify", full.to_str().unwrap()]),
        "verdict=continuum rank=0 kernel_states=1\n"
    );
    let avoid = corpus_dir().join("avoid-11.set");
    let line = stdout_of(&["classify", avoid.to_str().unwrap(), "--oracle"]);
    assert_eq!(
        line,
        "verdict=continuum rank=1 kernel_states=4 oracle=agree band=8\n"
    );
}

#[test]
fn domain_errors_exit_one_and_name_the_error() {
    // empty kernel
    let empty = corpus_dir().join("point-half.set");
    let out = cbtree(&["kernel", empty.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("EmptyKernel"), "stderr was {stderr}");

    // malformed description
    let out = cbtree(&["classify", "/nonexistent/file.set"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("MalformedDescription"));

    // a non-eta order
    let out = cbtree(&["back-and-forth", "--a", "D", "--b", "omega", "--n", "10"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NotEta"));

    // an out-of-range point
    let out = cbtree(&[
        "map-point",
        "--scale",
        "E",
        "--point",
        "9/2^2",
        "--rule",
        "left",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("OutOfRange"));

    // usage errors are clap's business
    let out = cbtree(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn every_corpus_file_parses_and_classifies() {
    let mut count = 0;
    for entry in fs::read_dir(corpus_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|x| x == "set") {
            let out = cbtree(&["classify", path.to_str().unwrap()]);
            assert!(
                out.status.success(),
                "{} failed to classify",
                path.display()
            );
            count += 1;
        }
    }
    assert!(count >= 30);
}

#[test]
fn finite_orders_come_from_the_command_line() {
    let out = stdout_of(&[
        "scale",
        "--name",
        "finite:1/2^2,1/2^1,3/2^2",
        "--count",
        "5",
    ]);
    assert_eq!(out, "1: 1/2^2\n2: 1/2^1\n3: 3/2^2\n");
    let closure = stdout_of(&["closure", "--order", "finite:1/2^2,1/2^1", "--depth", "6"]);
    assert!(closure.starts_with("verdict=countable-closure rank=1 kernel_states=0"));
}
