use std::path::Path;
use std::process::{Command, Output};

use ltensor::io::{read_mask, read_real, write_real};
use ltensor::{fro_norm, l_product, svt, t_svd, RealTensor, TransformSpec};

fn ltensor(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ltensor"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn seq(dims: &[usize]) -> RealTensor {
    RealTensor::from_fn(dims, |i| {
        i.iter().enumerate().map(|(k, &v)| ((k + 2) * v) as f64).sum::<f64>().sin()
    })
    .unwrap()
}

#[test]
fn metrics_of_identical_tensors() {
    let dir = tempfile::tempdir().unwrap();
    write_real(dir.path().join("x.tlt"), &seq(&[3, 2, 2])).unwrap();
    let out = ltensor(dir.path(), &["metrics", "--a", "x.tlt", "--b", "x.tlt"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("RSE 0\n") && text.contains("PSNR inf\n"), "{text}");
}

#[test]
fn cproduct_completion_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_real(d.join("x.tlt"), &seq(&[3, 3, 2])).unwrap();
    assert!(ltensor(d, &["mask", "gen", "--dims", "3,3,2", "--sr", "0.5", "--out", "m.tlt"]).status.success());
    let out = ltensor(d, &["complete", "--input", "x.tlt", "--mask", "m.tlt", "--transform", "cprod", "--out", "y.tlt"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("SVT requires a unitary-scaled transform"), "{err}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(ltensor(d, &["--help"]).status.code(), Some(0));
    assert_eq!(ltensor(d, &["--version"]).status.code(), Some(0));
    let unknown = ltensor(d, &["metrics", "--bogus"]);
    assert_eq!(unknown.status.code(), Some(1));
    assert!(!unknown.stderr.is_empty());
    assert_eq!(ltensor(d, &["mask", "gen", "--dims", "2,2", "--sr", "2", "--out", "m.tlt"]).status.code(), Some(1));
    std::fs::write(d.join("junk.tlt"), b"nope").unwrap();
    let bad = ltensor(d, &["metrics", "--a", "junk.tlt", "--b", "junk.tlt"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8(bad.stderr).unwrap().contains("byte"));
}

#[test]
fn mask_gen_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for out in ["a.tlt", "b.tlt"] {
        assert!(ltensor(d, &["mask", "gen", "--dims", "10,10,3", "--sr", "0.1", "--seed", "7", "--out", out]).status.success());
    }
    assert_eq!(std::fs::read(d.join("a.tlt")).unwrap(), std::fs::read(d.join("b.tlt")).unwrap());
    assert_eq!(read_mask(d.join("a.tlt")).unwrap().known_count(), 30);
}

#[test]
fn complete_writes_trace_with_one_row_per_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(ltensor(d, &["synth", "lowrank", "--dims", "8,8,4", "--rank", "2", "--seed", "1", "--out", "a.tlt"]).status.success());
    assert!(ltensor(d, &["mask", "gen", "--dims", "8,8,4", "--sr", "0.6", "--seed", "2", "--out", "m.tlt"]).status.success());
    let out = ltensor(
        d,
        &[
            "complete", "--input", "a.tlt", "--mask", "m.tlt", "--transform", "dct", "--modes", "3",
            "--max-iters", "40", "--ground-truth", "a.tlt", "--trace-csv", "t.csv", "--out", "x.tlt",
            "--rse-denominator", "original", "--reimpose-observed",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = String::from_utf8(out.stdout).unwrap();
    let iters: usize = summary
        .split_whitespace()
        .skip_while(|w| *w != "iterations")
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    let csv = std::fs::read_to_string(d.join("t.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("iter,mu,t,rel_change,rse,psnr"));
    assert_eq!(lines.count(), iters);
    assert_eq!(read_real(d.join("x.tlt")).unwrap().dims(), &[8, 8, 4]);
}

#[test]
fn linear_algebra_subcommands_match_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let a = seq(&[3, 2, 4]);
    let b = seq(&[2, 3, 4]);
    write_real(d.join("a.tlt"), &a).unwrap();
    write_real(d.join("b.tlt"), &b).unwrap();
    let spec = TransformSpec::fourier(&[3, 2, 4]).unwrap();

    assert!(ltensor(d, &["product", "--a", "a.tlt", "--b", "b.tlt", "--out", "ab.tlt"]).status.success());
    let ab = read_real(d.join("ab.tlt")).unwrap();
    assert!(fro_norm(&(&ab - &l_product(&a, &b, &spec).unwrap())) < 1e-12);

    assert!(ltensor(d, &["svt", "--input", "a.tlt", "--tau", "0.3", "--out", "s.tlt"]).status.success());
    let s = read_real(d.join("s.tlt")).unwrap();
    assert!(fro_norm(&(&s - &svt(&a, 0.3, &spec).unwrap())) < 1e-12);

    let out = ltensor(
        d,
        &["tsvd", "--input", "a.tlt", "--out-u", "u.tlt", "--out-s", "s.tlt", "--out-v", "v.tlt", "--truncate", "1"],
    );
    assert!(out.status.success());
    assert_eq!(read_real(d.join("u.tlt")).unwrap().dims(), &[3, 1, 4]);
    assert_eq!(read_real(d.join("s.tlt")).unwrap().dims(), &[1, 1, 4]);
    assert_eq!(read_real(d.join("v.tlt")).unwrap().dims(), &[2, 1, 4]);
    let f = t_svd(&a, &spec).unwrap();
    assert!(String::from_utf8(out.stdout).unwrap().contains(&format!("{:e}", f.tube_norms[0])));
}

#[test]
fn ppm_commands_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(ltensor(d, &["synth", "video", "--height", "4", "--width", "5", "--frames", "2", "--out", "v.tlt"]).status.success());
    assert!(ltensor(d, &["ppm", "export", "--input", "v.tlt", "--dir", "frames"]).status.success());
    assert!(d.join("frames/frame_0001.ppm").is_file());
    assert!(ltensor(d, &["ppm", "import", "--dir", "frames", "--out", "w.tlt"]).status.success());
    let v = read_real(d.join("v.tlt")).unwrap();
    let w = read_real(d.join("w.tlt")).unwrap();
    assert_eq!(w.dims(), &[4, 5, 3, 2]);
    assert!(v.as_slice().iter().zip(w.as_slice()).all(|(a, b)| (a - b).abs() <= 0.5 / 255.0 + 1e-15));
}
