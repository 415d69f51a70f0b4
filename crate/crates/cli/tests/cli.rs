use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ctensor::io::{read_matrix, read_model, read_tensor, write_model, write_tensor, AnyModel, Family};
use ctensor::linalg::relative_error_slice;
use ctensor::models::{ParafacModel, ParatuckModel};
use ctensor::random::{random_matrix, random_tensor, seeded_rng};
use ctensor::{Matrix, Tensor};
use tempfile::TempDir;

fn ctensor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctensor")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = ctensor(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn paratuck24(dir: &Path) -> PathBuf {
    let mut rng = seeded_rng(7);
    let m = ParatuckModel::<f64>::new(
        vec![random_matrix(3, 2, &mut rng), random_matrix(4, 3, &mut rng)],
        vec![random_matrix(2, 5, &mut rng), random_matrix(3, 5, &mut rng)],
        random_tensor(&[2, 3, 4], &mut rng),
    )
    .unwrap();
    let path = dir.join("pt.mdl");
    write_model(&path, &AnyModel::Paratuck(m)).unwrap();
    path
}

fn identity_parafac(dir: &Path, third: Matrix) -> PathBuf {
    let i = Matrix::identity(2, 2);
    let m = ParafacModel::new(vec![i.clone(), i, third], None).unwrap();
    let path = dir.join("id.mdl");
    write_model(&path, &AnyModel::Parafac(m)).unwrap();
    path
}

#[test]
fn paratuck_round_trip_through_parafac() {
    let dir = TempDir::new().unwrap();
    let model = paratuck24(dir.path());
    let x = dir.path().join("x.ten");
    ok(&["synth", "--model", s(&model), "--out", s(&x)]);
    let reference: Tensor = read_tensor(&x).unwrap();
    assert_eq!(reference.dims(), &[3, 4, 5, 4]);

    for target in ["parafac4", "parafac", "tucker"] {
        let rewritten = dir.path().join(format!("{target}.mdl"));
        let y = dir.path().join(format!("{target}.ten"));
        ok(&["transform", "--model", s(&model), "--to", target, "--out", s(&rewritten)]);
        ok(&["synth", "--model", s(&rewritten), "--out", s(&y), "--binary"]);
        let expect = if target == "tucker" { Family::Tucker } else { Family::Parafac };
        assert_eq!(read_model::<f64>(&rewritten).unwrap().family(), expect);
        let y: Tensor = read_tensor(&y).unwrap();
        assert_eq!(y.dims(), reference.dims());
        assert!(relative_error_slice(y.data(), reference.data()) <= 1e-12, "{target}");
    }
}

#[test]
fn unfold_matches_hand_matricization() {
    let dir = TempDir::new().unwrap();
    let x = dir.path().join("x.ten");
    write_tensor(&x, &Tensor::new(vec![2, 2, 2], (1..=8).map(f64::from).collect()).unwrap()).unwrap();

    let m = dir.path().join("m.txt");
    ok(&["unfold", "--input", s(&x), "--s1", "1", "--s2", "2,3", "--out", s(&m)]);
    let expect = Matrix::from_row_slice(2, 4, &[1., 2., 3., 4., 5., 6., 7., 8.]);
    assert_eq!(read_matrix::<f64>(&m).unwrap(), expect);

    let stdout = ok(&["unfold", "--input", s(&x), "--s1", "2", "--s2", "3,1"]);
    let got = ctensor::io::parse_matrix::<f64>(&stdout).unwrap();
    let expect = Matrix::from_row_slice(2, 4, &[1., 5., 2., 6., 3., 7., 4., 8.]);
    assert_eq!(got, expect);
}

#[test]
fn kruskal_on_identity_factors() {
    let dir = TempDir::new().unwrap();
    let model = identity_parafac(dir.path(), Matrix::identity(2, 2));
    let stdout = ok(&["check", "--model", s(&model), "--kruskal"]);
    assert!(stdout.contains("kruskal: holds, margin 0"), "{stdout}");

    let json = ok(&["check", "--model", s(&model), "--json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v[0]["verdict"], "holds");
    assert_eq!(v[0]["margin"], 0);
    assert_eq!(v[0]["k_ranks"], serde_json::json!([2, 2, 2]));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(ctensor(&["bogus"]).status.code(), Some(1));
    assert_eq!(ctensor(&["check", "--model", "missing.mdl"]).status.code(), Some(1));
    assert_eq!(ctensor(&["synth", "--model"]).status.code(), Some(1));

    let x = dir.path().join("x.ten");
    write_tensor(&x, &Tensor::filled(&[2, 2, 2], 1.0).unwrap()).unwrap();
    let bad = ctensor(&["unfold", "--input", s(&x), "--s1", "1,2", "--s2", "2"]);
    assert_eq!(bad.status.code(), Some(1));
    let nowhere = dir.path().join("no/such/dir/y.ten");
    let model = identity_parafac(dir.path(), Matrix::identity(2, 2));
    assert_eq!(ctensor(&["synth", "--model", s(&model), "--out", s(&nowhere)]).status.code(), Some(1));

    let collinear = identity_parafac(dir.path(), Matrix::from_element(2, 2, 1.0));
    let out = ctensor(&["check", "--model", s(&collinear), "--relaxed"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn fit_is_deterministic_and_accurate() {
    let dir = TempDir::new().unwrap();
    let mut rng = seeded_rng(3);
    let truth = ParafacModel::new((0..3).map(|_| random_matrix::<f64, _>(5, 2, &mut rng)).collect(), None).unwrap();
    let model = dir.path().join("truth.mdl");
    let x = dir.path().join("x.ten");
    write_model(&model, &AnyModel::Parafac(truth)).unwrap();
    ok(&["synth", "--model", s(&model), "--out", s(&x)]);

    let (a, b) = (dir.path().join("a.mdl"), dir.path().join("b.mdl"));
    let args = |out: &Path| {
        vec!["fit", "--input", s(&x), "--family", "parafac", "--rank", "2", "--seed", "11", "--out", s(out), "--json"]
            .into_iter()
            .map(String::from)
            .collect::<Vec<_>>()
    };
    let run = |out: &Path| {
        let a = args(out);
        ok(&a.iter().map(String::as_str).collect::<Vec<_>>())
    };
    let report = run(&a);
    run(&b);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let v: serde_json::Value = serde_json::from_str(&report).unwrap();
    let err = v["rel_error_history"].as_array().unwrap().last().unwrap().as_f64().unwrap();
    assert!(err < 1e-8, "{err}");
    assert_eq!(read_model::<f64>(&a).unwrap().family(), Family::Parafac);
}

#[test]
fn kron_receiver_fit_from_known_constraints() {
    let dir = TempDir::new().unwrap();
    let model = paratuck24(dir.path());
    let x = dir.path().join("x.ten");
    ok(&["synth", "--model", s(&model), "--out", s(&x)]);
    let est = dir.path().join("est.mdl");
    let stdout =
        ok(&["fit", "--input", s(&x), "--family", "paratuck24", "--known", s(&model), "--out", s(&est)]);
    assert!(stdout.contains("converged    true"), "{stdout}");
    let y = dir.path().join("y.ten");
    ok(&["synth", "--model", s(&est), "--out", s(&y)]);
    let (x, y): (Tensor, Tensor) = (read_tensor(&x).unwrap(), read_tensor(&y).unwrap());
    assert!(relative_error_slice(y.data(), x.data()) < 1e-10);
}

#[test]
fn info_reports_dims_and_ranks() {
    let dir = TempDir::new().unwrap();
    let model = paratuck24(dir.path());
    let v: serde_json::Value = serde_json::from_str(&ok(&["info", "--input", s(&model), "--json"])).unwrap();
    assert_eq!(v["family"], "paratuck");
    assert_eq!(v["dims"], serde_json::json!([3, 4, 5, 4]));
    assert_eq!(v["mode_ranks"], serde_json::json!([2, 3, 5, 4]));
    assert_eq!(v["entries"], 240);
}
