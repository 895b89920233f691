use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tdem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdem"))
        .args(args)
        .output()
        .expect("run tdem")
}

fn json(out: &Output) -> serde_json::Value {
    let stdout = String::from_utf8_lossy(&out.stdout);
    serde_json::from_str(stdout.lines().last().expect("summary line")).expect("json summary")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn make_torus(dir: &Path, name: &str, nu: &str, nv: &str) -> String {
    let out = path(dir, name);
    let o = tdem(&[
        "make-torus",
        "--major",
        "3",
        "--minor",
        "1",
        "--nu",
        nu,
        "--nv",
        nv,
        "--out",
        &out,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn make_torus_counts_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = make_torus(dir.path(), "a.obj", "64", "32");
    let b = make_torus(dir.path(), "b.obj", "64", "32");
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 2048);
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 4096);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let sidecar = fs::read_to_string(dir.path().join("a.uv.csv")).unwrap();
    assert!(sidecar.starts_with("# major=3 minor=1 nu=64 nv=32\nvertex,u,v\n"));
    assert_eq!(sidecar.lines().count(), 2 + 2048);
}

#[test]
fn invalid_radii_exit_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "t.obj");
    let o = tdem(&["make-torus", "--minor", "3", "--major", "1", "--out", &out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("require R > r > 0"));
    assert!(!Path::new(&out).exists());
    assert_eq!(tdem(&["make-torus", "--nu", "lots"]).status.code(), Some(2));
}

#[test]
fn uniform_population_runs_zero_iterations() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = make_torus(dir.path(), "t.obj", "30", "10");
    let prefix = path(dir.path(), "out/u");
    let o = tdem(&[
        "tdem",
        "--mesh",
        &mesh,
        "--population",
        "uniform",
        "--out-prefix",
        &prefix,
    ]);
    assert!(o.status.success());
    let s = json(&o);
    assert_eq!(s["iterations"], 0);
    assert_eq!(s["converged"], true);
    for suffix in [".mapped.obj", ".planar.obj", ".report.csv", ".density.csv"] {
        assert!(Path::new(&format!("{prefix}{suffix}")).exists(), "{suffix}");
    }
}

#[test]
fn strict_non_convergence_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = make_torus(dir.path(), "t.obj", "30", "10");
    let prefix = path(dir.path(), "c");
    let args = [
        "tdem",
        "--mesh",
        &mesh,
        "--population",
        "cos_u",
        "--nmax",
        "3",
        "--out-prefix",
        &prefix,
    ];
    let o = tdem(&args);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let s = json(&o);
    assert_eq!(s["iterations"], 3);
    assert!(s["var_final"].as_f64().unwrap() < s["var_initial"].as_f64().unwrap());
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(tdem(&strict).status.code(), Some(3));
    let report = fs::read_to_string(format!("{prefix}.report.csv")).unwrap();
    assert_eq!(report.lines().count(), 4);
}

#[test]
fn radii_come_from_flags_sidecar_or_fit() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = make_torus(dir.path(), "t.obj", "24", "8");
    let prefix = path(dir.path(), "r");
    let base = [
        "tdem",
        "--mesh",
        &mesh,
        "--population",
        "cos_u",
        "--nmax",
        "1",
        "--out-prefix",
        &prefix,
    ];
    assert_eq!(json(&tdem(&base))["major"], 3.0);
    fs::remove_file(dir.path().join("t.uv.csv")).unwrap();
    let fitted = json(&tdem(&base))["major"].as_f64().unwrap();
    assert!((fitted - 3.0).abs() < 1e-9);
    let mut wrong = base.to_vec();
    wrong.extend(["--major", "3", "--minor", "0.8"]);
    assert_eq!(tdem(&wrong).status.code(), Some(2));
    let mut half = base.to_vec();
    half.extend(["--major", "3"]);
    assert_eq!(tdem(&half).status.code(), Some(2));
}

#[test]
fn bad_inputs_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = make_torus(dir.path(), "t.obj", "12", "6");
    let prefix = path(dir.path(), "x");
    let o = tdem(&[
        "tdem",
        "--mesh",
        &mesh,
        "--population",
        "wavy",
        "--out-prefix",
        &prefix,
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = tdem(&[
        "tdem",
        "--mesh",
        &mesh,
        "--population",
        "cos_u",
        "--dt",
        "-1",
        "--out-prefix",
        &prefix,
    ]);
    assert_eq!(o.status.code(), Some(2));
    let missing = path(dir.path(), "missing.obj");
    let o = tdem(&[
        "tdem",
        "--mesh",
        &missing,
        "--population",
        "cos_u",
        "--out-prefix",
        &prefix,
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(fs::read_dir(dir.path())
        .unwrap()
        .all(|e| { !e.unwrap().file_name().to_string_lossy().starts_with('x') }));
}

#[test]
fn sphere_is_rejected_with_its_genus() {
    let dir = tempfile::tempdir().unwrap();
    let sphere = path(dir.path(), "s.obj");
    fs::write(
        &sphere,
        "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nf 1 3 2\nf 1 2 4\nf 2 3 4\nf 1 4 3\n",
    )
    .unwrap();
    let o = tdem(&[
        "parameterize",
        "--mesh",
        &sphere,
        "--out-prefix",
        &path(dir.path(), "p"),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("genus 0, require genus 1"));
}

#[test]
fn perfect_grid_parameterization_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = make_torus(dir.path(), "g.obj", "40", "14");
    let prefix = path(dir.path(), "g");
    let o = tdem(&[
        "parameterize",
        "--mesh",
        &mesh,
        "--major",
        "3",
        "--minor",
        "1",
        "--out-prefix",
        &prefix,
    ]);
    assert!(o.status.success());
    let s = json(&o);
    assert!(s["mean_abs_darea_final"].as_f64().unwrap() <= 1e-6);
    let hist = fs::read_to_string(format!("{prefix}.histogram.csv")).unwrap();
    assert_eq!(hist.lines().count(), 51);
    // every face sits in one of the two bins around zero
    let central: usize = hist
        .lines()
        .filter(|l| l.starts_with("-0.12,") || l.starts_with("0.00,"))
        .map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap())
        .sum();
    assert_eq!(central, 1120);
    let obj = fs::read_to_string(format!("{prefix}.obj")).unwrap();
    let vt: Vec<Vec<f64>> = obj
        .lines()
        .filter_map(|l| l.strip_prefix("vt "))
        .map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect())
        .collect();
    assert!(vt
        .iter()
        .flatten()
        .all(|&x| (-1e-9..=1.0 + 1e-9).contains(&x)));
}

#[test]
fn metrics_ignore_global_scale() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = make_torus(dir.path(), "g.obj", "20", "8");
    let o = tdem(&["metrics", "--source", &mesh, "--mapped", &mesh]);
    assert_eq!(json(&o)["mean_abs_darea"], 0.0);

    let scaled = path(dir.path(), "scaled.obj");
    let text: String = fs::read_to_string(&mesh)
        .unwrap()
        .lines()
        .map(|l| match l.strip_prefix("v ") {
            Some(rest) => {
                let p: Vec<f64> = rest
                    .split_whitespace()
                    .map(|x| x.parse().unwrap())
                    .collect();
                format!("v {:e} {:e} {:e}\n", 2.0 * p[0], 2.0 * p[1], 2.0 * p[2])
            }
            None => format!("{l}\n"),
        })
        .collect();
    fs::write(&scaled, text).unwrap();
    let o = tdem(&[
        "metrics",
        "--source",
        &mesh,
        "--mapped",
        &scaled,
        "--population",
        "cos_u",
    ]);
    let s = json(&o);
    assert!(s["mean_abs_darea"].as_f64().unwrap() < 1e-12);
    assert!((s["major"].as_f64().unwrap() - 6.0).abs() < 1e-9);
    assert!(s["var"].as_f64().unwrap() > 0.1);

    let other = make_torus(dir.path(), "other.obj", "21", "8");
    let o = tdem(&["metrics", "--source", &mesh, "--mapped", &other]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "run.cfg");
    let out = path(dir.path(), "cfg.obj");
    fs::write(
        &cfg,
        format!("# grid\nmajor = 4\nminor = 1\nnu = 10\nnv = 5\nout = \"{out}\"\n"),
    )
    .unwrap();
    let o = tdem(&["--config", &cfg, "make-torus", "--nu", "12"]);
    assert!(o.status.success());
    let s = json(&o);
    assert_eq!(s["faces"], 120);
    assert_eq!(s["major"], 4.0);
    fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(
        tdem(&["--config", &cfg, "make-torus", "--out", &out])
            .status
            .code(),
        Some(2)
    );
}
