use std::fs;

use logdyn::cli::{parse_args, run, CommandKind, RunManifest};

fn args(s: &str) -> Vec<String> {
    s.split_whitespace().map(String::from).collect()
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    fs::write(&path, "n = 10\nreplicas = 3\nbeta = 4.0\nt-final = 0.5\n").unwrap();
    let (kind, cfg) = parse_args(args(&format!("logdyn sample --config {} --n 12", path.display()))).unwrap();
    assert_eq!(kind, CommandKind::Sample);
    assert_eq!((cfg.n, cfg.replicas, cfg.beta, cfg.t_final), (Some(12), Some(3), Some(4.0), Some(0.5)));
}

#[test]
fn bad_configs_name_the_constraint() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "n = 10\nnot-a-flag = 1\n").unwrap();
    let e = parse_args(args(&format!("logdyn sample --config {}", path.display()))).unwrap_err();
    assert!(e.to_string().contains("not-a-flag"), "{e}");
    let e = parse_args(args("logdyn evolve --model bessel --a 0.5")).unwrap_err();
    assert!(e.to_string().contains("a >= 1"), "{e}");
    let e = parse_args(args("logdyn evolve --model ginibre1 --beta 1")).unwrap_err();
    assert!(e.to_string().contains("beta = 2"), "{e}");
    let e = parse_args(args("logdyn sample --replicas 0")).unwrap_err();
    assert!(e.to_string().contains("replicas must be > 0"), "{e}");
    assert!(parse_args(args("logdyn measures --n 4")).is_err());
    assert!(parse_args(args("logdyn ifc-check")).is_err());
}

#[test]
fn sample_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut hashes = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}"));
        let (kind, cfg) =
            parse_args(args(&format!("logdyn sample --ensemble ginibre --n 30 --replicas 4 --seed 5 --out {}", out.display())))
                .unwrap();
        let m = RunManifest::read(&run(kind, &cfg).unwrap()).unwrap();
        assert!(m.complete);
        hashes.push((m.config_hash.clone(), fs::read(out.join("samples.csv")).unwrap()));
        let header = fs::read_to_string(out.join("samples.csv")).unwrap();
        assert!(header.starts_with("replica,index,x,y\n"));
    }
    assert_eq!(hashes[0], hashes[1]);
}

#[test]
fn trajectory_round_trips_through_ifc_check() {
    let dir = tempfile::tempdir().unwrap();
    let evolve_out = dir.path().join("evolve");
    let (kind, cfg) = parse_args(args(&format!(
        "logdyn evolve --model bessel --a 2 --n 6 --t-final 0.02 --dt 1e-3 --replicas 2 --record-noise --out {}",
        evolve_out.display()
    )))
    .unwrap();
    let manifest = run(kind, &cfg).unwrap();
    let ifc_out = dir.path().join("ifc");
    let (kind, cfg) = parse_args(args(&format!(
        "logdyn ifc-check --trajectory {} --ms 1,3,6 --out {}",
        manifest.display(),
        ifc_out.display()
    )))
    .unwrap();
    run(kind, &cfg).unwrap();
    let table = fs::read_to_string(ifc_out.join("ifc.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("replica,m,max_dev,perturbed_dev,epsilon"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 6);
    for row in rows {
        let max_dev: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(max_dev, 0.0, "{row}");
    }
}

#[test]
fn failures_leave_an_incomplete_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("planar");
    let (kind, cfg) =
        parse_args(args(&format!("logdyn sample --ensemble ginibre --n 20 --replicas 2 --out {}", src.display()))).unwrap();
    let manifest = run(kind, &cfg).unwrap();
    let out = dir.path().join("stats");
    let (kind, cfg) = parse_args(args(&format!(
        "logdyn stats spacing --trajectory {} --out {}",
        manifest.display(),
        out.display()
    )))
    .unwrap();
    assert!(run(kind, &cfg).is_err());
    let m = RunManifest::read(&out.join("manifest.json")).unwrap();
    assert!(!m.complete);
    assert!(m.error.is_some());
}

#[test]
fn manifest_keys_are_stable() {
    let dir = tempfile::tempdir().unwrap();
    let (kind, cfg) = parse_args(args(&format!(
        "logdyn kernel --kernel airy --points 3 --domain=-1:4 --out {}",
        dir.path().display()
    )))
    .unwrap();
    let path = run(kind, &cfg).unwrap();
    let text = fs::read_to_string(path).unwrap();
    let keys: Vec<&str> = ["\"tool\"", "\"version\"", "\"command\"", "\"config\"", "\"config_hash\"", "\"complete\"", "\"wall_time_seconds\"", "\"diagnostics\"", "\"outputs\""]
        .into_iter()
        .collect();
    let positions: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]));
    assert!(dir.path().join("determinant.json").exists());
}
