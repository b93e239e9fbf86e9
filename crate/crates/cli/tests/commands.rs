use std::fs;
use std::path::Path;
use std::process::Command;

use chlab_cli::commands::{evolve_cmd, lifespan, taylor, verify, Outcome};
use chlab_cli::config::{parse_config, RunConfig};

fn small(out: &Path, extra: &str) -> RunConfig {
    let mut c = parse_config(&format!("grid.half_width = 8.0\ngrid.modes = 256\n{extra}")).unwrap();
    c.out_dir = out.to_path_buf();
    c
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn zero_ensemble_passes_with_zero_margins() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(
        dir.path(),
        "verify.zero = true\nverify.ensemble = 4\nverify.modes = 64\n",
    );
    let out = verify(&cfg).unwrap();
    assert!(out.hard_failures.is_empty(), "{:?}", out.hard_failures);
    let v = json(&dir.path().join("verify.json"));
    let per = v["summary"]["per_inequality"].as_object().unwrap();
    assert!(!per.is_empty());
    for (name, stats) in per {
        if let Some(m) = stats["min_margin"].as_f64() {
            assert_eq!(m, 0.0, "{name}");
        }
    }
    assert!(dir.path().join("effective.conf").exists());
}

#[test]
fn lifespan_curve_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path(), "lifespan.points = 7\n");
    let out = lifespan(&cfg, Path::new("")).unwrap();
    assert!(out.hard_failures.is_empty(), "{:?}", out.hard_failures);
    let csv = fs::read_to_string(dir.path().join("lifespan_curve.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "lambda,r,l,m,t,gamma1,gamma2,t_gamma2,t_gamma1_r"
    );
    let ts: Vec<f64> = lines
        .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
        .collect();
    assert_eq!(ts.len(), 7);
    assert!(ts.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn lifespan_flags_local_beta() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path(), "params.beta = 3.0\nlifespan.points = 3\n");
    let out = lifespan(&cfg, Path::new("")).unwrap();
    assert!(out.soft_flags.iter().any(|f| f.contains("beta")));
    assert_eq!(out.exit_code(false), 0);
    assert_eq!(out.exit_code(true), 1);
}

#[test]
fn taylor_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path(), "taylor.order = 12\ntaylor.picard_iters = 4\n");
    let out = taylor(&cfg, Path::new("")).unwrap();
    assert!(out.hard_failures.is_empty(), "{:?}", out.hard_failures);
    let v = json(&dir.path().join("taylor.json"));
    assert_eq!(v["coefficient_norms"].as_array().unwrap().len(), 13);
    assert!(v["disk_radius"].as_f64().unwrap() >= v["guaranteed_radius"].as_f64().unwrap());
}

const WAVE: &str = "init.u.kind = sech2\ninit.u.amplitude = 0.1\ninit.u.width = 2.0\n\
init.v.amplitude = 0.1\ntime.t_end = 0.2\ntime.dt = 0.01\ntime.save_every = 5\n";

#[test]
fn evolve_writes_trajectory_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path(), WAVE);
    let out = evolve_cmd(&cfg, Path::new("")).unwrap();
    assert!(out.hard_failures.is_empty(), "{:?}", out.hard_failures);
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "t,u_h3,v_h3,int_u,int_v,min_v,sigma_t,exp_sigma_t,radius"
    );
    assert_eq!(lines.len(), 1 + 5);
    assert!(lines[5].starts_with("0.2,"));
    let v = json(&dir.path().join("evolve.json"));
    assert_eq!(v["liapunov"].as_array().unwrap().len(), 5);
}

#[test]
fn from_file_datum_resolves_against_base() {
    let dir = tempfile::tempdir().unwrap();
    let grid = chlab_core::Grid::new(8.0, 256).unwrap();
    let samples: Vec<String> = grid
        .points()
        .map(|x| format!("{}", 0.1 * (-x * x).exp()))
        .collect();
    fs::write(dir.path().join("u.txt"), samples.join("\n")).unwrap();
    let out_dir = dir.path().join("out");
    let cfg = small(
        &out_dir,
        &format!("{WAVE}init.u.kind = from_file\ninit.u.path = u.txt\n")
            .replace("init.u.kind = sech2\n", ""),
    );
    let out = evolve_cmd(&cfg, dir.path()).unwrap();
    assert!(out.hard_failures.is_empty(), "{:?}", out.hard_failures);
    assert!(evolve_cmd(&cfg, Path::new("/nonexistent")).is_err());
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        let cfg = small(dir, WAVE);
        evolve_cmd(&cfg, Path::new("")).unwrap();
        verify(&small(
            dir,
            "verify.ensemble = 3\nverify.modes = 64\nverify.seed = 11\n",
        ))
        .unwrap();
    }
    for name in ["trajectory.csv", "evolve.json", "verify.json"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert!(x == y, "{name} differs between runs");
    }
}

#[test]
fn exit_codes() {
    let mut o = Outcome::default();
    assert_eq!(o.exit_code(true), 0);
    o.soft_flags.push("x".into());
    assert_eq!((o.exit_code(false), o.exit_code(true)), (0, 1));
    o.hard_failures.push("y".into());
    assert_eq!(o.exit_code(false), 1);
}

#[test]
fn binary_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("zero.conf");
    fs::write(
        &conf,
        "verify.zero = true\nverify.ensemble = 2\nverify.modes = 64\n",
    )
    .unwrap();
    let bin = env!("CARGO_BIN_EXE_chlab");
    let out = dir.path().join("out");
    let ok = Command::new(bin)
        .args(["verify", "--config"])
        .arg(&conf)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(ok.code(), Some(0));
    assert!(out.join("verify.json").exists());

    let bad = dir.path().join("bad.conf");
    fs::write(&bad, "params.beta = 2.5\nrun.global = true\n").unwrap();
    let st = Command::new(bin)
        .args(["lifespan", "--config"])
        .arg(&bad)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(2));

    let local = dir.path().join("local.conf");
    fs::write(
        &local,
        "grid.half_width = 8.0\ngrid.modes = 128\nparams.beta = 3.0\nlifespan.points = 3\n",
    )
    .unwrap();
    let run = |strict: bool| {
        let mut c = Command::new(bin);
        c.args(["lifespan", "--config"])
            .arg(&local)
            .arg("--out")
            .arg(&out);
        if strict {
            c.arg("--strict");
        }
        c.status().unwrap().code()
    };
    assert_eq!(run(false), Some(0));
    assert_eq!(run(true), Some(1));
}
