use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sphereconf::mesh::{read_mesh, write_mesh};
use sphereconf::{shapes, Mesh, MeshFormat};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sphereconf"));
    c.env("SPHERECONF_LOG", "error");
    c
}

fn write(dir: &Path, name: &str, mesh: &Mesh) -> PathBuf {
    let path = dir.join(name);
    let format = MeshFormat::from_path(&path).unwrap();
    write_mesh(mesh, File::create(&path).unwrap(), format).unwrap();
    path
}

fn run(cmd: &mut Command) -> (i32, String, String) {
    let Output { status, stdout, stderr } = cmd.output().unwrap();
    (status.code().unwrap(), String::from_utf8(stdout).unwrap(), String::from_utf8(stderr).unwrap())
}

#[test]
fn param_writes_unit_sphere_mesh() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "ico.off", &shapes::icosphere(3));
    let out = dir.path().join("out.off");
    let report = dir.path().join("r.json");
    let history = dir.path().join("h.csv");
    let (code, _, err) = run(bin()
        .arg("param")
        .arg(&input)
        .args(["--algo", "mdem", "--rho", "1.4", "--out"])
        .arg(&out)
        .arg("--report")
        .arg(&report)
        .arg("--history")
        .arg(&history));
    assert_eq!(code, 0, "{err}");

    let sphere = read_mesh(std::io::BufReader::new(File::open(&out).unwrap()), MeshFormat::Off).unwrap();
    assert_eq!(sphere.faces(), shapes::icosphere(3).faces());
    for p in sphere.vertices() {
        assert!((sphereconf::geometry::norm(p) - 1.0).abs() < 1e-12);
    }

    let json: serde_json::Value = serde_json::from_reader(File::open(&report).unwrap()).unwrap();
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["converged"], true);
    assert!(json.get("wall_time").is_none());
    let iterations = json["iterations"].as_u64().unwrap() as usize;
    assert_eq!(json["residuals_h1"].as_array().unwrap().len(), iterations);
    assert_eq!(json["energies"].as_array().unwrap().len(), iterations);

    let mut rdr = csv::Reader::from_path(&history).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["k", "residual_h1", "residual_h2", "c_k", "E_D"]);
    assert_eq!(rdr.records().count(), iterations);
}

#[test]
fn param_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let torus = write(dir.path(), "torus.off", &shapes::torus(12, 8, 2.0, 0.7));
    let (code, _, err) = run(bin().arg("param").arg(&torus));
    assert_eq!(code, 1);
    assert!(err.contains("genus"), "{err}");

    let ico = write(dir.path(), "ico.obj", &shapes::icosphere(2));
    let (code, _, _) = run(bin().arg("param").arg(&ico).args(["--max-iter", "0"]));
    assert_eq!(code, 2);
    // Outputs are still written on non-convergence, in the input's format.
    assert!(dir.path().join("ico.sphere.obj").exists());

    let (code, _, err) = run(bin().arg("param").arg(&ico).args(["--rho", "0.9"]));
    assert_eq!(code, 1);
    assert!(err.contains("rho"), "{err}");
    let (code, _, err) = run(bin().arg("param").arg(dir.path().join("missing.off")));
    assert_eq!(code, 1);
    assert!(err.contains("io"), "{err}");
}

#[test]
fn param_timing_and_laplacian_dump() {
    let dir = tempfile::tempdir().unwrap();
    let ico = write(dir.path(), "ico.off", &shapes::icosphere(1));
    let report = dir.path().join("r.json");
    let mtx = dir.path().join("l.mtx");
    let (code, _, err) = run(bin()
        .arg("param")
        .arg(&ico)
        .args(["--algo", "dem", "--timing", "--area", "4pi", "--report"])
        .arg(&report)
        .arg("--dump-laplacian")
        .arg(&mtx));
    assert!(code == 0 || code == 2, "{err}");
    let json: serde_json::Value = serde_json::from_reader(File::open(&report).unwrap()).unwrap();
    assert!(json["wall_time"].as_f64().unwrap() >= 0.0);
    assert_eq!(json["algorithm"], "dem");
    assert_eq!(json["rho"], 1.1);
    assert!(std::fs::read_to_string(&mtx).unwrap().starts_with("%%MatrixMarket"));
}

#[test]
fn certify_prints_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let ico = write(dir.path(), "ico.off", &shapes::icosphere(3));
    let (code, out, err) = run(bin().arg("certify").arg(&ico));
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("eta = ") && out.contains("gamma = ") && out.contains("SATISFIED"), "{out}");
    let radius: f64 = out.lines().find_map(|l| l.strip_prefix("rho(gamma^2 |A2_hat| A1) = ")).unwrap().parse().unwrap();
    assert!(radius < 1.0);

    let torus = write(dir.path(), "torus.off", &shapes::torus(12, 8, 2.0, 0.7));
    assert_eq!(run(bin().arg("certify").arg(&torus)).0, 1);
}

#[test]
fn compare_table_and_identical_runs() {
    let dir = tempfile::tempdir().unwrap();
    let ico = write(dir.path(), "ico.off", &shapes::icosphere(3));
    let (code, out, err) = run(bin().arg("compare").arg(&ico));
    assert_eq!(code, 0, "{err}");
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 4, "{out}");
    assert!(lines[1].starts_with("dem") && lines[2].starts_with("mdem"));
    let d_e: f64 = lines[3].strip_prefix("d_E = ").unwrap().parse().unwrap();
    assert!(d_e.abs() < 1e-4);

    let (_, out, _) = run(bin().arg("compare").arg(&ico).args(["--same", "mdem"]));
    let d_e: f64 = out.lines().last().unwrap().strip_prefix("d_E = ").unwrap().parse().unwrap();
    assert_eq!(d_e, 0.0, "{out}");
}

#[test]
fn batch_rows_and_failures() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.off", &shapes::icosphere(3));
    write(dir.path(), "b.obj", &shapes::stretched(&shapes::icosphere(3), [2.0, 2.0, 2.0]));
    write(dir.path(), "c.off", &shapes::icosphere(4));
    std::fs::write(dir.path().join("readme.txt"), "not a mesh").unwrap();
    let csv_path = dir.path().join("out.csv");
    let (code, _, err) = run(bin().arg("batch").arg(dir.path()).arg("--csv").arg(&csv_path).args(["--workers", "2"]));
    assert_eq!(code, 0, "{err}");
    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        [
            "mesh_id",
            "n",
            "m1",
            "m2",
            "eta",
            "cert_rho",
            "E_D_raw",
            "E_D_minus_4pi",
            "mean_dtheta",
            "sd_dtheta",
            "iterations",
            "converged"
        ]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.iter().map(|r| r[0].to_string()).collect::<Vec<_>>(), ["a", "b", "c"]);
    for r in &rows {
        assert!(r[5].parse::<f64>().unwrap() < 1.0, "{r:?}");
        assert_eq!(&r[11], "true");
    }
    assert!(err.contains("mean d_theta"), "{err}");

    std::fs::write(dir.path().join("broken.off"), "OFF\n3 1 0\n0 0 0\n").unwrap();
    let (code, out, _) = run(bin().arg("batch").arg(dir.path()).args(["--pattern", "*.off"]));
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 4, "{out}");
    assert!(lines[2].starts_with("broken,") && lines[2].ends_with(",failed"));
}

#[test]
fn batch_empty_and_missing_directory() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, err) = run(bin().env("SPHERECONF_LOG", "warn").arg("batch").arg(dir.path()));
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1);
    assert!(err.contains("no meshes"), "{err}");
    assert_eq!(run(bin().arg("batch").arg(dir.path().join("nope"))).0, 1);
}
