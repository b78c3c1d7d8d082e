use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use sphereconf::mdem::{run_mdem, MdemOptions};

use crate::io::load_mesh;
use crate::{Algo, SolverArgs};

#[derive(Args, Debug)]
pub struct BatchArgs {
    pub dir: PathBuf,
    /// Glob relative to the directory. By default every .off and .obj file.
    #[arg(long)]
    pub pattern: Option<String>,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long, default_value_t = 1, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
    pub workers: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
#[allow(non_snake_case)]
pub struct Row {
    pub mesh_id: String,
    pub n: Option<usize>,
    pub m1: Option<usize>,
    pub m2: Option<usize>,
    pub eta: Option<f64>,
    pub cert_rho: Option<f64>,
    pub E_D_raw: Option<f64>,
    pub E_D_minus_4pi: Option<f64>,
    pub mean_dtheta: Option<f64>,
    pub sd_dtheta: Option<f64>,
    pub iterations: Option<usize>,
    /// `true`, `false`, or `failed` when the mesh could not be processed.
    pub converged: String,
}

impl Row {
    fn failed(mesh_id: String) -> Self {
        Row {
            mesh_id,
            n: None,
            m1: None,
            m2: None,
            eta: None,
            cert_rho: None,
            E_D_raw: None,
            E_D_minus_4pi: None,
            mean_dtheta: None,
            sd_dtheta: None,
            iterations: None,
            converged: "failed".into(),
        }
    }
}

fn mesh_files(dir: &Path, pattern: Option<&str>) -> anyhow::Result<Vec<PathBuf>> {
    std::fs::read_dir(dir).with_context(|| format!("io: cannot read directory {}", dir.display()))?;
    let escaped = glob::Pattern::escape(&dir.to_string_lossy());
    let full = format!("{escaped}/{}", pattern.unwrap_or("*"));
    let mut files = Vec::new();
    for entry in glob::glob(&full).with_context(|| format!("cli: invalid pattern {full}"))? {
        let path = entry?;
        if !path.is_file() {
            continue;
        }
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
        if pattern.is_some() || ext == "off" || ext == "obj" {
            files.push(path);
        }
    }
    Ok(files)
}

fn process(path: &Path, args: &BatchArgs, rho: f64) -> Row {
    let mesh_id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let result = load_mesh(path, args.solver.area).and_then(|(mesh, _)| {
        let options = MdemOptions {
            rho,
            tol: args.solver.tol,
            max_iter: args.solver.max_iter,
            certify: true,
            track_energy: false,
        };
        Ok(run_mdem(&mesh, &options)?)
    });
    match result {
        Ok(out) => {
            let r = out.report;
            Row {
                mesh_id,
                n: Some(r.n),
                m1: Some(r.m1),
                m2: Some(r.m2),
                eta: r.certificate.as_ref().map(|c| c.eta),
                cert_rho: r.certificate.as_ref().map(|c| c.spectral_radius),
                E_D_raw: Some(r.energy.raw),
                E_D_minus_4pi: Some(r.energy.minus_4pi),
                mean_dtheta: Some(r.distortion.mean),
                sd_dtheta: Some(r.distortion.sd),
                iterations: Some(r.iterations),
                converged: r.converged.to_string(),
            }
        }
        Err(e) => {
            log::warn!("batch: {} failed: {e:#}", path.display());
            Row::failed(mesh_id)
        }
    }
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn run(args: &BatchArgs) -> anyhow::Result<bool> {
    args.solver.check()?;
    let rho = args.solver.rho_for(Algo::Mdem)?;
    let files = mesh_files(&args.dir, args.pattern.as_deref())?;
    if files.is_empty() {
        log::warn!("batch: no meshes found in {}", args.dir.display());
    }

    let pool = rayon::ThreadPoolBuilder::new().num_threads(args.workers).build()?;
    let mut rows: Vec<Row> = pool.install(|| files.par_iter().map(|p| process(p, args, rho)).collect());
    rows.sort_by(|a, b| a.mesh_id.cmp(&b.mesh_id));

    let sink: Box<dyn std::io::Write> = match &args.csv {
        Some(path) => {
            Box::new(std::fs::File::create(path).with_context(|| format!("io: cannot create {}", path.display()))?)
        }
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(sink);
    w.write_record([
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
        "converged",
    ])?;
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush()?;

    let done: Vec<&Row> = rows.iter().filter(|r| r.converged != "failed").collect();
    let failed = rows.len() - done.len();
    let certified = done.iter().filter(|r| r.cert_rho.is_some_and(|c| c < 1.0)).count();
    eprintln!("processed {} meshes: {} failed, {} certified", rows.len(), failed, certified);
    if !done.is_empty() {
        let (m, s) = mean_sd(&done.iter().filter_map(|r| r.mean_dtheta).collect::<Vec<_>>());
        eprintln!("mean d_theta across meshes: mean = {m:.6}, sd = {s:.6}");
        let (m, s) = mean_sd(&done.iter().filter_map(|r| r.sd_dtheta).collect::<Vec<_>>());
        eprintln!("sd d_theta across meshes: mean = {m:.6}, sd = {s:.6}");
    }
    Ok(true)
}
