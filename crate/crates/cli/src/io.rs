//! Reading meshes and writing the report, history and output mesh.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use sphereconf::mesh::{normalize_area, read_mesh, write_mesh};
use sphereconf::{Mesh, MeshFormat, RunReport};

use crate::AreaNormalization;

pub fn load_mesh(path: &Path, area: AreaNormalization) -> anyhow::Result<(Mesh, MeshFormat)> {
    let format = MeshFormat::from_path(path)?;
    let file = File::open(path).with_context(|| format!("io: cannot open {}", path.display()))?;
    let mesh = read_mesh(BufReader::new(file), format)?;
    let mesh = match area.target() {
        Some(target) => normalize_area(&mesh, target)?,
        None => mesh,
    };
    Ok((mesh, format))
}

/// `dir/stem.sphere.ext` next to the input.
pub fn default_output(input: &Path, format: MeshFormat) -> PathBuf {
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("mesh");
    input.with_file_name(format!("{stem}.sphere.{}", format.extension()))
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("io: cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

pub fn write_output_mesh(path: &Path, mesh: &Mesh, format: MeshFormat) -> anyhow::Result<()> {
    let mut w = create(path)?;
    write_mesh(mesh, &mut w, format)?;
    w.flush()?;
    Ok(())
}

pub fn write_report(path: &Path, report: &RunReport) -> anyhow::Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, report)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct HistoryRow {
    k: usize,
    residual_h1: Option<f64>,
    residual_h2: Option<f64>,
    c_k: Option<f64>,
    #[serde(rename = "E_D")]
    energy: Option<f64>,
}

/// One row per iteration; series the algorithm does not produce are left blank.
pub fn write_history(path: &Path, report: &RunReport) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for k in 0..report.iterations {
        w.serialize(HistoryRow {
            k: k + 1,
            residual_h1: report.residuals_h1.get(k).copied(),
            residual_h2: report.residuals_h2.get(k).copied(),
            c_k: report.scalings.get(k).map(|c| c[0]),
            energy: report.energies.get(k).map(|e| e.raw),
        })?;
    }
    w.flush()?;
    Ok(())
}
