//! Executes a [`RunConfig`] and writes snapshot files plus a manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use toml::{Table, Value};

use crate::config::{OperatorKind, OpsDump, RunConfig, Scenario};
use crate::error::{Error, Result};
use crate::grid::{OperatorOrder, StaggeredGrid1D, StaggeredGrid2D};
use crate::maxwell1d::{self, Run1D, Scenario1D};
use crate::maxwell2d::{self, Run2D};
use crate::mimetic::{self, IdentityReport, MimeticGrid};
use crate::snapshot::{self, FieldName, Layout, SnapshotRecord};
use crate::sparse::SparseMatrix;

pub const MANIFEST: &str = "manifest.toml";

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    /// Snapshot (or operator dump) files in write order.
    pub files: Vec<PathBuf>,
    pub manifest: PathBuf,
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

struct Writer {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Writer {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| io_err(&path, e))?;
        self.files.push(path);
        Ok(())
    }
}

fn records_1d(run: &Run1D) -> Result<Vec<(usize, Vec<SnapshotRecord>)>> {
    run.snapshots
        .iter()
        .map(|s| {
            Ok((
                s.step,
                vec![
                    SnapshotRecord::new(s.step, FieldName::Ex, Layout::Scalar1D, vec![s.ex.len()], s.ex.clone())?,
                    SnapshotRecord::new(s.step, FieldName::Hy, Layout::Edge1D, vec![s.hy.len()], s.hy.clone())?,
                ],
            ))
        })
        .collect()
}

fn records_2d(run: &Run2D) -> Result<Vec<(usize, Vec<SnapshotRecord>)>> {
    let grid = &run.grid;
    let (nx, ny) = grid.scalar_dims();
    let (ex_w, ex_h) = grid.x_edge_dims();
    let (ey_w, ey_h) = grid.y_edge_dims();
    run.snapshots
        .iter()
        .map(|s| {
            let (b_x, b_y) = maxwell2d::physical_b(grid, &s.b);
            Ok((
                s.step,
                vec![
                    SnapshotRecord::new(s.step, FieldName::E, Layout::Scalar2D, vec![nx, ny], s.e.clone())?,
                    SnapshotRecord::new(s.step, FieldName::Bx, Layout::EdgeY2D, vec![ey_w, ey_h], b_x)?,
                    SnapshotRecord::new(s.step, FieldName::By, Layout::EdgeX2D, vec![ex_w, ex_h], b_y)?,
                ],
            ))
        })
        .collect()
}

fn identities_table(report: &IdentityReport) -> Value {
    let mut t = Table::new();
    for (name, value) in report.entries() {
        t.insert(name.into(), Value::Float(value));
    }
    t.insert("pass".into(), Value::Boolean(report.passes()));
    Value::Table(t)
}

fn identities_1d(s: &Scenario1D) -> Result<IdentityReport> {
    Ok(mimetic::verify_identities(s.order()?, &s.grid()?))
}

fn identities_2d(grid: &StaggeredGrid2D, k: u32) -> Result<IdentityReport> {
    Ok(mimetic::verify_identities(OperatorOrder::new(k)?, grid))
}

/// Operator selected by an `ops-dump` document, 2D when `n` is given.
pub fn dump_operator(ops: &OpsDump) -> Result<(SparseMatrix, IdentityReport)> {
    let k = OperatorOrder::new(ops.k)?;
    match ops.n {
        None => {
            let grid = StaggeredGrid1D::new(ops.m, ops.dx)?;
            Ok((select(&grid, k, ops.dump), mimetic::verify_identities(k, &grid)))
        }
        Some(n) => {
            let grid = StaggeredGrid2D::new(ops.m, ops.dx, n, ops.dy.unwrap_or(ops.dx))?;
            Ok((select(&grid, k, ops.dump), mimetic::verify_identities(k, &grid)))
        }
    }
}

fn select<G: MimeticGrid>(grid: &G, k: OperatorOrder, kind: OperatorKind) -> SparseMatrix {
    match kind {
        OperatorKind::Grad => grid.gradient(k),
        OperatorKind::Div => grid.divergence(k),
        OperatorKind::Lap => mimetic::laplacian(k, grid),
    }
}

/// Runs the configured scenario into `out_dir`.
///
/// Snapshot files depend only on the configuration; the manifest also records
/// the wall time.
pub fn run(config: &RunConfig, out_dir: &Path) -> Result<RunOutcome> {
    config.validate()?;
    let started = Instant::now();
    let mut writer = Writer::new(out_dir)?;
    let mut manifest = Table::new();
    manifest.insert("kind".into(), Value::String(config.scenario.kind().into()));

    let every = config.snapshot_every;
    let captures = match &config.scenario {
        Scenario::Mimetic1D(s) => {
            manifest.insert("courant".into(), Value::Float(s.courant()));
            manifest.insert("identities".into(), identities_table(&identities_1d(s)?));
            records_1d(&maxwell1d::run_1d(s, every)?)?
        }
        Scenario::Yee1D { scenario, closure } => {
            manifest.insert("courant".into(), Value::Float(scenario.courant()));
            // the index-loop solver assembles no operators
            manifest.insert("operators".into(), Value::String("none".into()));
            records_1d(&maxwell1d::run_yee_1d(scenario, *closure, every)?)?
        }
        Scenario::Mimetic2D(s) => {
            manifest.insert("courant".into(), Value::Float(s.courant()));
            manifest.insert("identities".into(), identities_table(&identities_2d(&s.grid()?, s.k)?));
            records_2d(&maxwell2d::run_2d(s, every)?)?
        }
        Scenario::PmlOracle { scenario, factor } => {
            manifest.insert("courant".into(), Value::Float(scenario.courant()));
            manifest.insert(
                "identities".into(),
                identities_table(&identities_2d(&scenario.grid()?, scenario.k)?),
            );
            let big = scenario.enlarged(*factor);
            manifest.insert(
                "identities_reference".into(),
                identities_table(&identities_2d(&big.grid()?, big.k)?),
            );
            let (run, reflection) = maxwell2d::compare_with_enlarged(scenario, *factor, every)?;
            let mut t = Table::new();
            t.insert("factor".into(), Value::Integer(*factor as i64));
            t.insert("step".into(), Value::Integer(reflection.step as i64));
            t.insert("max_rel_diff".into(), Value::Float(reflection.max_rel_diff));
            manifest.insert("pml_reflection".into(), Value::Table(t));
            records_2d(&run)?
        }
        Scenario::OpsDump(ops) => {
            let (matrix, report) = dump_operator(ops)?;
            manifest.insert("identities".into(), identities_table(&report));
            let name = match ops.dump {
                OperatorKind::Grad => "grad.txt",
                OperatorKind::Div => "div.txt",
                OperatorKind::Lap => "lap.txt",
            };
            writer.write(name, &matrix.to_triplet_text())?;
            Vec::new()
        }
    };
    for (step, records) in &captures {
        writer.write(&snapshot::file_name(*step), &snapshot::render(records))?;
    }

    let names: Vec<Value> = writer
        .files
        .iter()
        .map(|p| Value::String(p.file_name().unwrap().to_string_lossy().into_owned()))
        .collect();
    manifest.insert("files".into(), Value::Array(names));
    manifest.insert("wall_time_s".into(), Value::Float(started.elapsed().as_secs_f64()));
    let resolved: Table = config.render().parse().expect("rendered config is valid TOML");
    manifest.insert("config".into(), Value::Table(resolved));

    let manifest_path = out_dir.join(MANIFEST);
    let text = toml::to_string(&manifest).expect("manifest serializes");
    fs::write(&manifest_path, text).map_err(|e| io_err(&manifest_path, e))?;
    Ok(RunOutcome {
        out_dir: out_dir.to_path_buf(),
        files: writer.files,
        manifest: manifest_path,
    })
}
