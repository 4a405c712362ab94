//! Profile CSV, mesh OBJ and mesh CSV files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use umbilic::profile::{InvariantSurfaceSpec, ProfileState};
use umbilic::surface::{invariant_surface_sample, SurfaceMesh};

use crate::CliError;

pub const PROFILE_COLUMNS: [&str; 10] = [
    "s",
    "rho",
    "t",
    "rho_s",
    "t_s",
    "kappa1",
    "kappa2",
    "nu",
    "residual_unit_speed",
    "residual_umbilic",
];

/// One line of a profile CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub state: ProfileState,
    pub kappa1: f64,
    pub kappa2: f64,
    pub nu: f64,
    pub residual_unit_speed: f64,
    pub residual_umbilic: f64,
}

impl ProfileRow {
    pub fn new(spec: &InvariantSurfaceSpec, state: &ProfileState) -> umbilic::Result<ProfileRow> {
        let c = invariant_surface_sample(spec, &spec.jet(state)?)?;
        Ok(ProfileRow {
            state: *state,
            kappa1: c.kappa1,
            kappa2: c.kappa2,
            nu: c.nu,
            residual_unit_speed: spec.unit_speed_residual(state)?,
            residual_umbilic: (c.kappa1 - c.kappa2).abs(),
        })
    }

    fn values(&self) -> [f64; 10] {
        let s = &self.state;
        [
            s.s,
            s.rho,
            s.t,
            s.rho_s,
            s.t_s,
            self.kappa1,
            self.kappa2,
            self.nu,
            self.residual_unit_speed,
            self.residual_umbilic,
        ]
    }
}

/// 17 significant digits: parses back to the same bits.
pub fn decimal(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>, CliError> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| io_error(path, e))
}

pub fn write_profile_csv(path: &Path, rows: &[ProfileRow]) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    w.write_record(PROFILE_COLUMNS)
        .map_err(|e| io_error(path, e))?;
    for row in rows {
        w.write_record(row.values().map(decimal))
            .map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

pub fn read_profile_csv(path: &Path) -> Result<Vec<ProfileRow>, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| io_error(path, e))?;
    let header = r.headers().map_err(|e| io_error(path, e))?.clone();
    let mut index = [0usize; 10];
    for (k, name) in PROFILE_COLUMNS.iter().enumerate() {
        index[k] = header.iter().position(|h| h == *name).ok_or_else(|| {
            CliError::Validation(format!(
                "--input {}: missing column `{name}`",
                path.display()
            ))
        })?;
    }
    let mut rows = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record.map_err(|e| io_error(path, e))?;
        let mut v = [0.0; 10];
        for k in 0..10 {
            let field = record.get(index[k]).unwrap_or("");
            v[k] = field.parse().map_err(|_| {
                CliError::Validation(format!(
                    "--input {}: row {}: `{field}` in column `{}` is not a number",
                    path.display(),
                    line + 2,
                    PROFILE_COLUMNS[k]
                ))
            })?;
        }
        rows.push(ProfileRow {
            state: ProfileState {
                s: v[0],
                rho: v[1],
                t: v[2],
                rho_s: v[3],
                t_s: v[4],
            },
            kappa1: v[5],
            kappa2: v[6],
            nu: v[7],
            residual_unit_speed: v[8],
            residual_umbilic: v[9],
        });
    }
    Ok(rows)
}

/// Wavefront OBJ: `v x y t` in chart coordinates and one quad per cell,
/// welded across the seam of periodic meshes.
pub fn write_obj(path: &Path, name: &str, mesh: &SurfaceMesh) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| io_error(path, e))?;
    let mut w = BufWriter::new(file);
    let mut emit = || -> std::io::Result<()> {
        writeln!(w, "o {name}")?;
        for v in &mesh.vertices {
            let p = v.point;
            writeln!(w, "v {} {} {}", decimal(p.x), decimal(p.y), decimal(p.t))?;
        }
        for q in mesh.quads() {
            writeln!(w, "f {} {} {} {}", q[0] + 1, q[1] + 1, q[2] + 1, q[3] + 1)?;
        }
        w.flush()
    };
    emit().map_err(|e| io_error(path, e))
}

pub fn write_mesh_csv(path: &Path, mesh: &SurfaceMesh) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "i", "j", "s", "omega", "x", "y", "t", "n1", "n2", "n3", "kappa1", "kappa2",
    ])
    .map_err(|e| io_error(path, e))?;
    for i in 0..mesh.rows() {
        for j in 0..mesh.cols() {
            let v = mesh.vertex(i, j);
            let mut record = vec![i.to_string(), j.to_string()];
            record.extend(
                [
                    mesh.s[i],
                    mesh.omega[j],
                    v.point.x,
                    v.point.y,
                    v.point.t,
                    v.normal[0],
                    v.normal[1],
                    v.normal[2],
                    v.curvature.kappa1,
                    v.curvature.kappa2,
                ]
                .map(decimal),
            );
            w.write_record(&record).map_err(|e| io_error(path, e))?;
        }
    }
    w.flush().map_err(|e| io_error(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_round_trips_bits() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, f64::MIN_POSITIVE] {
            assert_eq!(decimal(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn profile_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        let row = ProfileRow {
            state: ProfileState {
                s: 0.1,
                rho: 1.0 / 3.0,
                t: 2.0f64.sqrt(),
                rho_s: -0.7,
                t_s: 0.2,
            },
            kappa1: 1e-17,
            kappa2: 3.0,
            nu: -0.5,
            residual_unit_speed: 0.0,
            residual_umbilic: 1e-300,
        };
        write_profile_csv(&path, &[row, row]).unwrap();
        assert_eq!(read_profile_csv(&path).unwrap(), vec![row, row]);
    }

    #[test]
    fn missing_column_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        std::fs::write(&path, "s,rho\n0,1\n").unwrap();
        let err = read_profile_csv(&path).unwrap_err();
        assert!(err.to_string().contains("`t`"), "{err}");
    }
}
