//! Field snapshot export: CSV with full-precision nodal values and legacy
//! VTK structured-points files for visualization.

use crate::error::Result;
use crate::fields::Grid;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

/// One snapshot of the macroscopic state in physical units.
#[derive(Debug, Clone)]
pub struct SnapshotData {
    pub grid: Grid,
    /// Physical node spacing (m).
    pub dx: f64,
    pub phi: Vec<f64>,
    pub rho: Vec<f64>,
    pub u_phys: Vec<Vec<f64>>,
    pub p_phys: Vec<f64>,
}

fn sig17(v: f64) -> String {
    format!("{v:.16e}")
}

/// One row per node: coordinates, phi, rho, velocity components, pressure;
/// values printed with 17 significant digits.
pub fn write_snapshot_csv(path: &Path, snap: &SnapshotData) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let dim = snap.grid.dim;
    let coord_names = ["x", "y", "z"];
    let vel_names = ["ux", "uy", "uz"];
    let mut header: Vec<&str> = coord_names[..dim].to_vec();
    header.push("phi");
    header.push("rho");
    header.extend_from_slice(&vel_names[..dim]);
    header.push("p");
    writeln!(out, "{}", header.join(","))?;
    for c in 0..snap.grid.cells() {
        let pos = snap.grid.coords(c);
        let mut cols: Vec<String> = (0..dim).map(|a| sig17(pos[a] as f64 * snap.dx)).collect();
        cols.push(sig17(snap.phi[c]));
        cols.push(sig17(snap.rho[c]));
        for a in 0..dim {
            cols.push(sig17(snap.u_phys[a][c]));
        }
        cols.push(sig17(snap.p_phys[c]));
        writeln!(out, "{}", cols.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Legacy ASCII VTK structured-points file with phi, rho and pressure as
/// scalars and the velocity as a vector field.
pub fn write_snapshot_vtk(path: &Path, snap: &SnapshotData) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let n = snap.grid.n;
    let dim = snap.grid.dim;
    let (nx, ny, nz) = (n, if dim >= 2 { n } else { 1 }, if dim >= 3 { n } else { 1 });
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "vanse snapshot")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET STRUCTURED_POINTS")?;
    writeln!(out, "DIMENSIONS {nx} {ny} {nz}")?;
    writeln!(out, "ORIGIN 0 0 0")?;
    writeln!(out, "SPACING {} {} {}", snap.dx, snap.dx, snap.dx)?;
    writeln!(out, "POINT_DATA {}", snap.grid.cells())?;

    for (name, values) in [("phi", &snap.phi), ("rho", &snap.rho), ("pressure", &snap.p_phys)] {
        writeln!(out, "SCALARS {name} double 1")?;
        writeln!(out, "LOOKUP_TABLE default")?;
        for v in values {
            writeln!(out, "{v:.9e}")?;
        }
    }
    writeln!(out, "VECTORS velocity double")?;
    for c in 0..snap.grid.cells() {
        let mut v = [0.0; 3];
        for a in 0..dim {
            v[a] = snap.u_phys[a][c];
        }
        writeln!(out, "{:.9e} {:.9e} {:.9e}", v[0], v[1], v[2])?;
    }
    out.flush()?;
    Ok(())
}
