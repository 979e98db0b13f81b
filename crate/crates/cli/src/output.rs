use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use horocycle_core::flows::{Bundle, Trajectory};
use horocycle_core::SCHEMA_VERSION;
use serde::Serialize;

/// Writes `bytes` to `path` atomically (temporary file in the same directory,
/// then rename), or to stdout when no path is given.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> std::io::Result<()> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(bytes)?;
            tmp.as_file().sync_all()?;
            tmp.persist(path).map_err(|e| e.error)?;
            Ok(())
        }
    }
}

/// 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn csv_preamble(header: &str) -> String {
    format!("# schema_version={SCHEMA_VERSION}\n{header}\n")
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let header = match traj.field.bundle {
        Bundle::Tangent => "t,x,y,vx,vy,E,px",
        Bundle::Cotangent => "t,x,y,px,py,H",
    };
    let mut out = csv_preamble(header);
    for s in &traj.samples {
        let [x, y, a, b] = s.state;
        let mut row = vec![num(s.t), num(x), num(y), num(a), num(b), num(s.energy)];
        if traj.field.bundle == Bundle::Tangent {
            row.push(num(s.momentum_x));
        }
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn json<T: Serialize>(report: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(report).expect("reports serialize");
    bytes.push(b'\n');
    bytes
}
