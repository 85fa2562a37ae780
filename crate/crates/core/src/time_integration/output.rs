use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::WaveState;
use crate::error::Result;

/// Snapshot table with header `t,dof_index,u,z`, one row per DOF and state.
pub fn write_snapshots_csv(path: &Path, states: &[WaveState]) -> Result<()> {
    let mut s = String::from("t,dof_index,u,z\n");
    for st in states {
        for i in 0..st.u.len() {
            let _ = writeln!(s, "{},{},{:.16e},{:.16e}", st.t, i, st.u[i], st.z[i]);
        }
    }
    fs::write(path, s)?;
    Ok(())
}

/// `key=value` lines in the given order.
pub fn format_metadata(pairs: &[(String, String)]) -> String {
    let mut s = String::new();
    for (k, v) in pairs {
        let _ = writeln!(s, "{k}={v}");
    }
    s
}

pub fn write_metadata(path: &Path, pairs: &[(String, String)]) -> Result<()> {
    fs::write(path, format_metadata(pairs))?;
    Ok(())
}
