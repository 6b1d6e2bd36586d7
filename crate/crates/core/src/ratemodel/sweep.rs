use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use super::rate::{optimize_m, BoundsSource, RateOptions, RatePoint};
use super::{ChannelModel, DetectorModel};
use crate::error::{Error, Result};
use crate::fmt::sig;

pub const SWEEP_CSV_HEADER: &str = "profile,d,L_km,m_opt,T,p_c,p_e,hxy_bits,hmin_bits,key_rate_bits";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub profile: String,
    #[serde(flatten)]
    pub point: RatePoint,
}

/// Evaluates the photon-number-optimised rate on every `(profile, d, L)`
/// cell. Rows come back sorted by profile name, then `d`, then `L`,
/// independent of how many threads evaluate them.
pub fn sweep(
    dims: &[u64],
    lengths_km: &[f64],
    profiles: &[(String, DetectorModel)],
    attenuation_db_per_km: f64,
    source: BoundsSource,
    opts: &RateOptions,
) -> Result<Vec<SweepRow>> {
    if dims.is_empty() || lengths_km.is_empty() || profiles.is_empty() {
        return Err(Error::Constraint("sweep grids must be non-empty".into()));
    }
    let mut profiles: Vec<&(String, DetectorModel)> = profiles.iter().collect();
    profiles.sort_by(|a, b| a.0.cmp(&b.0));
    let mut dims = dims.to_vec();
    dims.sort_unstable();
    let mut lengths = lengths_km.to_vec();
    lengths.sort_by(f64::total_cmp);

    let cells: Vec<(&String, &DetectorModel, u64, f64)> = profiles
        .iter()
        .flat_map(|(name, det)| {
            let lengths = &lengths;
            dims.iter()
                .flat_map(move |&d| lengths.iter().map(move |&l| (name, det, d, l)))
        })
        .collect();

    cells
        .into_par_iter()
        .map(|(name, det, d, l)| {
            let chan = ChannelModel::new(l, attenuation_db_per_km)?;
            Ok(SweepRow {
                profile: name.clone(),
                point: optimize_m(d, &chan, det, source, opts)?,
            })
        })
        .collect()
}

/// Writes the sweep table, floats at 10 significant digits. `comment`, if
/// given, is emitted first as a `# …` line.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], comment: Option<&str>, mut out: W) -> io::Result<()> {
    if let Some(c) = comment {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for row in rows {
        let p = &row.point;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            row.profile,
            p.d,
            sig(p.length_km, 10),
            p.m,
            sig(p.transmittance, 10),
            sig(p.p_c, 10),
            sig(p.p_e, 10),
            sig(p.hxy_bits, 10),
            sig(p.hmin_bits, 10),
            sig(p.key_rate, 10),
        )?;
    }
    Ok(())
}
