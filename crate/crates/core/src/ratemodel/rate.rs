use serde::Serialize;

use super::detection::{conditional_entropy_xy, detection_stats, DetectionMode};
use super::{ChannelModel, DetectorModel};
use crate::error::{out_of_range, Error, Result};
use crate::security;

pub const DEFAULT_L_CAP_KM: f64 = 1000.0;
pub const DISTANCE_RESOLUTION_KM: f64 = 0.1;

/// Which upper bound on Eve's guessing probability feeds the rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundsSource {
    /// Closed forms: the single-copy expression at `m = 1`, the multi-copy
    /// expression above.
    #[default]
    Paper,
    /// `λ^m / 2` with `λ` from the exact eigenvalue oracle (`d ≤ 16`).
    Certified,
}

impl std::str::FromStr for BoundsSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Self::Paper),
            "certified" => Ok(Self::Certified),
            _ => Err(out_of_range("bounds", s, "paper | certified")),
        }
    }
}

/// Survival probability used in the sifting prefactor `1 − (1 − p)^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SiftModel {
    /// `p = T·η`: a copy must survive the fibre and be detected.
    #[default]
    TransmittanceTimesEfficiency,
    /// `p = T`
    TransmittanceOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateOptions {
    pub sift: SiftModel,
    pub detection: DetectionMode,
    /// Largest distance probed by [`max_distance`].
    pub l_cap_km: f64,
}

impl Default for RateOptions {
    fn default() -> Self {
        Self {
            sift: SiftModel::default(),
            detection: DetectionMode::Normalized,
            l_cap_km: DEFAULT_L_CAP_KM,
        }
    }
}

/// One evaluation of the key rate, with its ledger.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePoint {
    pub d: u64,
    pub m: u64,
    pub length_km: f64,
    pub transmittance: f64,
    pub p_c: f64,
    pub p_e: f64,
    /// `1 − (1 − p)^m`
    pub sift: f64,
    /// `−log₂ P_guess(m)`
    pub hmin_bits: f64,
    /// `H(X|Y)`
    pub hxy_bits: f64,
    /// `max(0, sift · hmin − H(X|Y))` in bits per channel use.
    pub key_rate: f64,
}

/// Upper bound on Eve's guessing probability with `m` copies, clamped to
/// `[1/2, 1]`.
pub fn guessing_probability(d: u64, m: u64, source: BoundsSource) -> Result<f64> {
    if d < 2 {
        return Err(out_of_range("d", d, "≥ 2"));
    }
    if m == 0 {
        return Err(out_of_range("m", m, "≥ 1"));
    }
    match source {
        BoundsSource::Paper if m == 1 => Ok(security::pguess_single_paper(d as f64)),
        BoundsSource::Paper => Ok(security::pguess_multi_paper(d as f64, m)),
        BoundsSource::Certified => {
            let lambda = security::lambda_numeric_cached(d)?;
            Ok(security::pguess_certified(lambda, m))
        }
    }
}

/// Secret-key rate per channel use,
/// `K = max(0, (1 − (1 − T·η)^m)·(−log₂ P_guess(m)) − H(X|Y))`.
pub fn key_rate(
    d: u64,
    m: u64,
    chan: &ChannelModel,
    det: &DetectorModel,
    source: BoundsSource,
    opts: &RateOptions,
) -> Result<RatePoint> {
    let t = chan.transmittance();
    let pguess = guessing_probability(d, m, source)?;
    let stats = detection_stats(t, det, m, opts.detection)?;
    if !(0.0..=1.0).contains(&stats.p_c) || !(0.0..=1.0).contains(&stats.p_e) {
        return Err(Error::Degenerate(format!(
            "p_c = {}, p_e = {} are not probabilities in {:?} mode",
            stats.p_c, stats.p_e, opts.detection
        )));
    }
    let survive = match opts.sift {
        SiftModel::TransmittanceTimesEfficiency => t * det.efficiency,
        SiftModel::TransmittanceOnly => t,
    };
    // 1 − (1 − p)^m without cancellation at tiny p
    let sift = if survive >= 1.0 {
        1.0
    } else {
        -(m as f64 * (-survive).ln_1p()).exp_m1()
    };
    let hmin = -pguess.log2();
    let hxy = conditional_entropy_xy(stats.p_c, stats.p_e, det.detectors);
    Ok(RatePoint {
        d,
        m,
        length_km: chan.length_km,
        transmittance: t,
        p_c: stats.p_c,
        p_e: stats.p_e,
        sift,
        hmin_bits: hmin,
        hxy_bits: hxy,
        key_rate: (sift * hmin - hxy).max(0.0),
    })
}

/// Largest mean photon number with `μ + 4√μ ≤ √d`: `(√(4 + √d) − 2)²`.
pub fn coherent_mu_max(d: f64) -> f64 {
    ((4.0 + d.sqrt()).sqrt() - 2.0).powi(2)
}

/// Copy counts [`optimize_m`] tries: `1 ..= max(1, ⌊μ_max(d)⌋)`.
pub fn m_scan_range(d: u64) -> std::ops::RangeInclusive<u64> {
    1..=(coherent_mu_max(d as f64).floor() as u64).max(1)
}

/// Scans [`m_scan_range`] and returns the best point, ties going to the
/// smaller `m`.
pub fn optimize_m(
    d: u64,
    chan: &ChannelModel,
    det: &DetectorModel,
    source: BoundsSource,
    opts: &RateOptions,
) -> Result<RatePoint> {
    let mut best = key_rate(d, 1, chan, det, source, opts)?;
    for m in m_scan_range(d).skip(1) {
        let p = key_rate(d, m, chan, det, source, opts)?;
        if p.key_rate > best.key_rate {
            best = p;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceResult {
    pub length_km: f64,
    /// The rate is still positive at the cap.
    pub saturated: bool,
}

/// Largest distance with a positive optimised rate, by bisection to
/// [`DISTANCE_RESOLUTION_KM`]. Relies on the optimised rate being
/// non-increasing in distance.
pub fn max_distance(
    d: u64,
    det: &DetectorModel,
    attenuation_db_per_km: f64,
    source: BoundsSource,
    opts: &RateOptions,
) -> Result<DistanceResult> {
    let positive = |l: f64| -> Result<bool> {
        let chan = ChannelModel::new(l, attenuation_db_per_km)?;
        Ok(optimize_m(d, &chan, det, source, opts)?.key_rate > 0.0)
    };
    if !positive(0.0)? {
        return Ok(DistanceResult {
            length_km: 0.0,
            saturated: false,
        });
    }
    let cap = opts.l_cap_km;
    if positive(cap)? {
        return Ok(DistanceResult {
            length_km: cap,
            saturated: true,
        });
    }
    let (mut lo, mut hi) = (0.0f64, cap);
    while hi - lo > DISTANCE_RESOLUTION_KM {
        let mid = 0.5 * (lo + hi);
        if positive(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(DistanceResult {
        length_km: lo,
        saturated: false,
    })
}
