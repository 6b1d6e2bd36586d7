//! Lossy-channel and threshold-detector model, Bob's conditional entropy and
//! the secret-key rate as a function of distance.

mod detection;
mod rate;
mod sweep;

pub use detection::{
    conditional_entropy_xy, detection_stats, poisson_detection_stats, DetectionMode,
    DetectionStats,
};
pub use rate::{
    coherent_mu_max, guessing_probability, key_rate, m_scan_range, max_distance, optimize_m, BoundsSource,
    DistanceResult, RateOptions, RatePoint, SiftModel, DEFAULT_L_CAP_KM, DISTANCE_RESOLUTION_KM,
};
pub use sweep::{sweep, write_sweep_csv, SweepRow, SWEEP_CSV_HEADER};

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{out_of_range, Error, Result};

/// Standard single-mode fibre loss in dB/km.
pub const DEFAULT_ATTENUATION_DB_PER_KM: f64 = 0.2;

/// `T = 10^{−αL/10}`.
pub fn transmittance(length_km: f64, attenuation_db_per_km: f64) -> Result<f64> {
    if !(length_km >= 0.0) {
        return Err(out_of_range("L", length_km, "≥ 0 km"));
    }
    if !(attenuation_db_per_km > 0.0) {
        return Err(out_of_range("alpha", attenuation_db_per_km, "> 0 dB/km"));
    }
    Ok(10f64.powf(-attenuation_db_per_km * length_km / 10.0))
}

/// A pure-loss fibre link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelModel {
    pub attenuation_db_per_km: f64,
    pub length_km: f64,
}

impl ChannelModel {
    pub fn new(length_km: f64, attenuation_db_per_km: f64) -> Result<Self> {
        transmittance(length_km, attenuation_db_per_km)?;
        Ok(Self {
            attenuation_db_per_km,
            length_km,
        })
    }

    pub fn fiber(length_km: f64) -> Result<Self> {
        Self::new(length_km, DEFAULT_ATTENUATION_DB_PER_KM)
    }

    /// Same attenuation, different length.
    pub fn at(&self, length_km: f64) -> Result<Self> {
        Self::new(length_km, self.attenuation_db_per_km)
    }

    pub fn transmittance(&self) -> f64 {
        10f64.powf(-self.attenuation_db_per_km * self.length_km / 10.0)
    }
}

/// Threshold detectors behind Bob's two-outcome measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectorModel {
    /// η ∈ (0, 1]
    pub efficiency: f64,
    /// V ∈ (0, 1]: probability that an arriving photon lands in the
    /// detector matching the encoded bit.
    pub visibility: f64,
    /// Dark-count probability per detector per gate, in [0, 1).
    pub dark_count: f64,
    /// Number of detectors; 2 for this protocol.
    pub detectors: u32,
}

impl DetectorModel {
    pub fn new(efficiency: f64, visibility: f64, dark_count: f64) -> Result<Self> {
        Self::with_detectors(efficiency, visibility, dark_count, 2)
    }

    pub fn with_detectors(
        efficiency: f64,
        visibility: f64,
        dark_count: f64,
        detectors: u32,
    ) -> Result<Self> {
        if !(efficiency > 0.0 && efficiency <= 1.0) {
            return Err(out_of_range("eta", efficiency, "(0, 1]"));
        }
        if !(visibility > 0.0 && visibility <= 1.0) {
            return Err(out_of_range("visibility", visibility, "(0, 1]"));
        }
        if !(0.0..1.0).contains(&dark_count) {
            return Err(out_of_range("p_dark", dark_count, "[0, 1)"));
        }
        if detectors < 2 {
            return Err(out_of_range("detectors", detectors, "≥ 2"));
        }
        Ok(Self {
            efficiency,
            visibility,
            dark_count,
            detectors,
        })
    }

    pub fn perfect() -> Self {
        Self {
            efficiency: 1.0,
            visibility: 1.0,
            dark_count: 0.0,
            detectors: 2,
        }
    }
}

/// Named detector presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum DetectorProfile {
    /// Superconducting nanowire detectors in a lab setting: η = 0.66,
    /// p_dark = 1e-8, V = 0.995.
    SnspdLab,
    /// Stand-in for field InGaAs avalanche detectors: η = 0.20,
    /// p_dark = 1e-5, V = 0.99. These are typical values, not measured ones.
    IngaasField,
}

impl DetectorProfile {
    pub const ALL: [DetectorProfile; 2] = [DetectorProfile::SnspdLab, DetectorProfile::IngaasField];

    pub fn name(self) -> &'static str {
        match self {
            DetectorProfile::SnspdLab => "snspd_lab",
            DetectorProfile::IngaasField => "ingaas_field",
        }
    }

    pub fn detector(self) -> DetectorModel {
        match self {
            DetectorProfile::SnspdLab => DetectorModel {
                efficiency: 0.66,
                visibility: 0.995,
                dark_count: 1e-8,
                detectors: 2,
            },
            DetectorProfile::IngaasField => DetectorModel {
                efficiency: 0.20,
                visibility: 0.99,
                dark_count: 1e-5,
                detectors: 2,
            },
        }
    }
}

impl fmt::Display for DetectorProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DetectorProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| out_of_range("profile", s, "snspd_lab | ingaas_field"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transmittance_examples() {
        assert_eq!(transmittance(0.0, 0.2).unwrap(), 1.0);
        assert!((transmittance(50.0, 0.2).unwrap() - 0.1).abs() < 1e-15);
        assert!((transmittance(100.0, 0.2).unwrap() - 0.01).abs() < 1e-15);
        assert!(transmittance(-1.0, 0.2).is_err());
        assert!(transmittance(1.0, 0.0).is_err());
    }

    #[test]
    fn transmittance_multiplicative() {
        for (a, b) in [(0.0, 3.0), (12.5, 40.0), (100.0, 250.0), (3.3, 0.7)] {
            let lhs = transmittance(a + b, 0.2).unwrap();
            let rhs = transmittance(a, 0.2).unwrap() * transmittance(b, 0.2).unwrap();
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn detector_validation_and_presets() {
        assert!(DetectorModel::new(0.0, 1.0, 0.0).is_err());
        assert!(DetectorModel::new(0.5, 1.1, 0.0).is_err());
        assert!(DetectorModel::new(0.5, 1.0, 1.0).is_err());
        assert!(DetectorModel::with_detectors(0.5, 1.0, 0.0, 1).is_err());
        for p in DetectorProfile::ALL {
            assert_eq!(p.name().parse::<DetectorProfile>().unwrap(), p);
            let d = p.detector();
            assert!(DetectorModel::new(d.efficiency, d.visibility, d.dark_count).is_ok());
        }
        assert!("apd".parse::<DetectorProfile>().is_err());
    }
}
