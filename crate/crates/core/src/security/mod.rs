//! Eavesdropper bounds.
//!
//! Eve has to measure before the basis is revealed. With `m` copies her
//! best guess of `x` is bounded through the largest eigenvalue `λ` of the
//! operators `F(Ω)`; this module computes `λ` exactly for small `d`, carries
//! the closed-form bounds alongside, and provides the Helstrom comparison,
//! the projector-sum norm inequality and the storage-noise monotonicity
//! witness.

mod eve;

pub use eve::{
    average_states, helstrom_multi_bound, helstrom_numeric, helstrom_single_closed,
    simulate_eve_random_basis, strategy_monotonicity, MonotonicityReport, HELSTROM_CAP,
};

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{out_of_range, Error, Result};
use crate::linalg::{
    hermiticity_defect, largest_eigenvalue, operator_norm, projector, trace, CMatrix,
};
use crate::mub::{build_mub_family, Dimension, MubFamily};

/// Largest `d` for which `λ` is brute-forced over all `2^{d+1}` strings.
pub const LAMBDA_MAX_D: usize = 16;

const PROJECTOR_TOL: f64 = 1e-9;

/// One measurement outcome bit `ω_θ` per basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OutcomeString {
    bits: Vec<u8>,
}

impl OutcomeString {
    pub fn new(bits: Vec<u8>, dim: Dimension) -> Result<Self> {
        if bits.len() != dim.num_bases() {
            return Err(Error::DimensionMismatch {
                expected: dim.num_bases(),
                found: bits.len(),
            });
        }
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(out_of_range("omega bit", b, "0 or 1"));
        }
        Ok(Self { bits })
    }

    /// Bit `θ` of `index` becomes `ω_θ`.
    pub fn from_index(index: u64, dim: Dimension) -> Result<Self> {
        let n = dim.num_bases();
        if n < 64 && index >> n != 0 {
            return Err(out_of_range("outcome index", index, format!("< 2^{n}")));
        }
        Ok(Self {
            bits: (0..n).map(|t| ((index >> t) & 1) as u8).collect(),
        })
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }
}

/// `(2/d)·Σ_{r} |e^θ_{(d/2)b + r}⟩⟨·|` for every `θ` and `b`.
fn half_projectors(family: &MubFamily) -> Vec<[CMatrix; 2]> {
    let d = family.d();
    let half = d / 2;
    let w = 2.0 / d as f64;
    family
        .bases()
        .iter()
        .map(|basis| {
            let sum = |b: usize| {
                let cols = basis.columns(b * half, half);
                (&cols * cols.adjoint()).scale(w)
            };
            [sum(0), sum(1)]
        })
        .collect()
}

/// `F(Ω) = Σ_θ Σ_r (2/d)·|e^θ_{(d/2)ω_θ + r}⟩⟨·|`.
pub fn f_operator(omega: &OutcomeString, family: &MubFamily) -> Result<CMatrix> {
    if omega.bits.len() != family.num_bases() {
        return Err(Error::DimensionMismatch {
            expected: family.num_bases(),
            found: omega.bits.len(),
        });
    }
    let parts = half_projectors(family);
    Ok(sum_selected(&parts, &omega.bits))
}

fn sum_selected(parts: &[[CMatrix; 2]], bits: &[u8]) -> CMatrix {
    let d = parts[0][0].nrows();
    let mut f = CMatrix::zeros(d, d);
    for (p, &b) in parts.iter().zip(bits) {
        f += &p[b as usize];
    }
    f
}

/// `max_Ω λ_max(F(Ω))` by exhausting all `2^{d+1}` outcome strings.
pub fn lambda_numeric(family: &MubFamily) -> Result<f64> {
    let d = family.d();
    if d > LAMBDA_MAX_D {
        return Err(Error::Capability {
            what: format!("exhaustive λ over 2^{} outcome strings at d = {d}", d + 1),
            cap: format!("d ≤ {LAMBDA_MAX_D}"),
        });
    }
    let parts = half_projectors(family);
    let n = family.num_bases();
    let dim = family.dim();
    let best = (0..1u64 << n)
        .into_par_iter()
        .map(|i| {
            let omega = OutcomeString::from_index(i, dim).expect("index below 2^(d+1)");
            largest_eigenvalue(&sum_selected(&parts, &omega.bits))
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(best)
}

/// [`lambda_numeric`] for the standard family of dimension `d`, memoised.
pub fn lambda_numeric_cached(d: u64) -> Result<f64> {
    static CACHE: OnceLock<Mutex<HashMap<u64, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(&v) = cache.lock().expect("cache poisoned").get(&d) {
        return Ok(v);
    }
    if d as usize > LAMBDA_MAX_D {
        return Err(Error::Capability {
            what: format!("exhaustive λ at d = {d}"),
            cap: format!("d ≤ {LAMBDA_MAX_D}"),
        });
    }
    let dim = Dimension::from_d(d as usize)?;
    let v = lambda_numeric(&build_mub_family(dim.k())?)?;
    cache.lock().expect("cache poisoned").insert(d, v);
    Ok(v)
}

/// Closed-form `λ ≤ 1 + (d(d+1) − 2)/(2d²√d)`.
pub fn lambda_paper_bound(d: f64) -> f64 {
    1.0 + (d * (d + 1.0) - 2.0) / (2.0 * d * d * d.sqrt())
}

/// `(2/d)·(1 + (l − 1)/√d)` with `l = d(d+1)/2`: the projector-sum norm
/// inequality applied to the unscaled projectors of `F(Ω)`.
pub fn lambda_theorem1_ceiling(d: f64) -> f64 {
    let l = d * (d + 1.0) / 2.0;
    (2.0 / d) * (1.0 + (l - 1.0) / d.sqrt())
}

fn check_rank_one_projector(i: usize, p: &CMatrix) -> Result<()> {
    if p.nrows() != p.ncols() {
        return Err(Error::Malformed(format!("operator {i} is not square")));
    }
    let herm = hermiticity_defect(p);
    let tr = trace(p);
    let idem = (p * p - p).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if herm > PROJECTOR_TOL
        || (tr.re - 1.0).abs() > PROJECTOR_TOL
        || tr.im.abs() > PROJECTOR_TOL
        || idem > PROJECTOR_TOL
    {
        return Err(Error::Malformed(format!(
            "operator {i} is not a rank-1 projector (hermiticity {herm:e}, trace {tr}, idempotency {idem:e})"
        )));
    }
    Ok(())
}

fn check_projector_set(projectors: &[CMatrix]) -> Result<()> {
    let Some(first) = projectors.first() else {
        return Err(Error::Malformed("empty projector set".into()));
    };
    for (i, p) in projectors.iter().enumerate() {
        if p.nrows() != first.nrows() {
            return Err(Error::DimensionMismatch {
                expected: first.nrows(),
                found: p.nrows(),
            });
        }
        check_rank_one_projector(i, p)?;
    }
    Ok(())
}

/// `1 + (l − 1)·max_{i≠j} ‖O_i O_j‖` for rank-1 projectors `O_1..O_l`.
pub fn theorem1_bound(projectors: &[CMatrix]) -> Result<f64> {
    check_projector_set(projectors)?;
    let l = projectors.len();
    let mut cos_phi = 0.0f64;
    for i in 0..l {
        for j in 0..l {
            if i != j {
                cos_phi = cos_phi.max(operator_norm(&(&projectors[i] * &projectors[j])));
            }
        }
    }
    Ok(1.0 + (l - 1) as f64 * cos_phi)
}

/// Exact `‖Σ O_i‖`.
pub fn projector_sum_norm(projectors: &[CMatrix]) -> Result<f64> {
    check_projector_set(projectors)?;
    let d = projectors[0].nrows();
    let sum = projectors
        .iter()
        .fold(CMatrix::zeros(d, d), |acc, p| acc + p);
    Ok(largest_eigenvalue(&sum))
}

/// Rank-1 projector onto `v / ‖v‖`.
pub fn normalized_projector(v: &crate::linalg::CVector) -> CMatrix {
    projector(&v.normalize())
}

pub fn clamp_probability(p: f64) -> f64 {
    p.clamp(0.5, 1.0)
}

/// `1/2 + 1/√d − 2/(d(d+1)√d)`, clamped to `[1/2, 1]`.
pub fn pguess_single_paper(d: f64) -> f64 {
    let s = d.sqrt();
    clamp_probability(0.5 + 1.0 / s - 2.0 / (d * (d + 1.0) * s))
}

/// `(1/2)(1 + 2/√d − 4/(d²√d))^m`, clamped to `[1/2, 1]`.
pub fn pguess_multi_paper(d: f64, m: u64) -> f64 {
    let s = d.sqrt();
    let base = 1.0 + 2.0 / s - 4.0 / (d * d * s);
    clamp_probability(0.5 * base.powf(m as f64))
}

/// `λ^m / 2`, clamped to `[1/2, 1]`.
pub fn pguess_certified(lambda: f64, m: u64) -> f64 {
    clamp_probability(0.5 * lambda.powf(m as f64))
}

/// `I_acc ≤ log₂(1 + 2m/√d)`.
pub fn iacc_bound(d: f64, m: u64) -> f64 {
    (2.0 * m as f64 / d.sqrt()).ln_1p() / std::f64::consts::LN_2
}

/// Pinsker: `Δ ≤ √(I_acc/2)`.
pub fn pinsker_delta(iacc: f64) -> Result<f64> {
    if !(iacc >= 0.0) {
        return Err(out_of_range("iacc", iacc, "≥ 0"));
    }
    Ok((iacc / 2.0).sqrt())
}

/// Alicki–Fannes: `I_acc ≤ 2Δ·log₂|X| + η(2Δ)`, `η(p) = −p·log₂ p`.
pub fn alicki_fannes(delta: f64, alphabet_size: u64) -> f64 {
    let p = 2.0 * delta;
    let eta = if p > 0.0 { -p * p.log2() } else { 0.0 };
    p * (alphabet_size as f64).log2() + eta
}

/// Both directions between accessible information and variation distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceBounds {
    pub delta_upper: f64,
    pub alphabet_size: u64,
}

impl DistanceBounds {
    pub fn iacc_upper(&self, delta: f64) -> f64 {
        alicki_fannes(delta, self.alphabet_size)
    }
}

pub fn security_distance_bounds(iacc: f64, alphabet_size: u64) -> Result<DistanceBounds> {
    if alphabet_size < 1 {
        return Err(out_of_range("alphabet_size", alphabet_size, "≥ 1"));
    }
    Ok(DistanceBounds {
        delta_upper: pinsker_delta(iacc)?,
        alphabet_size,
    })
}

/// Every bound for one `(d, m)`, with the exact oracles when enabled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsReport {
    pub d: u64,
    pub m: u64,
    pub lambda_numeric: Option<f64>,
    pub lambda_paper: f64,
    pub pguess_certified: f64,
    pub pguess_paper_single: f64,
    pub pguess_paper_multi: f64,
    pub hmin_bits: f64,
    pub iacc_bits: f64,
    pub helstrom_single: f64,
    pub helstrom_multi_bound: f64,
    pub delta_pinsker: f64,
    pub oracle_used: bool,
}

/// With `oracle` the certified probability uses the exact `λ` and the
/// min-entropy follows it; without, `λ` falls back to the closed form and
/// the min-entropy follows the closed-form guessing probability.
pub fn bounds_report(d: u64, m: u64, oracle: bool) -> Result<BoundsReport> {
    if d < 2 {
        return Err(out_of_range("d", d, "≥ 2"));
    }
    if m == 0 {
        return Err(out_of_range("m", m, "≥ 1"));
    }
    let df = d as f64;
    let lambda_paper = lambda_paper_bound(df);
    let pguess_paper_single = pguess_single_paper(df);
    let pguess_paper_multi = pguess_multi_paper(df, m);
    let paper_in_effect = if m == 1 {
        pguess_paper_single
    } else {
        pguess_paper_multi
    };
    let iacc_bits = iacc_bound(df, m);

    let (lambda_numeric, pguess_certified, hmin_source, helstrom_single) = if oracle {
        let lambda = lambda_numeric_cached(d)?;
        let family = build_mub_family(Dimension::from_d(d as usize)?.k())?;
        let cert = pguess_certified(lambda, m);
        (Some(lambda), cert, cert, helstrom_numeric(&family, 1)?)
    } else {
        (
            None,
            pguess_certified(lambda_paper, m),
            paper_in_effect,
            helstrom_single_closed(df),
        )
    };

    Ok(BoundsReport {
        d,
        m,
        lambda_numeric,
        lambda_paper,
        pguess_certified,
        pguess_paper_single,
        pguess_paper_multi,
        hmin_bits: (-hmin_source.log2()).max(0.0),
        iacc_bits,
        helstrom_single,
        helstrom_multi_bound: helstrom_multi_bound(df, m),
        delta_pinsker: pinsker_delta(iacc_bits)?,
        oracle_used: oracle,
    })
}
