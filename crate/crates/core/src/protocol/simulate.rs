//! Monte Carlo realisation of the quantum-communication phase.
//!
//! Per round Alice draws `(x, r, θ)` uniformly, the basis string travels
//! under the timelock, and every copy of `|e^θ_{i_xr}⟩` independently
//! survives fibre and detector with probability `T·η`. An arriving photon
//! fires the detector of Bob's ideal outcome with probability `V` and the
//! other one otherwise; each detector also fires on a dark count with
//! probability `p_dark`. A single firing detector gives the outcome, two
//! firing detectors are resolved by a fair coin, and no firing at all is an
//! erasure that sifting discards.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use super::qch::{timelock_reveal, TimelockEnvelope, View};
use super::{prob_outcome_zero, EncodingIndex};
use crate::error::{out_of_range, Error, Result};
use crate::mub::{Dimension, MubFamily};
use crate::ratemodel::{conditional_entropy_xy, ChannelModel, DetectorModel};

/// Photons (copies) sent per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PhotonStatistics {
    Fixed(u64),
    /// Coherent source with mean photon number `μ`.
    Poisson(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProtocolParams {
    pub dim: Dimension,
    pub photons: PhotonStatistics,
    pub n_rounds: usize,
    pub channel: ChannelModel,
    pub detector: DetectorModel,
    pub seed: u64,
    /// Skip the `μ + 4√μ ≤ √d` check for coherent sources.
    pub allow_unsafe_mu: bool,
}

impl ProtocolParams {
    pub fn new(
        dim: Dimension,
        photons: PhotonStatistics,
        n_rounds: usize,
        channel: ChannelModel,
        detector: DetectorModel,
        seed: u64,
    ) -> Result<Self> {
        let p = Self {
            dim,
            photons,
            n_rounds,
            channel,
            detector,
            seed,
            allow_unsafe_mu: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_rounds == 0 {
            return Err(out_of_range("n_rounds", 0, "≥ 1"));
        }
        match self.photons {
            PhotonStatistics::Fixed(0) => Err(out_of_range("m", 0, "≥ 1")),
            PhotonStatistics::Fixed(_) => Ok(()),
            PhotonStatistics::Poisson(mu) if !(mu > 0.0 && mu.is_finite()) => {
                Err(out_of_range("mu", mu, "> 0"))
            }
            PhotonStatistics::Poisson(mu) => {
                let root_d = (self.dim.d() as f64).sqrt();
                if !self.allow_unsafe_mu && mu + 4.0 * mu.sqrt() > root_d {
                    Err(Error::Constraint(format!(
                        "mean photon number {mu} violates μ + 4√μ ≤ √d = {root_d}"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Bit(u8),
    Erasure,
}

impl Outcome {
    /// CSV code: the bit, or −1 for an erasure.
    pub fn code(self) -> i8 {
        match self {
            Outcome::Bit(b) => b as i8,
            Outcome::Erasure => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RoundRecord {
    pub x: u8,
    pub r: u32,
    pub theta: u32,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TranscriptStats {
    pub rounds: usize,
    pub clicks: usize,
    pub errors: usize,
    pub click_rate: f64,
    /// Fraction of click rounds decoded correctly; 0 without clicks.
    pub p_c: f64,
    pub p_e: f64,
    /// Empirical `H(X|Y)` over click rounds, in bits.
    pub hxy_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolTranscript {
    pub records: Vec<RoundRecord>,
    pub alice_sifted: Vec<u8>,
    pub bob_sifted: Vec<u8>,
    pub stats: TranscriptStats,
}

impl ProtocolTranscript {
    fn from_records(records: Vec<RoundRecord>) -> Self {
        let mut alice = Vec::new();
        let mut bob = Vec::new();
        for rec in &records {
            if let Outcome::Bit(y) = rec.outcome {
                alice.push(rec.x);
                bob.push(y);
            }
        }
        let rounds = records.len();
        let clicks = alice.len();
        let errors = alice.iter().zip(&bob).filter(|(a, b)| a != b).count();
        let (p_c, p_e) = if clicks == 0 {
            (0.0, 0.0)
        } else {
            let e = errors as f64 / clicks as f64;
            (1.0 - e, e)
        };
        let stats = TranscriptStats {
            rounds,
            clicks,
            errors,
            click_rate: clicks as f64 / rounds.max(1) as f64,
            p_c,
            p_e,
            hxy_bits: if clicks == 0 { 0.0 } else { conditional_entropy_xy(p_c, p_e, 2) },
        };
        Self {
            records,
            alice_sifted: alice,
            bob_sifted: bob,
            stats,
        }
    }

    /// `round,x,r,theta,outcome` rows; outcome −1 marks an erasure.
    pub fn write_csv<W: Write>(&self, comment: Option<&str>, mut out: W) -> io::Result<()> {
        if let Some(c) = comment {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "round,x,r,theta,outcome")?;
        for (i, rec) in self.records.iter().enumerate() {
            writeln!(out, "{i},{},{},{},{}", rec.x, rec.r, rec.theta, rec.outcome.code())?;
        }
        Ok(())
    }
}

/// Alice's side of a run: the encoded rounds and the probability that an
/// arriving photon lands in the detector matching `x`.
struct Prepared {
    indices: Vec<EncodingIndex>,
    p_good: Vec<f64>,
}

fn prepare(params: &ProtocolParams, family: &MubFamily) -> Result<Prepared> {
    params.validate()?;
    if family.dim() != params.dim {
        return Err(Error::DimensionMismatch {
            expected: params.dim.d(),
            found: family.d(),
        });
    }
    let dim = params.dim;
    let mut rng = stream(params.seed, 0);
    let mut indices = Vec::with_capacity(params.n_rounds);
    for _ in 0..params.n_rounds {
        let x = rng.random_range(0..2u8);
        let r = rng.random_range(0..dim.half());
        let theta = rng.random_range(0..dim.num_bases());
        indices.push(EncodingIndex::new(x, r, theta, dim)?);
    }

    // θⁿ goes out under the timelock; Bob holds the key and opens it at once.
    let envelope = TimelockEnvelope::new(
        indices.iter().map(|i| i.theta()).collect::<Vec<_>>(),
        0,
        u64::MAX,
    );
    let bob_bases = timelock_reveal(&envelope, 0, View::Authorized)
        .payload()
        .expect("authorized view always opens")
        .clone();

    let v = params.detector.visibility;
    let mut p_good = Vec::with_capacity(indices.len());
    for (idx, &theta_bob) in indices.iter().zip(&bob_bases) {
        let state = family.basis_state(idx.theta(), idx.vector_index())?;
        let p0 = prob_outcome_zero(theta_bob, &state, family)?;
        let ideal = if idx.x() == 0 { p0 } else { 1.0 - p0 };
        p_good.push(v * ideal + (1.0 - v) * (1.0 - ideal));
    }
    Ok(Prepared { indices, p_good })
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

enum Copies {
    Fixed(u64),
    Poisson(Poisson<f64>),
}

impl Copies {
    fn new(photons: PhotonStatistics, share: u64) -> Result<Self> {
        Ok(match photons {
            PhotonStatistics::Fixed(m) => Copies::Fixed(m / share),
            PhotonStatistics::Poisson(mu) => Copies::Poisson(
                Poisson::new(mu / share as f64).map_err(|e| out_of_range("mu", mu, e.to_string()))?,
            ),
        })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> u64 {
        match self {
            Copies::Fixed(m) => *m,
            Copies::Poisson(p) => p.sample(rng) as u64,
        }
    }
}

/// One receiver's view of the prepared rounds, on its own RNG stream.
fn receive(
    prep: &Prepared,
    copies: &Copies,
    channel: &ChannelModel,
    det: &DetectorModel,
    rng: &mut ChaCha8Rng,
) -> ProtocolTranscript {
    let survive = channel.transmittance() * det.efficiency;
    let pd = det.dark_count;
    let records = prep
        .indices
        .iter()
        .zip(&prep.p_good)
        .map(|(idx, &p_good)| {
            let n = copies.sample(rng);
            let (mut good_hits, mut bad_hits) = (0u64, 0u64);
            for _ in 0..n {
                if rng.random::<f64>() < survive {
                    if rng.random::<f64>() < p_good {
                        good_hits += 1;
                    } else {
                        bad_hits += 1;
                    }
                }
            }
            let good_dark = rng.random::<f64>() < pd;
            let bad_dark = rng.random::<f64>() < pd;
            let good = good_hits > 0 || good_dark;
            let bad = bad_hits > 0 || bad_dark;
            let x = idx.x();
            let outcome = match (good, bad) {
                (false, false) => Outcome::Erasure,
                (true, false) => Outcome::Bit(x),
                (false, true) => Outcome::Bit(1 - x),
                (true, true) => Outcome::Bit(rng.random_range(0..2u8)),
            };
            RoundRecord {
                x,
                r: idx.r() as u32,
                theta: idx.theta() as u32,
                outcome,
            }
        })
        .collect();
    ProtocolTranscript::from_records(records)
}

/// Runs the protocol between Alice and one Bob. Bit-reproducible for a
/// given seed.
pub fn run_protocol(params: &ProtocolParams, family: &MubFamily) -> Result<ProtocolTranscript> {
    let prep = prepare(params, family)?;
    let copies = Copies::new(params.photons, 1)?;
    let mut rng = stream(params.seed, 1);
    Ok(receive(&prep, &copies, &params.channel, &params.detector, &mut rng))
}

/// Splits Alice's copies among `parties` receivers who share her basis
/// secret. Each receives `⌊m/parties⌋` copies (or a Poisson share `μ/parties`)
/// through an independent channel and detector realisation.
pub fn multiparty_run(
    params: &ProtocolParams,
    family: &MubFamily,
    parties: usize,
) -> Result<Vec<ProtocolTranscript>> {
    let cap = (params.dim.d() as f64).sqrt().floor() as usize;
    if parties == 0 || parties > cap {
        return Err(Error::Constraint(format!(
            "{parties} parties requested; at most ⌊√d⌋ = {cap} parties can share d = {}",
            params.dim.d()
        )));
    }
    if let PhotonStatistics::Fixed(m) = params.photons {
        if m / (parties as u64) == 0 {
            return Err(Error::Constraint(format!(
                "{m} copies cannot give each of {parties} parties at least one"
            )));
        }
    }
    let prep = prepare(params, family)?;
    let copies = Copies::new(params.photons, parties as u64)?;
    Ok((0..parties)
        .map(|p| {
            let mut rng = stream(params.seed, 1 + p as u64);
            receive(&prep, &copies, &params.channel, &params.detector, &mut rng)
        })
        .collect())
}
