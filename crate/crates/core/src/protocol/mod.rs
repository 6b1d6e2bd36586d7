//! Protocol mechanics: encoding a bit into a basis vector, Bob's two-outcome
//! measurement, the hybrid-model oracles, Monte Carlo runs and privacy
//! amplification.

mod privacy;
mod qch;
mod simulate;

pub use privacy::privacy_amplify;
pub use qch::{decohere, timelock_reveal, QchClock, Reveal, TimelockEnvelope, View};
pub use simulate::{
    multiparty_run, run_protocol, Outcome, PhotonStatistics, ProtocolParams, ProtocolTranscript,
    RoundRecord, TranscriptStats,
};

use serde::Serialize;

use crate::error::{out_of_range, Error, Result};
use crate::linalg::{projector, CMatrix, CVector};
use crate::mub::{Dimension, MubFamily};

/// The classical labels of one prepared state: key bit `x`, local
/// randomness `r ∈ [d/2]` and basis `θ ∈ [d+1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct EncodingIndex {
    x: u8,
    r: usize,
    theta: usize,
    dim: Dimension,
}

impl EncodingIndex {
    pub fn new(x: u8, r: usize, theta: usize, dim: Dimension) -> Result<Self> {
        if x > 1 {
            return Err(out_of_range("x", x, "0 or 1"));
        }
        if r >= dim.half() {
            return Err(out_of_range("r", r, format!("0..{}", dim.half())));
        }
        if theta >= dim.num_bases() {
            return Err(out_of_range("theta", theta, format!("0..{}", dim.num_bases())));
        }
        Ok(Self { x, r, theta, dim })
    }

    pub fn x(&self) -> u8 {
        self.x
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn theta(&self) -> usize {
        self.theta
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    /// Index of the basis vector carrying this state, `(d/2)·x + r`.
    pub fn vector_index(&self) -> usize {
        self.dim.half() * self.x as usize + self.r
    }
}

/// `i_xr = (d/2)·x + r`.
pub fn encode_index(x: u8, r: usize, dim: Dimension) -> Result<usize> {
    if x > 1 {
        return Err(out_of_range("x", x, "0 or 1"));
    }
    if r >= dim.half() {
        return Err(out_of_range("r", r, format!("0..{}", dim.half())));
    }
    Ok(dim.half() * x as usize + r)
}

/// The pure state `|e^θ_{i_xr}⟩`.
pub fn prepare_state(idx: &EncodingIndex, family: &MubFamily) -> Result<CVector> {
    if idx.dim() != family.dim() {
        return Err(Error::DimensionMismatch {
            expected: family.d(),
            found: idx.dim().d(),
        });
    }
    family.basis_state(idx.theta(), idx.vector_index())
}

/// Bob's measurement for basis `θ`: `M₀` projects onto the first `d/2`
/// vectors of the basis and `M₁` onto the rest.
pub fn bob_povm(theta: usize, family: &MubFamily) -> Result<(CMatrix, CMatrix)> {
    let basis = family.basis(theta)?;
    let d = family.d();
    let half = d / 2;
    let mut m0 = CMatrix::zeros(d, d);
    let mut m1 = CMatrix::zeros(d, d);
    for j in 0..d {
        let p = projector(&basis.column(j).into_owned());
        if j < half {
            m0 += p;
        } else {
            m1 += p;
        }
    }
    Ok((m0, m1))
}

/// Probability that Bob's `θ` measurement of `state` yields outcome 0.
///
/// Evaluates `⟨ψ|M₀|ψ⟩` as the weight of `ψ` on the first half of the basis,
/// which costs `O(d²)` instead of forming the projector.
pub fn prob_outcome_zero(theta: usize, state: &CVector, family: &MubFamily) -> Result<f64> {
    let basis = family.basis(theta)?;
    if state.len() != family.d() {
        return Err(Error::DimensionMismatch {
            expected: family.d(),
            found: state.len(),
        });
    }
    let half = family.d() / 2;
    Ok((0..half)
        .map(|j| basis.column(j).dotc(state).norm_sqr())
        .sum::<f64>()
        .clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::mub::build_mub_family;

    #[test]
    fn encode_index_examples() {
        let d4 = Dimension::from_d(4).unwrap();
        let d8 = Dimension::from_d(8).unwrap();
        assert_eq!(encode_index(0, 0, d4).unwrap(), 0);
        assert_eq!(encode_index(1, 0, d4).unwrap(), 2);
        assert_eq!(encode_index(1, 3, d8).unwrap(), 7);
        assert!(encode_index(0, 2, d4).is_err());
        assert!(encode_index(2, 0, d4).is_err());
    }

    #[test]
    fn encoding_index_invariants() {
        let dim = Dimension::from_d(8).unwrap();
        for x in 0..2u8 {
            for r in 0..4 {
                let idx = EncodingIndex::new(x, r, 0, dim).unwrap();
                assert!(idx.vector_index() < 8);
                assert_eq!(x == 0, idx.vector_index() < 4);
            }
        }
        assert!(EncodingIndex::new(0, 0, 9, dim).is_err());
    }

    #[test]
    fn prepared_states() {
        let f = build_mub_family(3).unwrap();
        let dim = f.dim();
        let e0 = prepare_state(&EncodingIndex::new(0, 0, 0, dim).unwrap(), &f).unwrap();
        assert_eq!(e0, f.basis_state(0, 0).unwrap());
        for theta in 0..f.num_bases() {
            for (x, r) in [(0u8, 0usize), (0, 3), (1, 1)] {
                let a = prepare_state(&EncodingIndex::new(x, r, theta, dim).unwrap(), &f).unwrap();
                assert!((a.norm() - 1.0).abs() < 1e-12);
                for (x2, r2) in [(0u8, 0usize), (0, 3), (1, 1)] {
                    let b = prepare_state(&EncodingIndex::new(x2, r2, theta, dim).unwrap(), &f).unwrap();
                    let expect = if (x, r) == (x2, r2) { 1.0 } else { 0.0 };
                    assert!((a.dotc(&b).norm() - expect).abs() < 1e-12);
                }
            }
        }
        let other = build_mub_family(2).unwrap();
        assert!(prepare_state(&EncodingIndex::new(0, 0, 0, dim).unwrap(), &other).is_err());
    }

    #[test]
    fn povm_complete_and_decodes() {
        let f = build_mub_family(3).unwrap();
        let d = f.d();
        for theta in 0..f.num_bases() {
            let (m0, m1) = bob_povm(theta, &f).unwrap();
            assert!(max_abs_diff(&(&m0 + &m1), &CMatrix::identity(d, d)) < 1e-9);
            for x in 0..2u8 {
                let idx = EncodingIndex::new(x, 1, theta, f.dim()).unwrap();
                let rho = projector(&prepare_state(&idx, &f).unwrap());
                let mx = if x == 0 { &m0 } else { &m1 };
                assert!(((mx * &rho).trace().re - 1.0).abs() < 1e-12);
                // mismatched basis
                let other = (theta + 1) % f.num_bases();
                let (n0, _) = bob_povm(other, &f).unwrap();
                assert!(((n0 * &rho).trace().re - 0.5).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn fast_outcome_probability_matches_povm() {
        let f = build_mub_family(2).unwrap();
        for theta in 0..5 {
            let (m0, _) = bob_povm(theta, &f).unwrap();
            for t2 in 0..5 {
                for i in 0..4 {
                    let v = f.basis_state(t2, i).unwrap();
                    let slow = (&m0 * projector(&v)).trace().re;
                    let fast = prob_outcome_zero(theta, &v, &f).unwrap();
                    assert!((slow - fast).abs() < 1e-12);
                }
            }
        }
    }
}
