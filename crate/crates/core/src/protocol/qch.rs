//! Idealised oracles for the two assumptions of the hybrid security model:
//! encryption that stays locked until `t_comp`, and quantum storage that
//! decoheres by `t_coh < t_comp`.

use serde::Serialize;

use crate::error::{out_of_range, Error, Result};
use crate::linalg::{hermiticity_defect, hermitian_eigenvalues, CMatrix};

/// Abstract clock ticks.
pub type Tick = u64;

/// The two time scales of the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QchClock {
    t_coh: Tick,
    t_comp: Tick,
}

impl QchClock {
    pub fn new(t_coh: Tick, t_comp: Tick) -> Result<Self> {
        if t_coh >= t_comp {
            return Err(Error::Constraint(format!(
                "coherence time {t_coh} must be shorter than the encryption lifetime {t_comp}"
            )));
        }
        Ok(Self { t_coh, t_comp })
    }

    pub fn t_coh(&self) -> Tick {
        self.t_coh
    }

    pub fn t_comp(&self) -> Tick {
        self.t_comp
    }

    /// Seals `payload` at `now`; it unlocks for the adversary at
    /// `now + t_comp`.
    pub fn seal<T>(&self, payload: T, now: Tick) -> TimelockEnvelope<T> {
        TimelockEnvelope::new(payload, now, now.saturating_add(self.t_comp))
    }

    /// Whether a state stored at `stored_at` still holds anything at `now`.
    pub fn memory_alive(&self, stored_at: Tick, now: Tick) -> bool {
        now < stored_at.saturating_add(self.t_coh)
    }
}

/// A payload under short-term encryption. The holder of the short key reads
/// it at once; anyone else only after `unlock_time`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TimelockEnvelope<T> {
    payload: T,
    created_at: Tick,
    unlock_time: Tick,
}

impl<T> TimelockEnvelope<T> {
    pub fn new(payload: T, created_at: Tick, unlock_time: Tick) -> Self {
        Self {
            payload,
            created_at,
            unlock_time,
        }
    }

    pub fn created_at(&self) -> Tick {
        self.created_at
    }

    pub fn unlock_time(&self) -> Tick {
        self.unlock_time
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum View {
    Authorized,
    Adversary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reveal<'a, T> {
    Payload(&'a T),
    Locked,
}

impl<'a, T> Reveal<'a, T> {
    pub fn payload(self) -> Option<&'a T> {
        match self {
            Reveal::Payload(p) => Some(p),
            Reveal::Locked => None,
        }
    }
}

pub fn timelock_reveal<T>(env: &TimelockEnvelope<T>, now: Tick, view: View) -> Reveal<'_, T> {
    match view {
        View::Authorized => Reveal::Payload(&env.payload),
        View::Adversary if now >= env.unlock_time => Reveal::Payload(&env.payload),
        View::Adversary => Reveal::Locked,
    }
}

const STATE_TOL: f64 = 1e-9;

/// Depolarising storage noise `ρ ↦ (1 − δ)ρ + δ·I/d`.
pub fn decohere(rho: &CMatrix, delta: f64) -> Result<CMatrix> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(out_of_range("delta", delta, "[0, 1]"));
    }
    check_density_matrix(rho)?;
    let d = rho.nrows();
    let mixed = CMatrix::identity(d, d).scale(delta / d as f64);
    Ok(rho.scale(1.0 - delta) + mixed)
}

pub(crate) fn check_density_matrix(rho: &CMatrix) -> Result<()> {
    if rho.nrows() != rho.ncols() || rho.nrows() == 0 {
        return Err(Error::Malformed("density matrix must be square".into()));
    }
    let herm = hermiticity_defect(rho);
    if herm > STATE_TOL {
        return Err(Error::Malformed(format!("not Hermitian (defect {herm:e})")));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
        return Err(Error::Malformed(format!("trace {tr} ≠ 1")));
    }
    let min = hermitian_eigenvalues(rho)[0];
    if min < -STATE_TOL {
        return Err(Error::Malformed(format!("negative eigenvalue {min:e}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, projector};
    use crate::mub::build_mub_family;
    use num_complex::Complex64;

    #[test]
    fn timelock_views() {
        let env = TimelockEnvelope::new(vec![3u32, 1, 4], 0, 100);
        assert_eq!(timelock_reveal(&env, 99, View::Adversary), Reveal::Locked);
        assert_eq!(timelock_reveal(&env, 100, View::Adversary).payload(), Some(&vec![3, 1, 4]));
        for now in [0, 50, 99, 100, 10_000] {
            assert!(timelock_reveal(&env, now, View::Authorized).payload().is_some());
        }
    }

    #[test]
    fn clock_ordering() {
        assert!(QchClock::new(10, 10).is_err());
        let clock = QchClock::new(10, 1000).unwrap();
        let env = clock.seal("bases", 5);
        assert_eq!(env.unlock_time(), 1005);
        // by the time the payload unlocks, anything stored at seal time is gone
        assert!(!clock.memory_alive(env.created_at(), env.unlock_time()));
        assert!(clock.memory_alive(5, 14));
    }

    fn sample_state() -> CMatrix {
        let f = build_mub_family(2).unwrap();
        let a = projector(&f.basis_state(1, 0).unwrap()).scale(0.7);
        let b = projector(&f.basis_state(3, 2).unwrap()).scale(0.3);
        a + b
    }

    #[test]
    fn decohere_endpoints() {
        let rho = sample_state();
        assert!(max_abs_diff(&decohere(&rho, 0.0).unwrap(), &rho) < 1e-15);
        let full = decohere(&rho, 1.0).unwrap();
        assert!(max_abs_diff(&full, &CMatrix::identity(4, 4).scale(0.25)) < 1e-15);
    }

    #[test]
    fn decohere_spectral_map() {
        let rho = sample_state();
        let before = hermitian_eigenvalues(&rho);
        for delta in [0.1, 0.5, 0.9] {
            let out = decohere(&rho, delta).unwrap();
            assert!((out.trace().re - 1.0).abs() < 1e-12);
            let after = hermitian_eigenvalues(&out);
            for (b, a) in before.iter().zip(&after) {
                assert!(((1.0 - delta) * b + delta / 4.0 - a).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn decohere_rejects_malformed() {
        let rho = sample_state();
        assert!(decohere(&rho, 1.5).is_err());
        assert!(decohere(&rho.scale(2.0), 0.5).is_err());
        let mut bad = rho.clone();
        bad[(0, 1)] += Complex64::new(0.1, 0.0);
        assert!(decohere(&bad, 0.5).is_err());
        let neg = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(1.5, 0.0),
            Complex64::new(-0.5, 0.0),
        ]));
        assert!(decohere(&neg, 0.5).is_err());
    }
}
