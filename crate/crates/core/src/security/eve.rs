//! Discrimination of the two key-bit states: Helstrom optimum, an explicit
//! achievable attack and the effect of storage noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{out_of_range, Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, max_abs_diff, tensor_power, trace_norm_hermitian, CMatrix,
};
use crate::mub::MubFamily;
use crate::protocol::decohere;

/// Largest `d^m` for which the Helstrom probability is computed exactly.
pub const HELSTROM_CAP: usize = 4096;

const COMMUTE_TOL: f64 = 1e-10;

/// `ρ_x = (1/(|r||θ|))·Σ_{r,θ} |e^θ_{i_xr}⟩⟨·|` for `x = 0, 1`.
pub fn average_states(family: &MubFamily) -> (CMatrix, CMatrix) {
    let d = family.d();
    let half = d / 2;
    let w = 1.0 / (half * family.num_bases()) as f64;
    let mut rho = [CMatrix::zeros(d, d), CMatrix::zeros(d, d)];
    for basis in family.bases() {
        for (x, r) in rho.iter_mut().enumerate() {
            let cols = basis.columns(x * half, half);
            *r += (&cols * cols.adjoint()).scale(w);
        }
    }
    let [r0, r1] = rho;
    (r0, r1)
}

/// `1/2·(1 + ‖ρ₀^{⊗m} − ρ₁^{⊗m}‖₁/2)`.
///
/// `ρ₀ + ρ₁ = (2/d)·I`, so the two states share an eigenbasis and the trace
/// norm reduces to a sum over `d^m` eigenvalue products. A family that
/// breaks this (read from disk, say) falls back to the dense tensor power.
pub fn helstrom_numeric(family: &MubFamily, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(out_of_range("m", m, "≥ 1"));
    }
    let d = family.d();
    let size = (d as u128).checked_pow(m).unwrap_or(u128::MAX);
    if size > HELSTROM_CAP as u128 {
        return Err(Error::Capability {
            what: format!("Helstrom probability on d^m = {d}^{m}"),
            cap: format!("d^m ≤ {HELSTROM_CAP}"),
        });
    }
    let (r0, r1) = average_states(family);
    let commutator = max_abs_diff(&(&r0 * &r1), &(&r1 * &r0));
    let norm = if commutator < COMMUTE_TOL {
        commuting_trace_norm(&r0, &r1, m)
    } else {
        trace_norm_hermitian(&(tensor_power(&r0, m) - tensor_power(&r1, m)))
    };
    Ok(0.5 * (1.0 + norm / 2.0))
}

fn commuting_trace_norm(r0: &CMatrix, r1: &CMatrix, m: u32) -> f64 {
    let eig = r0.clone().symmetric_eigen();
    let u = &eig.eigenvectors;
    let a: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let rot = u.adjoint() * r1 * u;
    let b: Vec<f64> = (0..a.len()).map(|i| rot[(i, i)].re).collect();
    // products over all m-tuples of shared eigenvalue indices
    let mut pa = vec![1.0];
    let mut pb = vec![1.0];
    for _ in 0..m {
        pa = pa.iter().flat_map(|p| a.iter().map(move |x| p * x)).collect();
        pb = pb.iter().flat_map(|p| b.iter().map(move |x| p * x)).collect();
    }
    pa.iter().zip(&pb).map(|(x, y)| (x - y).abs()).sum()
}

/// `1/2 + 1/(2√(d+1))`.
pub fn helstrom_single_closed(d: f64) -> f64 {
    0.5 + 0.5 / (d + 1.0).sqrt()
}

/// `min(1, 1/2 + m/(2√(d+1)))`.
pub fn helstrom_multi_bound(d: f64, m: u64) -> f64 {
    (0.5 + m as f64 / (2.0 * (d + 1.0).sqrt())).clamp(0.5, 1.0)
}

/// Success frequency of Eve measuring each state in a uniformly random
/// basis of the family, then decoding from her outcome when the revealed
/// basis matches hers and tossing a coin otherwise.
pub fn simulate_eve_random_basis(family: &MubFamily, n_trials: u64, seed: u64) -> Result<f64> {
    if n_trials == 0 {
        return Err(out_of_range("n_trials", n_trials, "≥ 1"));
    }
    let d = family.d();
    let half = d / 2;
    let n_bases = family.num_bases();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut wins = 0u64;
    for _ in 0..n_trials {
        let x = rng.random_range(0..2usize);
        let r = rng.random_range(0..half);
        let theta = rng.random_range(0..n_bases);
        let eve_basis = rng.random_range(0..n_bases);
        let guess = if eve_basis == theta {
            let sent = x * half + r;
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut outcome = d - 1;
            for j in 0..d {
                acc += family.overlap(eve_basis, j, theta, sent).norm_sqr();
                if u < acc {
                    outcome = j;
                    break;
                }
            }
            outcome / half
        } else {
            rng.random_range(0..2usize)
        };
        wins += (guess == x) as u64;
    }
    Ok(wins as f64 / n_trials as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub deltas: Vec<f64>,
    /// `D(δ) = ‖N_δ(ρ₀) − N_δ(ρ₁)‖₁` for each `δ`.
    pub distances: Vec<f64>,
    pub non_increasing: bool,
    /// `max_δ |D(δ) − (1 − δ)·D(0)|`.
    pub max_linear_deviation: f64,
}

/// Trace distance between the two key-bit states after depolarising
/// storage noise of strength `δ`: holding the state before measuring can
/// only lose distinguishability.
pub fn strategy_monotonicity(family: &MubFamily, deltas: &[f64]) -> Result<MonotonicityReport> {
    if let Some(&bad) = deltas.iter().find(|d| !(0.0..=1.0).contains(*d)) {
        return Err(out_of_range("delta", bad, "[0, 1]"));
    }
    let (r0, r1) = average_states(family);
    let d0 = trace_norm_hermitian(&(&r0 - &r1));
    let mut distances: Vec<f64> = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let diff = decohere(&r0, delta)? - decohere(&r1, delta)?;
        distances.push(hermitian_eigenvalues(&diff).iter().map(|e| e.abs()).sum());
    }
    let mut order: Vec<usize> = (0..deltas.len()).collect();
    order.sort_by(|&a, &b| deltas[a].total_cmp(&deltas[b]));
    let non_increasing = order
        .windows(2)
        .all(|w| distances[w[1]] <= distances[w[0]] + 1e-12);
    let max_linear_deviation = deltas
        .iter()
        .zip(&distances)
        .map(|(&delta, &dist)| (dist - (1.0 - delta) * d0).abs())
        .fold(0.0, f64::max);
    Ok(MonotonicityReport {
        deltas: deltas.to_vec(),
        distances,
        non_increasing,
        max_linear_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, trace};
    use crate::mub::build_mub_family;

    #[test]
    fn states_are_complementary() {
        for k in 1..=4 {
            let f = build_mub_family(k).unwrap();
            let d = f.d();
            let (r0, r1) = average_states(&f);
            assert!((trace(&r0).re - 1.0).abs() < 1e-12);
            let sum = &r0 + &r1;
            assert!(max_abs_diff(&sum, &identity(d).scale(2.0 / d as f64)) < 1e-12);
        }
    }

    #[test]
    fn other_splits_fall_below_the_closed_form() {
        // ‖Σ_θ Z_θ‖₁ ≤ √d·‖Σ_θ Z_θ‖₂ = d√(d+1): the closed form is a ceiling
        // over splits; moving one vector across the split of one basis leaves it.
        let f = build_mub_family(2).unwrap();
        let mut bases = f.bases().to_vec();
        bases[3].swap_columns(1, 2);
        let g = MubFamily::from_bases(f.dim(), bases).unwrap();
        let p = helstrom_numeric(&g, 1).unwrap();
        assert!(p < helstrom_single_closed(4.0) - 1e-3, "{p}");
        assert!(p > 0.5);
    }

    #[test]
    fn qubit_trace_distance() {
        let f = build_mub_family(1).unwrap();
        let (r0, r1) = average_states(&f);
        let t = trace_norm_hermitian(&(&r0 - &r1));
        assert!((t - 2.0 / 3f64.sqrt()).abs() < 1e-12);
        let p = helstrom_numeric(&f, 1).unwrap();
        assert!((p - (0.5 + 1.0 / (2.0 * 3f64.sqrt()))).abs() < 1e-12);
    }

    #[test]
    fn helstrom_matches_closed_form_and_dense_path() {
        for k in 1..=3 {
            let f = build_mub_family(k).unwrap();
            let d = f.d() as f64;
            let p = helstrom_numeric(&f, 1).unwrap();
            assert!((p - helstrom_single_closed(d)).abs() < 1e-12);
            let (r0, r1) = average_states(&f);
            for m in 1..=3u32 {
                if f.d().pow(m) > 512 {
                    continue;
                }
                let fast = helstrom_numeric(&f, m).unwrap();
                let dense =
                    0.5 * (1.0 + trace_norm_hermitian(&(tensor_power(&r0, m) - tensor_power(&r1, m))) / 2.0);
                assert!((fast - dense).abs() < 1e-9, "d={d} m={m}");
                assert!(fast <= helstrom_multi_bound(d, m as u64) + 1e-12);
            }
        }
    }

    #[test]
    fn helstrom_grows_with_copies() {
        let f = build_mub_family(1).unwrap();
        let p1 = helstrom_numeric(&f, 1).unwrap();
        let p2 = helstrom_numeric(&f, 2).unwrap();
        let p3 = helstrom_numeric(&f, 3).unwrap();
        // two qubit copies tie on disagreement, so only the third helps
        assert!((p2 - p1).abs() < 1e-12);
        assert!(p3 > p2);
        assert!(p2 <= 0.5 + 2.0 / (2.0 * 3f64.sqrt()));
    }

    #[test]
    fn helstrom_cap() {
        let f = build_mub_family(4).unwrap();
        assert!(helstrom_numeric(&f, 3).is_ok());
        assert!(matches!(helstrom_numeric(&f, 4), Err(Error::Capability { .. })));
        assert!(helstrom_numeric(&f, 0).is_err());
    }

    #[test]
    fn random_basis_attack() {
        for (k, seed) in [(1u32, 1u64), (2, 2)] {
            let f = build_mub_family(k).unwrap();
            let d = f.d() as f64;
            let n = 100_000u64;
            let p = simulate_eve_random_basis(&f, n, seed).unwrap();
            let expected = 0.5 + 0.5 / (d + 1.0);
            let sigma = (expected * (1.0 - expected) / n as f64).sqrt();
            assert!((p - expected).abs() < 5.0 * sigma, "d={d}: {p}");
        }
        let f = build_mub_family(1).unwrap();
        assert_eq!(
            simulate_eve_random_basis(&f, 1000, 9).unwrap(),
            simulate_eve_random_basis(&f, 1000, 9).unwrap()
        );
        assert!(simulate_eve_random_basis(&f, 0, 9).is_err());
    }

    #[test]
    fn depolarising_law() {
        let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
        for k in 1..=2 {
            let f = build_mub_family(k).unwrap();
            let rep = strategy_monotonicity(&f, &grid).unwrap();
            assert!(rep.non_increasing);
            assert!(rep.max_linear_deviation < 1e-9);
            assert!(rep.distances[4].abs() < 1e-12);
        }
        let f = build_mub_family(1).unwrap();
        assert!(strategy_monotonicity(&f, &[0.5, 1.5]).is_err());
        let unsorted = strategy_monotonicity(&f, &[1.0, 0.0, 0.5]).unwrap();
        assert!(unsorted.non_increasing);
    }
}
