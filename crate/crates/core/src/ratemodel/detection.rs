use serde::Serialize;

use super::DetectorModel;
use crate::error::{out_of_range, Error, Result};

/// How the per-click probabilities are normalised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectionMode {
    /// `P_click = P_right + P_wrong`, so `p_c + p_e = 1`.
    #[default]
    Normalized,
    /// `P_click = P[click due to signal] · n·p_dark`, kept only for
    /// comparison: it is zero without dark counts and ordinarily smaller
    /// than `P_right`, so `p_c` can exceed 1.
    Paper,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectionStats {
    /// At least one of the `m` copies is detected.
    pub p_signal_click: f64,
    pub p_right: f64,
    pub p_wrong: f64,
    pub p_click: f64,
    pub p_c: f64,
    pub p_e: f64,
    pub mode: DetectionMode,
}

/// Unnormalised event probabilities for a round in which exactly `copies`
/// photons were sent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct EventProbabilities {
    /// `Σ_{i≥1} C(m,i) a^i (1−a)^{m−i}`
    pub signal: f64,
    /// same, weighted by `V^i`: every arriving photon hits the good detector
    pub signal_good: f64,
    /// same, weighted by `(1−V)^i`: every arriving photon hits a bad detector
    pub signal_bad: f64,
    /// `(1−a)^m`
    pub no_signal: f64,
    pub right: f64,
    pub wrong: f64,
}

/// `x·ln y` with the convention `0·ln 0 = 0`.
fn xlny(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

pub(crate) fn event_probabilities(
    transmittance: f64,
    det: &DetectorModel,
    copies: u64,
) -> EventProbabilities {
    let a = (transmittance * det.efficiency).clamp(0.0, 1.0);
    let v = det.visibility;
    let m = copies as f64;
    // Binomial sums term by term in log space; ln C(m, i) is accumulated.
    let mut ln_choose = 0.0f64;
    let (mut signal, mut good, mut bad) = (0.0, 0.0, 0.0);
    for i in 1..=copies {
        let fi = i as f64;
        ln_choose += (m - fi + 1.0).ln() - fi.ln();
        let ln_term = ln_choose + xlny(fi, a) + xlny(m - fi, 1.0 - a);
        signal += ln_term.exp();
        good += (ln_term + xlny(fi, v)).exp();
        bad += (ln_term + xlny(fi, 1.0 - v)).exp();
    }
    let no_signal = if a >= 1.0 {
        if copies == 0 { 1.0 } else { 0.0 }
    } else {
        (m * (-a).ln_1p()).exp()
    };
    let pd = det.dark_count;
    let n = det.detectors as f64;
    let no_dark = (1.0 - pd).powf(n);
    EventProbabilities {
        signal,
        signal_good: good,
        signal_bad: bad,
        no_signal,
        right: good * no_dark + no_signal * pd + good * pd,
        wrong: bad * no_dark + no_signal * (n - 1.0) * pd + bad * (n - 1.0) * pd,
    }
}

/// Click statistics for `m` copies through a channel of transmittance `T`.
pub fn detection_stats(
    transmittance: f64,
    det: &DetectorModel,
    m: u64,
    mode: DetectionMode,
) -> Result<DetectionStats> {
    if !(0.0..=1.0).contains(&transmittance) {
        return Err(out_of_range("T", transmittance, "[0, 1]"));
    }
    if m == 0 {
        return Err(out_of_range("m", m, "≥ 1"));
    }
    let ev = event_probabilities(transmittance, det, m);
    finish(ev.signal, ev.right, ev.wrong, det, mode)
}

fn finish(
    signal: f64,
    right: f64,
    wrong: f64,
    det: &DetectorModel,
    mode: DetectionMode,
) -> Result<DetectionStats> {
    let p_click = match mode {
        DetectionMode::Normalized => right + wrong,
        DetectionMode::Paper => signal * det.detectors as f64 * det.dark_count,
    };
    if !(p_click > 0.0) {
        return Err(Error::Degenerate(match mode {
            DetectionMode::Paper => "P[click] = P[signal]·n·p_dark vanishes".into(),
            DetectionMode::Normalized => "no click is possible (no signal, no dark counts)".into(),
        }));
    }
    Ok(DetectionStats {
        p_signal_click: signal,
        p_right: right,
        p_wrong: wrong,
        p_click,
        p_c: right / p_click,
        p_e: wrong / p_click,
        mode,
    })
}

/// Normalised click statistics when the photon number per round is
/// Poisson with mean `mu` (coherent-state source).
pub fn poisson_detection_stats(transmittance: f64, det: &DetectorModel, mu: f64) -> Result<DetectionStats> {
    if !(0.0..=1.0).contains(&transmittance) {
        return Err(out_of_range("T", transmittance, "[0, 1]"));
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(out_of_range("mu", mu, "> 0"));
    }
    let k_max = (mu + 40.0 * mu.sqrt() + 50.0).ceil() as u64;
    let (mut signal, mut right, mut wrong) = (0.0, 0.0, 0.0);
    let mut ln_fact = 0.0f64;
    for k in 0..=k_max {
        if k > 0 {
            ln_fact += (k as f64).ln();
        }
        let w = (xlny(k as f64, mu) - mu - ln_fact).exp();
        let ev = event_probabilities(transmittance, det, k);
        signal += w * ev.signal;
        right += w * ev.right;
        wrong += w * ev.wrong;
    }
    finish(signal, right, wrong, det, DetectionMode::Normalized)
}

/// `H(X|Y) = −p_c log₂ p_c − p_e log₂(p_e/(n−1))`, with `0·log 0 = 0`.
pub fn conditional_entropy_xy(p_c: f64, p_e: f64, n: u32) -> f64 {
    let mut h = 0.0;
    if p_c > 0.0 {
        h -= p_c * p_c.log2();
    }
    if p_e > 0.0 {
        h -= p_e * (p_e / (n.max(2) - 1) as f64).log2();
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratemodel::DetectorModel;

    fn det(eta: f64, v: f64, pd: f64) -> DetectorModel {
        DetectorModel::new(eta, v, pd).unwrap()
    }

    #[test]
    fn noiseless() {
        let s = detection_stats(1.0, &DetectorModel::perfect(), 1, DetectionMode::Normalized).unwrap();
        assert_eq!((s.p_c, s.p_e), (1.0, 0.0));
    }

    #[test]
    fn dark_only_is_symmetric() {
        let s = detection_stats(0.0, &det(0.5, 0.9, 1e-3), 3, DetectionMode::Normalized).unwrap();
        assert_eq!((s.p_c, s.p_e), (0.5, 0.5));
    }

    #[test]
    fn binomial_sums_match_closed_forms() {
        // Σ_{i≥1} C(m,i) a^i (1−a)^{m−i} w^i = (1 − a + a w)^m − (1 − a)^m
        for &(t, eta, v, m) in &[(0.1, 0.2, 0.99, 10u64), (0.9, 1.0, 0.5, 3), (1e-3, 0.66, 0.995, 200)] {
            let d = det(eta, v, 1e-6);
            let ev = event_probabilities(t, &d, m);
            let a: f64 = t * eta;
            let mf = m as i32;
            let none = (1.0 - a).powi(mf);
            assert!((ev.no_signal - none).abs() < 1e-14);
            assert!((ev.signal - (1.0 - none)).abs() < 1e-12);
            assert!((ev.signal_good - ((1.0 - a + a * v).powi(mf) - none)).abs() < 1e-12);
            assert!((ev.signal_bad - ((1.0 - a * v).powi(mf) - none)).abs() < 1e-12);
        }
    }

    #[test]
    fn paper_mode_degenerate_without_dark_counts() {
        let r = detection_stats(0.5, &det(0.5, 0.9, 0.0), 2, DetectionMode::Paper);
        assert!(matches!(r, Err(Error::Degenerate(_))));
        let p = detection_stats(0.5, &det(0.5, 0.9, 1e-3), 2, DetectionMode::Paper).unwrap();
        assert!(p.p_c > 1.0, "literal normalisation leaves the unit interval");
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(conditional_entropy_xy(1.0, 0.0, 2), 0.0);
        assert!((conditional_entropy_xy(0.5, 0.5, 2) - 1.0).abs() < 1e-15);
        let direct = -(0.9f64 * 0.9f64.log2()) - 0.1 * 0.1f64.log2();
        assert!((conditional_entropy_xy(0.9, 0.1, 2) - direct).abs() < 1e-15);
        assert!((conditional_entropy_xy(0.9, 0.1, 2) - 0.468_995_593_589_281).abs() < 1e-12);
    }

    #[test]
    fn poisson_mixture_limits() {
        // Very small μ: clicks are dominated by dark counts.
        let d = det(0.5, 0.99, 1e-3);
        let s = poisson_detection_stats(1.0, &d, 1e-9).unwrap();
        assert!((s.p_c - 0.5).abs() < 1e-3);
        // Poisson mixture equals an explicit weighted sum for a tiny support.
        let mu: f64 = 0.3;
        let mut r = 0.0;
        let mut w = 0.0;
        let mut fact = 1.0;
        for k in 0..60u64 {
            if k > 0 {
                fact *= k as f64;
            }
            let p = mu.powi(k as i32) * (-mu).exp() / fact;
            let ev = event_probabilities(0.2, &d, k);
            r += p * ev.right;
            w += p * ev.wrong;
        }
        let s = poisson_detection_stats(0.2, &d, mu).unwrap();
        assert!((s.p_c - r / (r + w)).abs() < 1e-12);
        assert!(poisson_detection_stats(0.2, &d, 0.0).is_err());
    }
}
