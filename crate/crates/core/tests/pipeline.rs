//! End-to-end checks across modules through the public API.

use mubqct::mub::{build_mub_family, verify_unbiasedness, Dimension, MubFamily};
use mubqct::protocol::{
    multiparty_run, privacy_amplify, run_protocol, timelock_reveal, Outcome, PhotonStatistics,
    ProtocolParams, QchClock, View,
};
use mubqct::ratemodel::{
    detection_stats, optimize_m, sweep, write_sweep_csv, BoundsSource, ChannelModel,
    DetectionMode, DetectorModel, DetectorProfile, RateOptions, SWEEP_CSV_HEADER,
};
use proptest::prelude::*;

fn params(k: u32, m: u64, length_km: f64, rounds: usize, seed: u64) -> ProtocolParams {
    ProtocolParams::new(
        Dimension::new(k).unwrap(),
        PhotonStatistics::Fixed(m),
        rounds,
        ChannelModel::fiber(length_km).unwrap(),
        DetectorProfile::SnspdLab.detector(),
        seed,
    )
    .unwrap()
}

#[test]
fn family_text_round_trip_is_exact() {
    for k in 1..=4 {
        let f = build_mub_family(k).unwrap();
        let mut buf = Vec::new();
        f.write_text(&mut buf).unwrap();
        let g = MubFamily::read_text(buf.as_slice()).unwrap();
        assert_eq!(f.bases(), g.bases(), "k = {k}");
        assert!(verify_unbiasedness(&g, 1e-9).passed);
    }
}

#[test]
fn truncated_family_is_rejected() {
    let f = build_mub_family(2).unwrap();
    let mut buf = Vec::new();
    f.write_text(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let cut: String = text.lines().take(10).collect::<Vec<_>>().join("\n");
    assert!(MubFamily::read_text(cut.as_bytes()).is_err());
}

#[test]
fn single_cell_sweep_is_optimised_rate() {
    let det = DetectorProfile::IngaasField.detector();
    let opts = RateOptions::default();
    let rows = sweep(
        &[256],
        &[35.0],
        &[("field".into(), det)],
        0.2,
        BoundsSource::Paper,
        &opts,
    )
    .unwrap();
    let direct = optimize_m(256, &ChannelModel::fiber(35.0).unwrap(), &det, BoundsSource::Paper, &opts).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].point, direct);
}

#[test]
fn sweep_csv_has_stable_columns() {
    let profiles: Vec<(String, DetectorModel)> = DetectorProfile::ALL
        .iter()
        .map(|p| (p.name().to_string(), p.detector()))
        .collect();
    let lengths: Vec<f64> = (0..=4).map(|i| 25.0 * i as f64).collect();
    let rows = sweep(&[1024, 16], &lengths, &profiles, 0.2, BoundsSource::Paper, &RateOptions::default()).unwrap();
    assert_eq!(rows.len(), 2 * 2 * 5);
    let mut buf = Vec::new();
    write_sweep_csv(&rows, Some("note"), &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# note");
    assert_eq!(lines[1], SWEEP_CSV_HEADER);
    // sorted by profile, then d, then L
    assert!(lines[2].starts_with("ingaas_field,16,0,"));
    assert!(lines[21].starts_with("snspd_lab,1024,100,"));
    for line in &lines[2..] {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 10);
        for c in &cols[1..] {
            let x: f64 = c.parse().unwrap();
            assert!(x.is_finite());
            // at most 10 significant digits
            let digits = c.trim_start_matches('-').split('e').next().unwrap().replace('.', "");
            assert!(digits.trim_start_matches('0').len() <= 10, "{c}");
        }
    }
}

#[test]
fn certified_rate_never_exceeds_closed_form_at_d16() {
    let det = DetectorProfile::SnspdLab.detector();
    let chan = ChannelModel::fiber(10.0).unwrap();
    let opts = RateOptions::default();
    let paper = optimize_m(16, &chan, &det, BoundsSource::Paper, &opts).unwrap();
    let cert = optimize_m(16, &chan, &det, BoundsSource::Certified, &opts).unwrap();
    // the exact λ at d = 16 is larger than the closed form, so it certifies less
    assert!(cert.key_rate <= paper.key_rate);
    assert!(optimize_m(32, &chan, &det, BoundsSource::Certified, &opts).is_err());
}

#[test]
fn transcript_is_reproducible_and_consistent() {
    let p = params(3, 2, 30.0, 20_000, 99);
    let f = build_mub_family(3).unwrap();
    let a = run_protocol(&p, &f).unwrap();
    let b = run_protocol(&p, &f).unwrap();
    assert_eq!(a, b);
    let c = run_protocol(&params(3, 2, 30.0, 20_000, 100), &f).unwrap();
    assert_ne!(a.records, c.records);

    let clicks = a.records.iter().filter(|r| r.outcome != Outcome::Erasure).count();
    assert_eq!(clicks, a.stats.clicks);
    assert_eq!(a.alice_sifted.len(), clicks);
    assert!(a.records.iter().all(|r| (r.theta as usize) < f.num_bases() && (r.r as usize) < f.d() / 2));

    let mut buf = Vec::new();
    a.write_csv(None, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 20_001);
}

#[test]
fn sifted_key_survives_privacy_amplification() {
    let f = build_mub_family(4).unwrap();
    let t = run_protocol(&params(4, 3, 0.0, 4000, 5), &f).unwrap();
    let n = t.alice_sifted.len();
    let out = n / 4;
    let ka = privacy_amplify(&t.alice_sifted, 17, out).unwrap();
    let kb = privacy_amplify(&t.bob_sifted, 17, out).unwrap();
    assert_eq!(ka.len(), out);
    if t.stats.errors == 0 {
        assert_eq!(ka, kb);
    } else {
        assert_ne!(t.alice_sifted, t.bob_sifted);
    }
    // roughly balanced output
    let ones = ka.iter().filter(|&&b| b == 1).count() as f64 / out as f64;
    assert!((ones - 0.5).abs() < 0.1, "{ones}");
}

#[test]
fn parties_share_bases_but_not_noise() {
    let f = build_mub_family(4).unwrap();
    let p = params(4, 8, 5.0, 5000, 21);
    let runs = multiparty_run(&p, &f, 4).unwrap();
    assert_eq!(runs.len(), 4);
    for r in &runs[1..] {
        let same_prep = r
            .records
            .iter()
            .zip(&runs[0].records)
            .all(|(a, b)| (a.x, a.r, a.theta) == (b.x, b.r, b.theta));
        assert!(same_prep);
        assert_ne!(r.records, runs[0].records);
    }
    // one party alone with the full m would be Alice's single-receiver run
    let solo = multiparty_run(&p, &f, 1).unwrap();
    assert_eq!(solo[0], run_protocol(&p, &f).unwrap());
}

#[test]
fn basis_reveal_respects_the_timelock() {
    let clock = QchClock::new(10, 100).unwrap();
    let env = clock.seal(7usize, 0);
    assert_eq!(timelock_reveal(&env, 0, View::Authorized).payload(), Some(&7));
    assert_eq!(timelock_reveal(&env, 99, View::Adversary).payload(), None);
    assert_eq!(timelock_reveal(&env, 100, View::Adversary).payload(), Some(&7));
    // by the time the basis unlocks, stored states are gone
    assert!(!clock.memory_alive(0, env.unlock_time()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn optimised_rate_never_grows_with_distance(
        k in prop::sample::select(vec![4u64, 6, 10, 14]),
        l in 0.0f64..300.0,
        dl in 0.5f64..50.0,
    ) {
        let d = 1u64 << k;
        let det = DetectorProfile::SnspdLab.detector();
        let opts = RateOptions::default();
        let near = optimize_m(d, &ChannelModel::fiber(l).unwrap(), &det, BoundsSource::Paper, &opts).unwrap();
        let far = optimize_m(d, &ChannelModel::fiber(l + dl).unwrap(), &det, BoundsSource::Paper, &opts).unwrap();
        prop_assert!(far.key_rate <= near.key_rate + 1e-15);
    }

    #[test]
    fn normalised_click_statistics(
        t in 0.0f64..=1.0,
        eta in 0.05f64..=1.0,
        v in 0.5f64..=1.0,
        dark in 1e-9f64..1e-3,
        m in 1u64..40,
    ) {
        let det = DetectorModel::new(eta, v, dark).unwrap();
        let s = detection_stats(t, &det, m, DetectionMode::Normalized).unwrap();
        prop_assert!((s.p_c + s.p_e - 1.0).abs() < 1e-12);
        prop_assert!(s.p_click > 0.0 && s.p_click <= 1.0 + 1e-12);
        // decisive clicks are a subset of rounds with any click
        prop_assert!(s.p_click <= s.p_signal_click + 2.0 * dark + 1e-12);
    }
}
