use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;

use mubqct::mub::{build_mub_family, verify_unbiasedness, Dimension, MubFamily};
use mubqct::protocol::{
    multiparty_run, run_protocol, PhotonStatistics, ProtocolParams, ProtocolTranscript,
};
use mubqct::ratemodel::{
    conditional_entropy_xy, detection_stats, poisson_detection_stats, sweep, write_sweep_csv,
    ChannelModel, DetectionMode, DetectorModel, DetectorProfile, RateOptions,
};
use mubqct::security::{
    bounds_report, helstrom_numeric, helstrom_single_closed, lambda_numeric_cached,
    lambda_paper_bound, lambda_theorem1_ceiling, simulate_eve_random_basis,
};
use serde::Serialize;
use serde_json::Value;

use crate::args::{
    BoundsArgs, Cli, Command, ExportArgs, MultipartyArgs, OracleArgs, RunArgs, SimulateArgs,
    SweepArgs, VerifyArgs,
};
use crate::error::CliError;

type Result<T, E = CliError> = std::result::Result<T, E>;

pub fn run(cli: Cli) -> Result<()> {
    let cfg = cli.config.as_deref();
    let name = cli.command.name();
    match cli.command {
        Command::MubVerify(a) => mub_verify(&a, resolved(name, cfg, &a)),
        Command::MubExport(a) => mub_export(&a, resolved(name, cfg, &a)),
        Command::Bounds(a) => bounds(&a, resolved(name, cfg, &a)),
        Command::Sweep(a) => sweep_cmd(&a, resolved(name, cfg, &a)),
        Command::Simulate(mut a) => {
            resolve_run(&mut a.run)?;
            let config = resolved(name, cfg, &a);
            simulate(&a, config)
        }
        Command::Multiparty(mut a) => {
            resolve_run(&mut a.run)?;
            let config = resolved(name, cfg, &a);
            multiparty(&a, config)
        }
        Command::Oracle(a) => oracle(&a, resolved(name, cfg, &a)),
    }
}

/// The subcommand's arguments after defaults, config file and flags have
/// been applied, plus the subcommand name and the config file used.
fn resolved<T: Serialize>(name: &str, cfg: Option<&Path>, args: &T) -> Value {
    let mut v = serde_json::to_value(args).expect("arguments serialise");
    if let Value::Object(map) = &mut v {
        map.insert("subcommand".into(), name.into());
        map.insert(
            "config_file".into(),
            cfg.map_or(Value::Null, |p| p.display().to_string().into()),
        );
    }
    v
}

fn config_comment(config: &Value) -> String {
    format!("config: {config}")
}

/// JSON outputs cannot carry a comment, so their config echo goes to stderr.
fn echo_stderr(config: &Value) {
    eprintln!("# {}", config_comment(config));
}

/// Writes to `path`, or stdout when absent.
fn emit(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let label = p.display().to_string();
            let file = File::create(p).map_err(CliError::io(label.clone()))?;
            let mut w = BufWriter::new(file);
            f(&mut w).and_then(|_| w.flush()).map_err(CliError::io(label))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            match f(&mut w).and_then(|_| w.flush()) {
                // reader went away (`| head`); nothing left to say
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
                r => r.map_err(CliError::io("<stdout>")),
            }
        }
    }
}

fn emit_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("report serialises");
    emit(path, |w| writeln!(w, "{text}"))
}

fn family_for(d: u64) -> Result<MubFamily> {
    let dim = Dimension::from_d(d as usize)?;
    Ok(build_mub_family(dim.k())?)
}

fn mub_verify(a: &VerifyArgs, config: Value) -> Result<()> {
    echo_stderr(&config);
    if !(a.tol > 0.0) {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", a.tol)));
    }
    let family = match &a.input {
        Some(p) => {
            let label = p.display().to_string();
            let file = File::open(p).map_err(CliError::io(label.clone()))?;
            let family = MubFamily::read_text(BufReader::new(file))
                .map_err(|e| CliError::Verification(format!("{label}: {e}")))?;
            if let Some(k) = a.k {
                if family.d() != 1 << k {
                    return Err(CliError::Usage(format!(
                        "--k {k} given but {label} holds d = {}",
                        family.d()
                    )));
                }
            }
            family
        }
        None => build_mub_family(a.k.expect("clap requires k or input"))?,
    };
    let report = verify_unbiasedness(&family, a.tol);
    emit_json(None, &report)?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "orthonormality {:.3e}, unbiasedness {:.3e}, tol {:e}",
            report.max_orthonormality_deviation, report.max_unbiasedness_deviation, a.tol
        )))
    }
}

fn mub_export(a: &ExportArgs, config: Value) -> Result<()> {
    echo_stderr(&config);
    let family = build_mub_family(a.k)?;
    emit(a.out.as_deref(), |w| family.write_text(w))
}

fn bounds(a: &BoundsArgs, config: Value) -> Result<()> {
    echo_stderr(&config);
    let report = bounds_report(a.d, a.m, a.oracle)?;
    emit_json(None, &report)
}

fn sweep_cmd(a: &SweepArgs, config: Value) -> Result<()> {
    if a.jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let mut profiles: Vec<(String, DetectorModel)> = Vec::new();
    for &p in &a.profile {
        let p = DetectorProfile::from(p);
        if !profiles.iter().any(|(n, _)| n == p.name()) {
            profiles.push((p.name().to_string(), p.detector()));
        }
    }
    let lengths = a.lengths.values();
    let opts = RateOptions::default();
    let go = || sweep(&a.d, &lengths, &profiles, a.attenuation, a.bounds.into(), &opts);
    let rows = match a.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {n} workers: {e}")))?
            .install(go),
        None => go(),
    }?;
    let comment = config_comment(&config);
    emit(a.out.as_deref(), |w| write_sweep_csv(&rows, Some(&comment), w))
}

/// Fills in the defaulted photon number and the detector parameters, so
/// the echoed config is complete.
fn resolve_run(r: &mut RunArgs) -> Result<()> {
    match (r.m, r.mu) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage("give either --m or --mu, not both".into()))
        }
        (None, None) => r.m = Some(1),
        _ => {}
    }
    let base = DetectorProfile::from(r.profile).detector();
    r.eta.get_or_insert(base.efficiency);
    r.visibility.get_or_insert(base.visibility);
    r.dark_count.get_or_insert(base.dark_count);
    Ok(())
}

fn photons(r: &RunArgs) -> PhotonStatistics {
    match (r.m, r.mu) {
        (_, Some(mu)) => PhotonStatistics::Poisson(mu),
        (m, None) => PhotonStatistics::Fixed(m.unwrap_or(1)),
    }
}

fn detector(r: &RunArgs) -> Result<DetectorModel> {
    let base = DetectorProfile::from(r.profile).detector();
    Ok(DetectorModel::new(
        r.eta.unwrap_or(base.efficiency),
        r.visibility.unwrap_or(base.visibility),
        r.dark_count.unwrap_or(base.dark_count),
    )?)
}

fn protocol_params(r: &RunArgs) -> Result<ProtocolParams> {
    let p = ProtocolParams {
        dim: Dimension::from_d(r.d as usize)?,
        photons: photons(r),
        n_rounds: r.rounds,
        channel: ChannelModel::new(r.length_km, r.attenuation)?,
        detector: detector(r)?,
        seed: r.seed,
        allow_unsafe_mu: r.allow_unsafe_mu,
    };
    p.validate()?;
    Ok(p)
}

#[derive(Debug, Clone, Copy, Serialize)]
struct Rates {
    click_rate: f64,
    p_c: f64,
    p_e: f64,
    hxy_bits: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
struct ZScores {
    click_rate: Option<f64>,
    p_c: Option<f64>,
    p_e: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
struct RunSummary {
    rounds: usize,
    clicks: usize,
    errors: usize,
    sifted_bits: usize,
    empirical: Rates,
    analytic: Rates,
    z_scores: ZScores,
}

/// Binomial z-score of an observed frequency against `p` over `n` trials;
/// `None` when it is undefined.
fn z_score(observed: f64, p: f64, n: usize) -> Option<f64> {
    if n == 0 {
        return None;
    }
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    if sigma > 0.0 {
        Some((observed - p) / sigma)
    } else if observed == p {
        Some(0.0)
    } else {
        None
    }
}

/// Model prediction for a receiver who gets `1/share` of the photons.
fn analytic_rates(params: &ProtocolParams, share: u64) -> Result<Rates> {
    let t = params.channel.transmittance();
    let s = match params.photons {
        PhotonStatistics::Fixed(m) => {
            detection_stats(t, &params.detector, m / share, DetectionMode::Normalized)?
        }
        PhotonStatistics::Poisson(mu) => {
            poisson_detection_stats(t, &params.detector, mu / share as f64)?
        }
    };
    Ok(Rates {
        click_rate: s.p_click,
        p_c: s.p_c,
        p_e: s.p_e,
        hxy_bits: conditional_entropy_xy(s.p_c, s.p_e, 2),
    })
}

fn summarize(t: &ProtocolTranscript, analytic: Rates) -> RunSummary {
    let s = &t.stats;
    let empirical = Rates {
        click_rate: s.click_rate,
        p_c: s.p_c,
        p_e: s.p_e,
        hxy_bits: s.hxy_bits,
    };
    RunSummary {
        rounds: s.rounds,
        clicks: s.clicks,
        errors: s.errors,
        sifted_bits: t.alice_sifted.len(),
        empirical,
        analytic,
        z_scores: ZScores {
            click_rate: z_score(s.click_rate, analytic.click_rate, s.rounds),
            p_c: z_score(s.p_c, analytic.p_c, s.clicks),
            p_e: z_score(s.p_e, analytic.p_e, s.clicks),
        },
    }
}

#[derive(Serialize)]
struct SimulateOutput {
    config: Value,
    #[serde(flatten)]
    summary: RunSummary,
}

fn simulate(a: &SimulateArgs, config: Value) -> Result<()> {
    let params = protocol_params(&a.run)?;
    let family = family_for(a.run.d)?;
    let transcript = run_protocol(&params, &family)?;
    let summary = summarize(&transcript, analytic_rates(&params, 1)?);
    if let Some(p) = &a.transcript {
        let comment = config_comment(&config);
        emit(Some(p), |w| transcript.write_csv(Some(&comment), w))?;
    }
    emit_json(a.summary.as_deref(), &SimulateOutput { config, summary })
}

#[derive(Serialize)]
struct PartySummary {
    party: usize,
    #[serde(flatten)]
    summary: RunSummary,
}

#[derive(Serialize)]
struct MultipartyOutput {
    config: Value,
    parties: Vec<PartySummary>,
}

fn multiparty(a: &MultipartyArgs, config: Value) -> Result<()> {
    let params = protocol_params(&a.run)?;
    let family = family_for(a.run.d)?;
    let transcripts = multiparty_run(&params, &family, a.parties)?;
    let analytic = analytic_rates(&params, a.parties as u64)?;
    let parties = transcripts
        .iter()
        .enumerate()
        .map(|(party, t)| PartySummary {
            party,
            summary: summarize(t, analytic),
        })
        .collect();
    emit_json(a.summary.as_deref(), &MultipartyOutput { config, parties })
}

#[derive(Serialize)]
struct EveReference {
    trials: u64,
    success: f64,
    analytic: f64,
    z_score: Option<f64>,
}

#[derive(Serialize)]
struct OracleOutput {
    d: u64,
    lambda_numeric: f64,
    lambda_theorem1_ceiling: f64,
    lambda_closed_form: f64,
    helstrom_numeric: f64,
    helstrom_closed_form: f64,
    eve_random_basis: EveReference,
    detection: RunSummary,
}

fn oracle(a: &OracleArgs, config: Value) -> Result<()> {
    echo_stderr(&config);
    // the eigenvalue oracle owns the size cap, so ask it first
    let lambda_numeric = lambda_numeric_cached(a.d)?;
    let family = family_for(a.d)?;
    let df = a.d as f64;

    let eve_analytic = 0.5 + 0.5 / (df + 1.0);
    let success = simulate_eve_random_basis(&family, a.trials, a.seed)?;

    let base = DetectorProfile::from(a.profile).detector();
    let params = ProtocolParams {
        dim: family.dim(),
        photons: PhotonStatistics::Fixed(a.m),
        n_rounds: a.rounds,
        channel: ChannelModel::fiber(a.length_km)?,
        detector: base,
        seed: a.seed,
        allow_unsafe_mu: false,
    };
    params.validate()?;
    let transcript = run_protocol(&params, &family)?;

    let out = OracleOutput {
        d: a.d,
        lambda_numeric,
        lambda_theorem1_ceiling: lambda_theorem1_ceiling(df),
        lambda_closed_form: lambda_paper_bound(df),
        helstrom_numeric: helstrom_numeric(&family, 1)?,
        helstrom_closed_form: helstrom_single_closed(df),
        eve_random_basis: EveReference {
            trials: a.trials,
            success,
            analytic: eve_analytic,
            z_score: z_score(success, eve_analytic, a.trials as usize),
        },
        detection: summarize(&transcript, analytic_rates(&params, 1)?),
    };
    emit_json(None, &out)
}
