use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thabound_core::budget::{
    lidt_scale_pulse_width, lidt_scale_wavelength, photon_flux_from_power, ComponentCatalog,
    LidtPreset, LidtSpec, PlanConstraints,
};
use thabound_core::characterization::{parse_trace, reflectivity_bound, CharacterizationError};
use thabound_core::rate::{
    max_distance, mu_out_threshold, sweep_distance, verify_convexity, RateError,
};
use thabound_core::{
    plan_budget, required_isolation, AttackKind, AttackModel, BudgetError, Decibel,
};

use crate::config::RunConfig;
use crate::table::{floor_rate, gnuplot_script, sort_rows, write_rows, SweepRow};

/// How a successful run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Infeasible budget, no secure key, or a violated property.
    Negative,
}

pub struct Report {
    pub text: String,
    pub status: Status,
}

impl Report {
    fn ok(text: String) -> Self {
        Report {
            text,
            status: Status::Ok,
        }
    }

    fn negative(text: String) -> Self {
        Report {
            text,
            status: Status::Negative,
        }
    }
}

pub fn sweep_rows(cfg: &RunConfig) -> anyhow::Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for attack in cfg.attacks_or_none() {
        let s = cfg.sweep;
        let series = sweep_distance(&cfg.channel, &cfg.source, &attack, s.l_min, s.l_max, s.step)?;
        rows.extend(series.points.iter().map(|p| SweepRow {
            length_km: p.length_km,
            mu_out: attack.mu_out(),
            attack: attack.kind().label().to_string(),
            source: cfg.source.label().to_string(),
            rate: floor_rate(p.rate),
        }));
    }
    sort_rows(&mut rows);
    Ok(rows)
}

pub fn cmd_sweep(cfg: &RunConfig, title: &str) -> anyhow::Result<Report> {
    let rows = sweep_rows(cfg)?;
    let csv_path = &cfg.output_path;
    let file = std::fs::File::create(csv_path)
        .with_context(|| format!("creating {}", csv_path.display()))?;
    write_rows(std::io::BufWriter::new(file), &rows)?;
    let script_path = csv_path.with_extension("gp");
    std::fs::write(&script_path, gnuplot_script(csv_path, title, &rows))
        .with_context(|| format!("writing {}", script_path.display()))?;

    let mut text = String::new();
    writeln!(text, "wrote {} rows to {}", rows.len(), csv_path.display())?;
    writeln!(text, "plot script: {}", script_path.display())?;
    for (attack, mu, last) in last_positive_by_block(&rows) {
        match last {
            Some(l) => writeln!(
                text,
                "{attack:>7} mu_out={:<8} last positive at {l} km",
                fmt_mu(mu)
            )?,
            None => writeln!(text, "{attack:>7} mu_out={:<8} no key", fmt_mu(mu))?,
        }
    }
    Ok(Report::ok(text))
}

fn fmt_mu(mu: f64) -> String {
    if mu == 0.0 {
        "0".to_string()
    } else {
        format!("{mu:e}")
    }
}

fn last_positive_by_block(rows: &[SweepRow]) -> Vec<(String, f64, Option<f64>)> {
    let mut out: Vec<(String, f64, Option<f64>)> = Vec::new();
    for r in rows {
        let same = out
            .last()
            .is_some_and(|(a, m, _)| *a == r.attack && *m == r.mu_out);
        if !same {
            out.push((r.attack.clone(), r.mu_out, None));
        }
        if r.rate > 0.0 {
            out.last_mut().expect("block pushed").2 = Some(r.length_km);
        }
    }
    out
}

#[derive(Debug, Serialize)]
pub struct DistanceAt {
    pub mu_out: f64,
    pub max_distance_km: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct ThresholdReport {
    pub attack_kind: String,
    pub source: String,
    pub mu_out_threshold: Option<f64>,
    pub max_distance_at: Vec<DistanceAt>,
}

pub fn cmd_threshold(
    cfg: &RunConfig,
    kind: Option<AttackKind>,
    mus: &[f64],
) -> anyhow::Result<Report> {
    let kind = kind
        .or_else(|| {
            cfg.attacks
                .iter()
                .map(AttackModel::kind)
                .find(|k| *k != AttackKind::NoAttack)
        })
        .unwrap_or(AttackKind::General);
    if kind == AttackKind::NoAttack {
        bail!("threshold needs an attack kind other than none");
    }
    let mut mus = mus.to_vec();
    if mus.is_empty() {
        mus = cfg
            .attacks
            .iter()
            .filter(|a| a.kind() == kind)
            .map(|a| a.mu_out())
            .collect();
    }
    if mus.is_empty() {
        mus.push(0.0);
    }

    let threshold = match mu_out_threshold(&cfg.channel, &cfg.source, kind) {
        Ok(t) => Some(t),
        Err(RateError::NoKey) => None,
        Err(e) => return Err(e.into()),
    };
    let mut max_distance_at = Vec::with_capacity(mus.len());
    for mu in mus {
        let attack = AttackModel::new(kind, mu)?;
        let max_distance_km = match max_distance(&cfg.channel, &cfg.source, &attack) {
            Ok(d) => Some(d),
            Err(RateError::NoKey) => None,
            Err(e) => return Err(e.into()),
        };
        max_distance_at.push(DistanceAt {
            mu_out: mu,
            max_distance_km,
        });
    }
    let report = ThresholdReport {
        attack_kind: kind.label().to_string(),
        source: cfg.source.label().to_string(),
        mu_out_threshold: threshold,
        max_distance_at,
    };
    let text = serde_json::to_string_pretty(&report)? + "\n";
    Ok(if threshold.is_some() {
        Report::ok(text)
    } else {
        Report::negative(text)
    })
}

pub struct BudgetArgs {
    pub mu_out: f64,
    pub photons: f64,
    pub clock_hz: f64,
    pub constraints: PlanConstraints,
    pub limit: usize,
    pub json: bool,
}

#[derive(Serialize)]
struct BudgetJson<'a> {
    required_isolation_db: f64,
    plans: &'a [thabound_core::IsolationBudget],
}

pub fn cmd_budget(args: &BudgetArgs, catalog: &ComponentCatalog) -> anyhow::Result<Report> {
    let gamma = required_isolation(args.mu_out, args.photons, args.clock_hz)?;
    let plans = match plan_budget(gamma, catalog, &args.constraints) {
        Ok(p) => p,
        Err(BudgetError::Infeasible(_)) => {
            return Ok(Report::negative(format!(
                "required isolation: {gamma}\ninfeasible: no catalog combination reaches {gamma}\n"
            )))
        }
        Err(e) => return Err(e.into()),
    };
    let shown = &plans[..plans.len().min(args.limit)];
    if args.json {
        let body = BudgetJson {
            required_isolation_db: gamma.value(),
            plans: shown,
        };
        return Ok(Report::ok(serde_json::to_string_pretty(&body)? + "\n"));
    }
    let mut text = String::new();
    writeln!(text, "required isolation: {gamma}")?;
    writeln!(
        text,
        "{:>3} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "n", "I (dB)", "A (dB)", "R (dB)", "F (dB)", "total"
    )?;
    for p in shown {
        writeln!(
            text,
            "{:>3} {:>10} {:>10} {:>10} {:>10} {:>10}",
            p.isolator_count,
            fmt_db(p.isolator_db),
            fmt_db(p.attenuator_db),
            fmt_db(p.reflectivity_db),
            fmt_db(p.filter_db),
            fmt_db(thabound_core::isolation_total(p)),
        )?;
    }
    if plans.len() > shown.len() {
        writeln!(
            text,
            "({} of {} feasible combinations shown)",
            shown.len(),
            plans.len()
        )?;
    }
    Ok(Report::ok(text))
}

fn fmt_db(d: Decibel) -> String {
    thabound_core::numerics::format_db_value(d.value())
}

pub fn cmd_reflectivity(trace: &Path, region: (f64, f64)) -> anyhow::Result<Report> {
    let text =
        std::fs::read_to_string(trace).with_context(|| format!("reading {}", trace.display()))?;
    let peaks = parse_trace(&text).with_context(|| format!("in {}", trace.display()))?;
    let mut out = String::new();
    writeln!(
        out,
        "{:>12} {:>16} {:>4} {:>9}",
        "distance_m", "reflectivity_db", "arm", "in_region"
    )?;
    for p in &peaks {
        let inside = p.distance_m >= region.0 && p.distance_m <= region.1;
        writeln!(
            out,
            "{:>12} {:>16} {:>4} {:>9}",
            p.distance_m,
            p.reflectivity_db.value(),
            p.polarization,
            if inside { "yes" } else { "no" }
        )?;
    }
    match reflectivity_bound(&peaks, region) {
        Ok(total) => {
            writeln!(out, "total reflectivity bound: {total:.2}")?;
        }
        Err(CharacterizationError::NoReflectors { d_min, d_max }) => {
            writeln!(out, "no reflectors in region [{d_min}, {d_max}] m")?;
        }
        Err(e) => return Err(e.into()),
    }
    Ok(Report::ok(out))
}

pub struct LidtArgs {
    pub preset: Option<LidtPreset>,
    pub power_w: Option<f64>,
    pub wavelength_m: f64,
    pub compensate: bool,
    pub pulse_width_s: Option<f64>,
    pub scale_wavelength_m: Option<f64>,
}

pub fn cmd_lidt(args: &LidtArgs) -> anyhow::Result<Report> {
    let spec = match (args.preset, args.power_w) {
        (Some(_), Some(_)) => bail!("--preset and --power are mutually exclusive"),
        (None, None) => bail!("one of --preset or --power is required"),
        (Some(p), None) => p.spec(args.compensate),
        (None, Some(w)) => {
            let flux = photon_flux_from_power(w, args.wavelength_m)?;
            LidtSpec::new(flux, 1e-9, args.wavelength_m)?
        }
    };
    let mut out = String::new();
    writeln!(
        out,
        "photon flux: {:.3e} photons/s (lambda {:e} m, tau {:e} s)",
        spec.photon_flux, spec.wavelength_ref, spec.pulse_width_ref
    )?;
    let mut scaled = spec;
    if let Some(tau) = args.pulse_width_s {
        scaled = lidt_scale_pulse_width(&scaled, tau)?;
        writeln!(
            out,
            "scaled to tau {tau:e} s: {:.3e} photons/s",
            scaled.photon_flux
        )?;
    }
    if let Some(lambda) = args.scale_wavelength_m {
        scaled = lidt_scale_wavelength(&scaled, lambda)?;
        writeln!(
            out,
            "scaled to lambda {lambda:e} m: {:.3e} photons/s",
            scaled.photon_flux
        )?;
    }
    Ok(Report::ok(out))
}

pub struct ConvexityArgs {
    pub kinds: Vec<AttackKind>,
    pub samples: usize,
    pub seed: u64,
    pub mu_max: f64,
}

pub fn cmd_convexity(cfg: &RunConfig, args: &ConvexityArgs) -> anyhow::Result<Report> {
    if !(args.mu_max >= 0.0 && args.mu_max.is_finite()) {
        bail!("--mu-max must be a finite value >= 0");
    }
    let kinds: Vec<AttackKind> = if args.kinds.is_empty() {
        vec![AttackKind::General, AttackKind::Passive, AttackKind::Usd]
    } else {
        args.kinds.clone()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let (l_lo, l_hi) = (cfg.sweep.l_min, cfg.sweep.l_max);
    let mut out = String::new();
    let mut total = 0usize;
    for kind in kinds {
        let mut violations = 0usize;
        for _ in 0..args.samples {
            let mu1 = rng.random_range(0.0..=args.mu_max);
            let mu2 = rng.random_range(0.0..=args.mu_max);
            let l = rng.random_range(l_lo..=l_hi);
            if !verify_convexity(&cfg.channel, &cfg.source, kind, l, mu1, mu2)? {
                violations += 1;
            }
        }
        total += violations;
        writeln!(
            out,
            "{kind}/{}: {} pairs, {violations} violations",
            cfg.source.label(),
            args.samples
        )?;
    }
    Ok(if total == 0 {
        Report::ok(out)
    } else {
        Report::negative(out)
    })
}

/// `path` if given, else the config's output path.
pub fn output_path(cfg: &RunConfig, path: Option<PathBuf>) -> PathBuf {
    path.unwrap_or_else(|| cfg.output_path.clone())
}
