//! Secure key rates for every (attack, source) pair, plus distance sweeps,
//! threshold searches and the intensity-convexity check.
//!
//! Single-photon source:
//!
//! ```text
//! R   = Q_X·[1 − h(e'_Y) − f·h(e_X)]                       (none / general / passive)
//! R** = Q_X·{(1−δ)·[1 − h(e'_Y/(1−δ))] − f·h(e_X)}         (usd)
//! ```
//!
//! Decoy source, with `Q1 = s·e^(−s)·Y1` the single-photon gain:
//!
//! ```text
//! R~   = Q1·[1 − h(e'_Y)] − Q_s·f·h(e_s)
//! R~** = Q1·(1−δ)·[1 − h(e'_Y/(1−δ))] − Q_s·f·h(e_s)
//! ```
//!
//! `e'_Y` comes from the Bloch-sphere map for the general attack and from the
//! loss-tolerant map for the passive and USD attacks. Negative values are
//! reported as a zero rate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attack::{
    coin_imbalance, effective_imbalance, phase_error_general, phase_error_passive,
    usd_conclusive_fraction, AttackError, AttackKind, AttackModel, Leakage,
};
use crate::channel::{link_observables, ChannelError, ChannelParams, LinkObservables, SourceModel};
use crate::numerics::{binary_entropy, Probability};

/// Upper end of the `mu_out` bracket searched by [`mu_out_threshold`].
pub const THRESHOLD_BRACKET: f64 = 2.0;
/// Relative tolerance of the `mu_out` threshold bisection.
pub const THRESHOLD_REL_TOL: f64 = 1e-3;
/// Upper end of the distance bracket searched by [`max_distance`], km.
pub const DISTANCE_BRACKET_KM: f64 = 500.0;
/// Absolute tolerance of the distance bisection, km.
pub const DISTANCE_TOL_KM: f64 = 0.1;
/// Slack allowed by [`verify_convexity`].
pub const CONVEXITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RateError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Attack(#[from] AttackError),
    #[error("sweep range is empty: l_min = {l_min}, l_max = {l_max}, step = {step}")]
    EmptyGrid { l_min: f64, l_max: f64, step: f64 },
    #[error("channel yields no key even without leakage")]
    NoKey,
    #[error(
        "key rate stays positive up to mu_out = {0}; threshold lies outside the search bracket"
    )]
    ThresholdOutsideBracket(f64),
    #[error("threshold search needs an attack model, not `none`")]
    NoAttackThreshold,
}

/// Everything needed to evaluate one key rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateQuery {
    pub channel: ChannelParams,
    pub source: SourceModel,
    pub attack: AttackModel,
    pub length_km: f64,
}

/// A key rate together with whether the security argument produced a usable
/// bound at all.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateOutcome {
    /// Secure bits per pulse, `>= 0`.
    pub rate: f64,
    /// `false` when the rate is zero, either because a bound left its domain
    /// or because the formula went nonpositive.
    pub secure: bool,
}

impl RateOutcome {
    pub const NO_KEY: RateOutcome = RateOutcome {
        rate: 0.0,
        secure: false,
    };

    fn from_formula(value: f64) -> Self {
        if value > 0.0 {
            RateOutcome {
                rate: value.min(1.0),
                secure: true,
            }
        } else {
            RateOutcome::NO_KEY
        }
    }
}

#[inline]
fn h(x: Probability) -> f64 {
    binary_entropy(x)
}

/// Phase error entering privacy amplification, or `Insecure`.
fn virtual_phase_error(
    attack: &AttackModel,
    link: &LinkObservables,
) -> Result<Leakage<Probability>, AttackError> {
    let mu = attack.mu_out();
    match attack.kind() {
        AttackKind::NoAttack => Ok(Leakage::Bounded(link.e1)),
        AttackKind::General => {
            let delta = coin_imbalance(mu)?;
            Ok(match effective_imbalance(delta, link.y1)? {
                Leakage::Bounded(d) => phase_error_general(link.e1, d),
                Leakage::Insecure => Leakage::Insecure,
            })
        }
        AttackKind::Passive | AttackKind::Usd => {
            Ok(Leakage::Bounded(phase_error_passive(link.e1, mu)?))
        }
    }
}

/// Privacy-amplification term per single-photon detection:
/// `1 − h(e')`, or `(1−δ)·[1 − h(e'/(1−δ))]` under the USD attack.
fn privacy_term(attack: &AttackModel, link: &LinkObservables) -> Result<Leakage<f64>, AttackError> {
    let phase = match virtual_phase_error(attack, link)? {
        Leakage::Bounded(e) => e,
        Leakage::Insecure => return Ok(Leakage::Insecure),
    };
    if attack.kind() != AttackKind::Usd {
        return Ok(Leakage::Bounded(1.0 - h(phase)));
    }
    let delta = match usd_conclusive_fraction(attack.mu_out(), link.y1)? {
        Leakage::Bounded(d) => d.value(),
        Leakage::Insecure => return Ok(Leakage::Insecure),
    };
    let kept = 1.0 - delta;
    let scaled = Probability::saturating((phase.value() / kept).min(0.5));
    Ok(Leakage::Bounded(kept * (1.0 - h(scaled))))
}

/// Evaluates the key rate for one query.
pub fn key_rate(q: &RateQuery) -> Result<RateOutcome, RateError> {
    q.channel.validate()?;
    q.source.validate()?;
    let link = link_observables(&q.channel, &q.source, q.length_km)?;
    if link.y1.value() <= 0.0 {
        return Ok(RateOutcome::NO_KEY);
    }
    let privacy = match privacy_term(&q.attack, &link)? {
        Leakage::Bounded(v) => v,
        Leakage::Insecure => return Ok(RateOutcome::NO_KEY),
    };
    let f = q.channel.f_ec;
    let value = match q.source {
        SourceModel::SinglePhoton => link.q_x.value() * (privacy - f * h(link.e_x)),
        SourceModel::Decoy { .. } => link.q1.value() * privacy - link.q_x.value() * f * h(link.e_x),
    };
    Ok(RateOutcome::from_formula(value))
}

fn rate_value(
    channel: &ChannelParams,
    source: &SourceModel,
    attack: AttackModel,
    length_km: f64,
) -> Result<f64, RateError> {
    key_rate(&RateQuery {
        channel: *channel,
        source: *source,
        attack,
        length_km,
    })
    .map(|o| o.rate)
}

/// One point of a distance sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub length_km: f64,
    pub rate: f64,
    pub secure: bool,
}

/// Key rate versus distance, ordered by strictly increasing length.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RateSeries {
    pub points: Vec<RatePoint>,
}

impl RateSeries {
    /// Largest sampled length with a positive rate.
    pub fn last_positive(&self) -> Option<f64> {
        self.points
            .iter()
            .rev()
            .find(|p| p.secure)
            .map(|p| p.length_km)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Inclusive grid `l_min, l_min + step, …` up to `l_max`.
///
/// Points are generated as `l_min + i·step` so that rounding does not
/// accumulate; `l_max` is included when it lies on the grid up to 1e-9 steps.
pub fn distance_grid(l_min: f64, l_max: f64, step: f64) -> Result<Vec<f64>, RateError> {
    let valid = l_min.is_finite()
        && l_max.is_finite()
        && step.is_finite()
        && l_min >= 0.0
        && l_min < l_max
        && step > 0.0;
    if !valid {
        return Err(RateError::EmptyGrid { l_min, l_max, step });
    }
    let n = ((l_max - l_min) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| l_min + i as f64 * step).collect())
}

/// Evaluates [`key_rate`] on an inclusive distance grid. Points are computed
/// in parallel and returned in grid order.
pub fn sweep_distance(
    channel: &ChannelParams,
    source: &SourceModel,
    attack: &AttackModel,
    l_min: f64,
    l_max: f64,
    step: f64,
) -> Result<RateSeries, RateError> {
    let grid = distance_grid(l_min, l_max, step)?;
    let points = grid
        .par_iter()
        .map(|&length_km| {
            let q = RateQuery {
                channel: *channel,
                source: *source,
                attack: *attack,
                length_km,
            };
            key_rate(&q).map(|o| RatePoint {
                length_km,
                rate: o.rate,
                secure: o.secure,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RateSeries { points })
}

/// Largest `mu_out` that still gives a positive rate at zero distance.
///
/// Rates fall with distance, so zero distance gives the supremum over all
/// lengths. Bisection on `[0, 2]` to a relative tolerance of 1e-3; the
/// returned value is the largest probe known to give a positive rate.
pub fn mu_out_threshold(
    channel: &ChannelParams,
    source: &SourceModel,
    kind: AttackKind,
) -> Result<f64, RateError> {
    if kind == AttackKind::NoAttack {
        return Err(RateError::NoAttackThreshold);
    }
    let rate_at = |mu: f64| -> Result<f64, RateError> {
        rate_value(channel, source, AttackModel::new(kind, mu)?, 0.0)
    };
    if rate_at(0.0)? <= 0.0 {
        return Err(RateError::NoKey);
    }
    if rate_at(THRESHOLD_BRACKET)? > 0.0 {
        return Err(RateError::ThresholdOutsideBracket(THRESHOLD_BRACKET));
    }
    let (mut lo, mut hi) = (0.0f64, THRESHOLD_BRACKET);
    for _ in 0..200 {
        if lo > 0.0 && hi - lo <= THRESHOLD_REL_TOL * lo {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if rate_at(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Longest distance with a positive rate, by bisection on `[0, 500]` km to
/// 0.1 km. Returns the upper bracket if the rate is still positive there.
pub fn max_distance(
    channel: &ChannelParams,
    source: &SourceModel,
    attack: &AttackModel,
) -> Result<f64, RateError> {
    let rate_at = |l: f64| rate_value(channel, source, *attack, l);
    if rate_at(0.0)? <= 0.0 {
        return Err(RateError::NoKey);
    }
    if rate_at(DISTANCE_BRACKET_KM)? > 0.0 {
        return Ok(DISTANCE_BRACKET_KM);
    }
    let (mut lo, mut hi) = (0.0f64, DISTANCE_BRACKET_KM);
    while hi - lo > DISTANCE_TOL_KM {
        let mid = 0.5 * (lo + hi);
        if rate_at(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Checks that spreading Trojan photons unevenly over two pulse classes
/// (`mu1`, `mu2`) never beats the even split at their mean:
/// `R((μ1+μ2)/2) <= [R(μ1) + R(μ2)]/2`.
pub fn verify_convexity(
    channel: &ChannelParams,
    source: &SourceModel,
    kind: AttackKind,
    length_km: f64,
    mu1: f64,
    mu2: f64,
) -> Result<bool, RateError> {
    let attack = |mu: f64| -> Result<AttackModel, RateError> {
        Ok(match kind {
            AttackKind::NoAttack => AttackModel::NONE,
            _ => AttackModel::new(kind, mu)?,
        })
    };
    // Validate both intensities even when the model ignores them.
    AttackModel::general(mu1)?;
    AttackModel::general(mu2)?;
    let mid = rate_value(channel, source, attack(0.5 * (mu1 + mu2))?, length_km)?;
    let r1 = rate_value(channel, source, attack(mu1)?, length_km)?;
    let r2 = rate_value(channel, source, attack(mu2)?, length_km)?;
    Ok(mid <= 0.5 * (r1 + r2) + CONVEXITY_SLACK)
}
