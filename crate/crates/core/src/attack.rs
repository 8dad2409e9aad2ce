//! Leakage-dependent quantities of the Trojan-horse attack models.
//!
//! Everything here is a function of `mu_out`, the mean number of Trojan
//! photons that leave the transmitter per pulse and reach the eavesdropper.
//! Three attack models are covered:
//!
//! * **general**: the eavesdropper may use the back-reflected light in real
//!   time and tailor channel losses to it. Phase error from the quantum-coin
//!   imbalance through the Bloch-sphere bound.
//! * **passive**: the Trojan light is only measured after basis
//!   reconciliation. Phase error from the loss-tolerant estimate.
//! * **usd**: unambiguous state discrimination on the Trojan light during
//!   transmission; conclusive events are forwarded, inconclusive ones blocked.
//!
//! Maps that would be evaluated outside their domain of validity report
//! [`Leakage::Insecure`] instead of a number.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::Probability;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AttackError {
    #[error("mu_out must be a finite value >= 0, got {0}")]
    BadMuOut(f64),
    #[error("no detections (single-photon yield is 0); rate undefined")]
    ZeroYield,
    #[error("a model without attack cannot carry mu_out = {0}")]
    LeakWithoutAttack(f64),
    #[error("unknown attack kind {0:?} (expected none, general, passive or usd)")]
    UnknownKind(String),
}

/// Which attack model applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackKind {
    #[serde(rename = "none")]
    NoAttack,
    General,
    Passive,
    Usd,
}

impl AttackKind {
    pub const ALL: [AttackKind; 4] = [
        AttackKind::NoAttack,
        AttackKind::General,
        AttackKind::Passive,
        AttackKind::Usd,
    ];

    pub fn label(self) -> &'static str {
        match self {
            AttackKind::NoAttack => "none",
            AttackKind::General => "general",
            AttackKind::Passive => "passive",
            AttackKind::Usd => "usd",
        }
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for AttackKind {
    type Err = AttackError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "none" | "no_attack" | "noattack" => Ok(AttackKind::NoAttack),
            "general" => Ok(AttackKind::General),
            "passive" => Ok(AttackKind::Passive),
            "usd" => Ok(AttackKind::Usd),
            _ => Err(AttackError::UnknownKind(s.to_string())),
        }
    }
}

/// An attack model together with its leakage `mu_out` (photons per pulse).
///
/// Without an attack `mu_out` is exactly 0; the attacked variants accept any
/// `mu_out >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAttack", into = "RawAttack")]
pub struct AttackModel {
    kind: AttackKind,
    mu_out: f64,
}

#[derive(Serialize, Deserialize)]
struct RawAttack {
    kind: AttackKind,
    #[serde(default)]
    mu_out: f64,
}

impl TryFrom<RawAttack> for AttackModel {
    type Error = AttackError;

    fn try_from(raw: RawAttack) -> Result<Self, Self::Error> {
        AttackModel::new(raw.kind, raw.mu_out)
    }
}

impl From<AttackModel> for RawAttack {
    fn from(a: AttackModel) -> Self {
        RawAttack {
            kind: a.kind,
            mu_out: a.mu_out,
        }
    }
}

impl AttackModel {
    pub const NONE: AttackModel = AttackModel {
        kind: AttackKind::NoAttack,
        mu_out: 0.0,
    };

    pub fn new(kind: AttackKind, mu_out: f64) -> Result<Self, AttackError> {
        check_mu(mu_out)?;
        if kind == AttackKind::NoAttack && mu_out != 0.0 {
            return Err(AttackError::LeakWithoutAttack(mu_out));
        }
        Ok(AttackModel { kind, mu_out })
    }

    pub fn general(mu_out: f64) -> Result<Self, AttackError> {
        Self::new(AttackKind::General, mu_out)
    }

    pub fn passive(mu_out: f64) -> Result<Self, AttackError> {
        Self::new(AttackKind::Passive, mu_out)
    }

    pub fn usd(mu_out: f64) -> Result<Self, AttackError> {
        Self::new(AttackKind::Usd, mu_out)
    }

    #[inline]
    pub fn kind(&self) -> AttackKind {
        self.kind
    }

    #[inline]
    pub fn mu_out(&self) -> f64 {
        self.mu_out
    }
}

/// A bound that is either a usable probability or signals that the
/// underlying formula has left its domain, in which case no key is possible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Leakage<T> {
    Bounded(T),
    Insecure,
}

impl<T> Leakage<T> {
    pub fn bounded(self) -> Option<T> {
        match self {
            Leakage::Bounded(v) => Some(v),
            Leakage::Insecure => None,
        }
    }

    pub fn is_insecure(&self) -> bool {
        matches!(self, Leakage::Insecure)
    }
}

fn check_mu(mu_out: f64) -> Result<(), AttackError> {
    if mu_out >= 0.0 && mu_out.is_finite() {
        Ok(())
    } else {
        Err(AttackError::BadMuOut(mu_out))
    }
}

/// Quantum-coin imbalance `Δ = ½·[1 − e^(−μ)·cos μ]`.
pub fn coin_imbalance(mu_out: f64) -> Result<Probability, AttackError> {
    check_mu(mu_out)?;
    // 1 - e^(-μ)cos μ = -expm1(-μ)·cos μ + (1 - cos μ), stable for small μ.
    let one_minus_cos = 2.0 * (mu_out / 2.0).sin().powi(2);
    let value = 0.5 * (-(-mu_out).exp_m1() * mu_out.cos() + one_minus_cos);
    Ok(Probability::saturating(value))
}

/// `Δ' = Δ / Y` with `Y = min(Y_X, Y_Y)`. Insecure once `Δ' >= ½`.
pub fn effective_imbalance(
    delta: Probability,
    yield_min: Probability,
) -> Result<Leakage<Probability>, AttackError> {
    if yield_min.value() <= 0.0 {
        return Err(AttackError::ZeroYield);
    }
    let ratio = delta.value() / yield_min.value();
    if ratio >= 0.5 {
        Ok(Leakage::Insecure)
    } else {
        Ok(Leakage::Bounded(Probability::saturating(ratio)))
    }
}

/// Virtual-protocol phase error under the general attack (Bloch-sphere bound):
///
/// `e' = e + 4Δ'(1−Δ')(1−2e) + 4(1−2Δ')·sqrt(Δ'(1−Δ')·e(1−e))`, capped at ½.
pub fn phase_error_general(e_y: Probability, delta_eff: Probability) -> Leakage<Probability> {
    let d = delta_eff.value();
    if d >= 0.5 {
        return Leakage::Insecure;
    }
    if d == 0.0 {
        return Leakage::Bounded(e_y);
    }
    let e = e_y.value();
    let value = e
        + 4.0 * d * (1.0 - d) * (1.0 - 2.0 * e)
        + 4.0 * (1.0 - 2.0 * d) * (d * (1.0 - d) * e * (1.0 - e)).sqrt();
    Leakage::Bounded(Probability::saturating(value.min(0.5)))
}

/// Phase error under the passive attack:
/// `e' = ½·[1 − (1−2e)·e^(−2μ)]`.
///
/// The honest channel gives the real-protocol asymmetry `a = 1 − 2e`.
pub fn phase_error_passive(e_y: Probability, mu_out: f64) -> Result<Probability, AttackError> {
    check_mu(mu_out)?;
    if mu_out == 0.0 {
        return Ok(e_y);
    }
    let asym = 1.0 - 2.0 * e_y.value();
    let value = 0.5 * (1.0 - asym * (-2.0 * mu_out).exp());
    Ok(Probability::saturating(
        value.min(0.5).max(e_y.value().min(0.5)),
    ))
}

/// Upper bound on the fraction of key-basis detections forwarded after a
/// conclusive unambiguous discrimination: `δ = (1 − e^(−2μ)) / Y`.
/// Insecure once `δ >= 1`.
pub fn usd_conclusive_fraction(
    mu_out: f64,
    yield_min: Probability,
) -> Result<Leakage<Probability>, AttackError> {
    check_mu(mu_out)?;
    if yield_min.value() <= 0.0 {
        return Err(AttackError::ZeroYield);
    }
    // 1 - e^(-2μ) is the IDP limit on a conclusive outcome for |±sqrt(μ)>.
    let conclusive = -(-2.0 * mu_out).exp_m1();
    let delta = conclusive / yield_min.value();
    if delta >= 1.0 {
        Ok(Leakage::Insecure)
    } else {
        Ok(Leakage::Bounded(Probability::saturating(delta)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn p(v: f64) -> Probability {
        Probability::new(v).unwrap()
    }

    /// Direct transcription of the closed form, no rearrangement.
    fn delta_direct(mu: f64) -> f64 {
        0.5 * (1.0 - (-mu).exp() * mu.cos())
    }

    #[test]
    fn coin_imbalance_reference_points() {
        assert_eq!(coin_imbalance(0.0).unwrap().value(), 0.0);
        assert!((coin_imbalance(1e-6).unwrap().value() - 5.0e-7).abs() < 1e-9);
        assert!((coin_imbalance(0.015).unwrap().value() - 7.4995e-3).abs() < 1e-6);
        assert!(coin_imbalance(-1.0).is_err());
        for mu in [1e-3, 0.1, 0.5, 1.0, 3.0] {
            assert_relative_eq!(
                coin_imbalance(mu).unwrap().value(),
                delta_direct(mu),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn coin_imbalance_increases_on_unit_interval() {
        let mut prev = -1.0;
        for i in 0..=1000 {
            let mu = i as f64 / 1000.0;
            let d = coin_imbalance(mu).unwrap().value();
            assert!(d > prev, "Δ not increasing at μ = {mu}");
            prev = d;
        }
    }

    #[test]
    fn effective_imbalance_cases() {
        assert_eq!(
            effective_imbalance(p(0.0), p(0.3)).unwrap(),
            Leakage::Bounded(p(0.0))
        );
        let b = effective_imbalance(p(0.01), p(0.1))
            .unwrap()
            .bounded()
            .unwrap();
        assert_relative_eq!(b.value(), 0.1, max_relative = 1e-15);
        assert_eq!(
            effective_imbalance(p(0.06), p(0.1)).unwrap(),
            Leakage::Insecure
        );
        assert_eq!(
            effective_imbalance(p(0.01), p(0.0)),
            Err(AttackError::ZeroYield)
        );
    }

    #[test]
    fn general_phase_error_cases() {
        assert_eq!(
            phase_error_general(p(0.013), p(0.0)),
            Leakage::Bounded(p(0.013))
        );
        let v = phase_error_general(p(0.0), p(0.01))
            .bounded()
            .unwrap()
            .value();
        assert_relative_eq!(v, 4.0 * 0.01 * 0.99, max_relative = 1e-14);
        let v = phase_error_general(p(0.01), p(0.001388))
            .bounded()
            .unwrap()
            .value();
        assert!(v > 0.01);
        assert!(phase_error_general(p(0.01), p(0.5)).is_insecure());
    }

    #[test]
    fn passive_phase_error_cases() {
        assert_eq!(phase_error_passive(p(0.02), 0.0).unwrap(), p(0.02));
        let v = phase_error_passive(p(0.0), 0.01).unwrap().value();
        assert!((v - 9.901e-3).abs() < 1e-6);
        for mu in [0.0, 1e-4, 0.3, 5.0] {
            assert_eq!(phase_error_passive(p(0.5), mu).unwrap().value(), 0.5);
        }
    }

    #[test]
    fn usd_fraction_cases() {
        assert_eq!(
            usd_conclusive_fraction(0.0, p(0.2)).unwrap(),
            Leakage::Bounded(p(0.0))
        );
        let d = usd_conclusive_fraction(0.01, p(0.1))
            .unwrap()
            .bounded()
            .unwrap()
            .value();
        assert!((d - 0.19801).abs() < 1e-5);
        assert_eq!(
            usd_conclusive_fraction(1.0, p(0.5)).unwrap(),
            Leakage::Insecure
        );
        assert_eq!(
            usd_conclusive_fraction(0.1, p(0.0)),
            Err(AttackError::ZeroYield)
        );
    }

    #[test]
    fn usd_fraction_first_order() {
        let y = p(0.05);
        for mu in [1e-6, 1e-8, 1e-10] {
            let d = usd_conclusive_fraction(mu, y)
                .unwrap()
                .bounded()
                .unwrap()
                .value();
            assert_relative_eq!(d, 2.0 * mu / y.value(), max_relative = 4.0 * mu);
        }
    }

    #[test]
    fn attack_model_invariants() {
        assert!(AttackModel::new(AttackKind::NoAttack, 1e-3).is_err());
        assert!(AttackModel::general(-1.0).is_err());
        assert_eq!(AttackModel::NONE.mu_out(), 0.0);
        assert_eq!(
            "Passive".parse::<AttackKind>().unwrap(),
            AttackKind::Passive
        );
        assert!("shout".parse::<AttackKind>().is_err());
    }

    proptest! {
        #[test]
        fn general_never_lowers_phase_error(e in 0.0f64..=0.5, d in 0.0f64..0.5) {
            let out = phase_error_general(p(e), p(d)).bounded().unwrap().value();
            prop_assert!(out >= e - 1e-15);
            if d > 0.0 && e < 0.5 {
                prop_assert!(out > e);
            }
        }

        #[test]
        fn passive_never_lowers_phase_error(e in 0.0f64..=0.5, mu in 0.0f64..2.0) {
            let out = phase_error_passive(p(e), mu).unwrap().value();
            prop_assert!(out >= e);
            if mu > 0.0 && e < 0.5 {
                prop_assert!(out > e);
            }
        }

        #[test]
        fn passive_is_weaker_than_general(
            e in 0.0f64..=0.5,
            mu in 0.0f64..1.0,
            y in 1e-6f64..=1.0,
        ) {
            let delta = coin_imbalance(mu).unwrap();
            let passive = phase_error_passive(p(e), mu).unwrap().value();
            match effective_imbalance(delta, p(y)).unwrap() {
                Leakage::Insecure => {}
                Leakage::Bounded(d) => {
                    if let Leakage::Bounded(general) = phase_error_general(p(e), d) {
                        prop_assert!(passive <= general.value() + 1e-15);
                    }
                }
            }
        }
    }
}
