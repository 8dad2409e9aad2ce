//! Fiber and detector model: per-pulse yields, gains and error rates for a
//! single-photon source and for a phase-randomized laser with decoy states.
//!
//! The model is the usual asymptotic one for efficient BB84: the basis-sifting
//! factor is 1 and both bases see the same single-photon yield, so
//! `min(Y_X, Y_Y)` is just `Y1`. Decoy estimates are taken in the
//! infinite-decoy limit, where they coincide with the true single-photon
//! quantities.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::Probability;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("fiber length must be a finite value >= 0 km, got {0}")]
    NegativeLength(f64),
    #[error("fiber loss coefficient must be >= 0 dB/km, got {0}")]
    NegativeLoss(f64),
    #[error("error-correction inefficiency must be >= 1, got {0}")]
    BadErrorCorrection(f64),
    #[error("decoy signal intensity must be > 0, got {0}")]
    BadSignalIntensity(f64),
}

/// Constants of the fiber link and of Bob's detectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Fiber attenuation, dB/km.
    pub alpha_db_per_km: f64,
    /// Total detection efficiency of the receiver.
    pub eta_det: Probability,
    /// Probability that a detected photon lands in the wrong detector.
    pub e_opt: Probability,
    /// Dark-count probability per gate.
    pub p_dark: Probability,
    /// Error-correction inefficiency, `f_EC >= 1`.
    pub f_ec: f64,
}

impl ChannelParams {
    pub fn new(
        alpha_db_per_km: f64,
        eta_det: Probability,
        e_opt: Probability,
        p_dark: Probability,
        f_ec: f64,
    ) -> Result<Self, ChannelError> {
        let params = ChannelParams {
            alpha_db_per_km,
            eta_det,
            e_opt,
            p_dark,
            f_ec,
        };
        params.validate()?;
        Ok(params)
    }

    /// 0.2 dB/km fiber, 12.5% detection efficiency, 1% optical error,
    /// 1e-5 dark counts per gate and error correction 20% above the Shannon
    /// limit.
    pub fn standard() -> Self {
        ChannelParams {
            alpha_db_per_km: 0.2,
            eta_det: Probability::saturating(0.125),
            e_opt: Probability::saturating(0.01),
            p_dark: Probability::saturating(1e-5),
            f_ec: 1.2,
        }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if !(self.alpha_db_per_km >= 0.0 && self.alpha_db_per_km.is_finite()) {
            return Err(ChannelError::NegativeLoss(self.alpha_db_per_km));
        }
        if !(self.f_ec >= 1.0 && self.f_ec.is_finite()) {
            return Err(ChannelError::BadErrorCorrection(self.f_ec));
        }
        Ok(())
    }
}

/// Photon source on Alice's side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceModel {
    SinglePhoton,
    /// Phase-randomized laser with decoy states; `signal_mean` is the mean
    /// photon number `s` of the signal pulses.
    Decoy {
        signal_mean: f64,
    },
}

impl SourceModel {
    pub fn decoy(signal_mean: f64) -> Result<Self, ChannelError> {
        let source = SourceModel::Decoy { signal_mean };
        source.validate()?;
        Ok(source)
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        match *self {
            SourceModel::SinglePhoton => Ok(()),
            SourceModel::Decoy { signal_mean } if signal_mean > 0.0 && signal_mean.is_finite() => {
                Ok(())
            }
            SourceModel::Decoy { signal_mean } => {
                Err(ChannelError::BadSignalIntensity(signal_mean))
            }
        }
    }

    /// Short label used in reports and CSV output.
    pub fn label(&self) -> &'static str {
        match self {
            SourceModel::SinglePhoton => "single_photon",
            SourceModel::Decoy { .. } => "decoy",
        }
    }
}

/// What the users observe (or estimate) on the link at one distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkObservables {
    /// Detection rate in the key basis. For a decoy source this is the signal
    /// gain `Q_X^(s)`.
    pub q_x: Probability,
    /// Bit error rate in the key basis (`e_X^(s)` for a decoy source).
    pub e_x: Probability,
    /// Single-photon yield, the same in both bases.
    pub y1: Probability,
    /// Single-photon error rate, the same in both bases.
    pub e1: Probability,
    /// Single-photon gain. Equals `y1` for a single-photon source and
    /// `s·e^(-s)·y1` for a decoy source.
    pub q1: Probability,
}

fn check_length(length_km: f64) -> Result<(), ChannelError> {
    if length_km >= 0.0 && length_km.is_finite() {
        Ok(())
    } else {
        Err(ChannelError::NegativeLength(length_km))
    }
}

/// Overall transmittance `eta_det · 10^(-alpha·L/10)`.
pub fn transmittance(params: &ChannelParams, length_km: f64) -> Result<Probability, ChannelError> {
    check_length(length_km)?;
    let fiber = 10f64.powf(-params.alpha_db_per_km * length_km / 10.0);
    Ok(Probability::saturating(params.eta_det.value() * fiber))
}

/// `(Y1, e1)` for a given overall transmittance.
fn single_photon_yield(params: &ChannelParams, eta: f64) -> (f64, f64) {
    let pd = params.p_dark.value();
    let y1 = eta + (1.0 - eta) * pd;
    let e1 = if y1 > 0.0 {
        (params.e_opt.value() * eta + 0.5 * (1.0 - eta) * pd) / y1
    } else {
        0.5
    };
    (y1, e1)
}

pub fn single_photon_link(
    params: &ChannelParams,
    length_km: f64,
) -> Result<LinkObservables, ChannelError> {
    let eta = transmittance(params, length_km)?.value();
    let (y1, e1) = single_photon_yield(params, eta);
    let y1 = Probability::saturating(y1);
    let e1 = Probability::saturating(e1);
    Ok(LinkObservables {
        q_x: y1,
        e_x: e1,
        y1,
        e1,
        q1: y1,
    })
}

pub fn decoy_link(
    params: &ChannelParams,
    length_km: f64,
    signal_mean: f64,
) -> Result<LinkObservables, ChannelError> {
    SourceModel::Decoy { signal_mean }.validate()?;
    let eta = transmittance(params, length_km)?.value();
    let pd = params.p_dark.value();
    let s = signal_mean;

    let no_click = (-eta * s).exp();
    // 1 - (1-pd)·e^(-ηs), written with exp_m1 to keep precision when ηs is tiny.
    let q_s = pd - (1.0 - pd) * (-eta * s).exp_m1();
    let e_s = if q_s > 0.0 {
        (0.5 * pd * no_click - params.e_opt.value() * (-eta * s).exp_m1()) / q_s
    } else {
        0.5
    };

    let (y1, e1) = single_photon_yield(params, eta);
    let q1 = s * (-s).exp() * y1;
    Ok(LinkObservables {
        q_x: Probability::saturating(q_s),
        e_x: Probability::saturating(e_s),
        y1: Probability::saturating(y1),
        e1: Probability::saturating(e1),
        q1: Probability::saturating(q1),
    })
}

/// Dispatches on the source model.
pub fn link_observables(
    params: &ChannelParams,
    source: &SourceModel,
    length_km: f64,
) -> Result<LinkObservables, ChannelError> {
    match *source {
        SourceModel::SinglePhoton => single_photon_link(params, length_km),
        SourceModel::Decoy { signal_mean } => decoy_link(params, length_km, signal_mean),
    }
}
