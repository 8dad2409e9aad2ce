//! Damage-threshold scaling, photon-flux conversion and the passive isolation
//! budget of a transmitter.
//!
//! The eavesdropper's injected light is capped by the laser-induced damage
//! threshold (LIDT) of a fiber loop at the transmitter entrance, expressed as
//! a photon flux `N` (photons/s onto a 50 μm² core). Trojan light crosses the
//! filter and attenuator twice, the isolators once in their blocking
//! direction, and is reflected once, so
//!
//! ```text
//! γ(dB)      = 2·F + n·I + 2·A + R
//! μ_out(dB)  = χ(dB) + γ(dB),   χ = N / f_A
//! ```
//!
//! The worst case assumes the eavesdropper matches the modulator clock
//! (`f_E = f_A`) and the modulator window (`τ_E = τ_A`).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{db_from_linear, linear_from_db, Decibel, NumericsError};

/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Reference core area for flux figures, m² (50 μm²).
pub const REFERENCE_CORE_AREA_M2: f64 = 50e-12;
/// Largest isolator count considered by [`plan_budget`].
pub const MAX_ISOLATORS: u32 = 5;
/// Attenuator search step, dB.
pub const ATTENUATOR_STEP_DB: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BudgetError {
    #[error("{what} must be a finite value > 0, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("{what} must be <= 0 dB, got {value}")]
    Amplifying { what: &'static str, value: f64 },
    #[error("component catalog has no {0} values")]
    EmptyCatalog(&'static str),
    #[error("no combination of catalog components reaches {0}")]
    Infeasible(Decibel),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

fn positive(what: &'static str, value: f64) -> Result<f64, BudgetError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(BudgetError::NonPositive { what, value })
    }
}

fn attenuating(what: &'static str, value: Decibel) -> Result<Decibel, BudgetError> {
    if value.value() <= 0.0 {
        Ok(value)
    } else {
        Err(BudgetError::Amplifying {
            what,
            value: value.value(),
        })
    }
}

/// A damage threshold expressed as a photon flux, valid at one pulse width
/// and one wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LidtSpec {
    /// Photons per second onto the 50 μm² reference core area.
    pub photon_flux: f64,
    /// Pulse width the flux refers to, s.
    pub pulse_width_ref: f64,
    /// Wavelength the flux refers to, m.
    pub wavelength_ref: f64,
}

/// Named damage-threshold presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LidtPreset {
    /// Softening point of fused silica: 4.3e23 photons/s.
    Conservative,
    /// Fiber thermal fuse, rounded up to 1e20 photons/s (about 12.8 W CW).
    FiberFuse,
}

impl LidtPreset {
    pub fn photon_flux(self) -> f64 {
        match self {
            LidtPreset::Conservative => 4.3e23,
            LidtPreset::FiberFuse => 1e20,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LidtPreset::Conservative => "conservative",
            LidtPreset::FiberFuse => "fiber_fuse",
        }
    }

    /// Threshold at 1550 nm and a 1 ns reference window. With `compensate_wavelength`
    /// the flux is raised by 10% to cover probes out to the fiber bend edge.
    pub fn spec(self, compensate_wavelength: bool) -> LidtSpec {
        let bump = if compensate_wavelength { 1.1 } else { 1.0 };
        LidtSpec {
            photon_flux: self.photon_flux() * bump,
            pulse_width_ref: 1e-9,
            wavelength_ref: 1550e-9,
        }
    }
}

impl std::str::FromStr for LidtPreset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "conservative" | "silica" => Ok(LidtPreset::Conservative),
            "fiber_fuse" | "fuse" | "working" => Ok(LidtPreset::FiberFuse),
            other => Err(format!("unknown LIDT preset {other:?}")),
        }
    }
}

impl LidtSpec {
    pub fn new(
        photon_flux: f64,
        pulse_width_ref: f64,
        wavelength_ref: f64,
    ) -> Result<Self, BudgetError> {
        Ok(LidtSpec {
            photon_flux: positive("photon flux", photon_flux)?,
            pulse_width_ref: positive("reference pulse width", pulse_width_ref)?,
            wavelength_ref: positive("reference wavelength", wavelength_ref)?,
        })
    }
}

/// Rescales the threshold to a new pulse width:
/// `LIDT(τ1) / LIDT(τ2) = sqrt(τ1 / τ2)`.
pub fn lidt_scale_pulse_width(spec: &LidtSpec, tau_new: f64) -> Result<LidtSpec, BudgetError> {
    let tau_new = positive("pulse width", tau_new)?;
    Ok(LidtSpec {
        photon_flux: spec.photon_flux * (tau_new / spec.pulse_width_ref).sqrt(),
        pulse_width_ref: tau_new,
        wavelength_ref: spec.wavelength_ref,
    })
}

/// Rescales the threshold to a new wavelength:
/// `LIDT(λ1) / LIDT(λ2) = sqrt(λ1 / λ2)`.
pub fn lidt_scale_wavelength(spec: &LidtSpec, lambda_new: f64) -> Result<LidtSpec, BudgetError> {
    let lambda_new = positive("wavelength", lambda_new)?;
    Ok(LidtSpec {
        photon_flux: spec.photon_flux * (lambda_new / spec.wavelength_ref).sqrt(),
        pulse_width_ref: spec.pulse_width_ref,
        wavelength_ref: lambda_new,
    })
}

/// Photons per second carried by `power_w` watts at `wavelength_m`.
pub fn photon_flux_from_power(power_w: f64, wavelength_m: f64) -> Result<f64, BudgetError> {
    let power_w = positive("power", power_w)?;
    let wavelength_m = positive("wavelength", wavelength_m)?;
    Ok(power_w * wavelength_m / (PLANCK * SPEED_OF_LIGHT))
}

/// Optical power in watts corresponding to a photon flux.
pub fn power_from_photon_flux(flux: f64, wavelength_m: f64) -> Result<f64, BudgetError> {
    let flux = positive("photon flux", flux)?;
    let wavelength_m = positive("wavelength", wavelength_m)?;
    Ok(flux * PLANCK * SPEED_OF_LIGHT / wavelength_m)
}

/// Isolation values of the transmitter components, all in dB and `<= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsolationBudget {
    pub filter_db: Decibel,
    /// Isolation of one isolator.
    pub isolator_db: Decibel,
    pub isolator_count: u32,
    pub attenuator_db: Decibel,
    pub reflectivity_db: Decibel,
}

impl IsolationBudget {
    pub fn new(
        filter_db: Decibel,
        isolator_db: Decibel,
        isolator_count: u32,
        attenuator_db: Decibel,
        reflectivity_db: Decibel,
    ) -> Result<Self, BudgetError> {
        Ok(IsolationBudget {
            filter_db: attenuating("filter", filter_db)?,
            isolator_db: attenuating("isolator", isolator_db)?,
            isolator_count,
            attenuator_db: attenuating("attenuator", attenuator_db)?,
            reflectivity_db: attenuating("reflectivity", reflectivity_db)?,
        })
    }

    pub fn validate(&self) -> Result<(), BudgetError> {
        IsolationBudget::new(
            self.filter_db,
            self.isolator_db,
            self.isolator_count,
            self.attenuator_db,
            self.reflectivity_db,
        )
        .map(|_| ())
    }
}

/// Round-trip isolation `γ = 2F + n·I + 2A + R`, in dB.
pub fn isolation_total(b: &IsolationBudget) -> Decibel {
    2.0 * b.filter_db
        + (b.isolator_count as f64) * b.isolator_db
        + 2.0 * b.attenuator_db
        + b.reflectivity_db
}

/// `χ = N / f_A` in dB.
pub fn chi_db(n_photons: f64, f_a_hz: f64) -> Result<Decibel, BudgetError> {
    let n = positive("photon flux", n_photons)?;
    let f = positive("clock rate", f_a_hz)?;
    Ok(db_from_linear(n)? - db_from_linear(f)?)
}

/// Leakage `μ_out = N·γ / f_A`, evaluated in dB.
pub fn mu_out_bound(n_photons: f64, f_a_hz: f64, gamma_db: Decibel) -> Result<f64, BudgetError> {
    Ok(linear_from_db(chi_db(n_photons, f_a_hz)? + gamma_db))
}

/// Isolation needed to bring leakage down to `mu_out_target`: `γ = μ_out − χ`.
pub fn required_isolation(
    mu_out_target: f64,
    n_photons: f64,
    f_a_hz: f64,
) -> Result<Decibel, BudgetError> {
    let target = db_from_linear(positive("target mu_out", mu_out_target)?)?;
    Ok(target - chi_db(n_photons, f_a_hz)?)
}

/// Component values a planner may choose from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentCatalog {
    /// Per-unit isolator values, dB.
    pub isolators_db: Vec<Decibel>,
    /// Achievable total reflectivities, dB.
    pub reflectivities_db: Vec<Decibel>,
    /// Filter insertion values at the operating wavelength, dB.
    #[serde(default = "default_filters")]
    pub filters_db: Vec<Decibel>,
}

fn default_filters() -> Vec<Decibel> {
    vec![Decibel::ZERO]
}

impl Default for ComponentCatalog {
    /// Common dual-stage isolators (50 dB) and selected units (60 dB);
    /// connector reflectivity 40 dB, or 50 dB with angled connectors or
    /// splices; filter transparent at its center wavelength.
    fn default() -> Self {
        ComponentCatalog {
            isolators_db: vec![Decibel::new(-50.0), Decibel::new(-60.0)],
            reflectivities_db: vec![Decibel::new(-40.0), Decibel::new(-50.0)],
            filters_db: default_filters(),
        }
    }
}

impl ComponentCatalog {
    pub fn validate(&self) -> Result<(), BudgetError> {
        let groups: [(&'static str, &[Decibel]); 3] = [
            ("isolator", &self.isolators_db),
            ("reflectivity", &self.reflectivities_db),
            ("filter", &self.filters_db),
        ];
        for (what, values) in groups {
            if values.is_empty() {
                return Err(BudgetError::EmptyCatalog(what));
            }
            for &v in values {
                attenuating(what, v)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanConstraints {
    /// Largest attenuator magnitude allowed, dB (positive number).
    pub max_attenuator_db: f64,
    /// `false` for single-photon sources, where an attenuator would eat the
    /// signal.
    pub allow_attenuator: bool,
}

impl Default for PlanConstraints {
    fn default() -> Self {
        PlanConstraints {
            max_attenuator_db: 35.0,
            allow_attenuator: true,
        }
    }
}

/// Enumerates every component combination reaching `gamma_target_db`.
///
/// Searches `n = 0..=5` isolators of one catalog type, every catalog
/// reflectivity and filter, and attenuators from 0 dB in 5 dB steps up to the
/// allowed maximum. Results are sorted by isolator count, then attenuator
/// magnitude, then isolator, reflectivity and filter magnitude.
pub fn plan_budget(
    gamma_target_db: Decibel,
    catalog: &ComponentCatalog,
    constraints: &PlanConstraints,
) -> Result<Vec<IsolationBudget>, BudgetError> {
    catalog.validate()?;
    let attenuators: Vec<Decibel> = if constraints.allow_attenuator {
        let max = constraints.max_attenuator_db.abs();
        let steps = (max / ATTENUATOR_STEP_DB + 1e-9).floor() as u32;
        (0..=steps)
            .map(|k| Decibel::new(-(k as f64) * ATTENUATOR_STEP_DB))
            .collect()
    } else {
        vec![Decibel::ZERO]
    };

    let mut plans = Vec::new();
    for n in 0..=MAX_ISOLATORS {
        // Without isolators the isolator value is irrelevant; emit it once.
        let isolators: &[Decibel] = if n == 0 {
            &[Decibel::ZERO]
        } else {
            &catalog.isolators_db
        };
        for &iso in isolators {
            for &att in &attenuators {
                for &refl in &catalog.reflectivities_db {
                    for &filt in &catalog.filters_db {
                        let b = IsolationBudget {
                            filter_db: filt,
                            isolator_db: iso,
                            isolator_count: n,
                            attenuator_db: att,
                            reflectivity_db: refl,
                        };
                        if meets_target(&b, gamma_target_db) {
                            plans.push(b);
                        }
                    }
                }
            }
        }
    }
    if plans.is_empty() {
        return Err(BudgetError::Infeasible(gamma_target_db));
    }
    plans.sort_by(|a, b| {
        let key = |x: &IsolationBudget| {
            (
                x.isolator_count,
                x.attenuator_db.value().abs(),
                x.isolator_db.value().abs(),
                x.reflectivity_db.value().abs(),
                x.filter_db.value().abs(),
            )
        };
        let (ka, kb) = (key(a), key(b));
        ka.0.cmp(&kb.0)
            .then(ka.1.total_cmp(&kb.1))
            .then(ka.2.total_cmp(&kb.2))
            .then(ka.3.total_cmp(&kb.3))
            .then(ka.4.total_cmp(&kb.4))
    });
    plans.dedup();
    Ok(plans)
}

/// dB sums of round catalog values are exact in binary floating point only
/// up to rounding, so the comparison allows 1e-9 dB.
fn meets_target(b: &IsolationBudget, target: Decibel) -> bool {
    isolation_total(b).value() <= target.value() + 1e-9
}

/// A worked component combination for a given clock rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceDesign {
    pub label: &'static str,
    pub clock_hz: f64,
    pub isolation_db: f64,
    pub budget: IsolationBudget,
}

const fn design(
    label: &'static str,
    clock_hz: f64,
    isolation_db: f64,
    r: f64,
    a: f64,
    i: f64,
    n: u32,
) -> ReferenceDesign {
    ReferenceDesign {
        label,
        clock_hz,
        isolation_db,
        budget: IsolationBudget {
            filter_db: Decibel::new(0.0),
            isolator_db: Decibel::new(i),
            isolator_count: n,
            attenuator_db: Decibel::new(a),
            reflectivity_db: Decibel::new(r),
        },
    }
}

/// Practical designs meeting `μ_out = 1e-6` with `N = 1e20` photons/s and a
/// transparent filter. Starred rows use no attenuator (single-photon sources,
/// receivers).
pub const REFERENCE_DESIGNS: [ReferenceDesign; 6] = [
    design("1GHz", 1e9, -170.0, -40.0, -35.0, -60.0, 1),
    design("1GHz*", 1e9, -170.0, -50.0, 0.0, -60.0, 2),
    design("1MHz", 1e6, -200.0, -40.0, -30.0, -50.0, 2),
    design("1MHz*", 1e6, -200.0, -50.0, 0.0, -50.0, 3),
    design("1kHz", 1e3, -230.0, -40.0, -35.0, -60.0, 2),
    design("1kHz*", 1e3, -230.0, -50.0, 0.0, -60.0, 3),
];

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn db(v: f64) -> Decibel {
        Decibel::new(v)
    }

    fn budget(f: f64, i: f64, n: u32, a: f64, r: f64) -> IsolationBudget {
        IsolationBudget::new(db(f), db(i), n, db(a), db(r)).unwrap()
    }

    fn spec() -> LidtSpec {
        LidtSpec::new(1e20, 1e-9, 1550e-9).unwrap()
    }

    #[test]
    fn pulse_width_scaling() {
        let s = spec();
        assert_eq!(lidt_scale_pulse_width(&s, 1e-9).unwrap(), s);
        assert_relative_eq!(
            lidt_scale_pulse_width(&s, 4e-9).unwrap().photon_flux,
            2e20,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            lidt_scale_pulse_width(&s, 1e-11).unwrap().photon_flux,
            1e19,
            max_relative = 1e-12
        );
        assert!(lidt_scale_pulse_width(&s, 0.0).is_err());
    }

    #[test]
    fn wavelength_scaling() {
        let s = spec();
        assert_eq!(lidt_scale_wavelength(&s, 1550e-9).unwrap(), s);
        let f = lidt_scale_wavelength(&s, 1850e-9).unwrap().photon_flux / s.photon_flux;
        assert!((f - 1.0925).abs() < 1e-4 && f < 1.10);
        let f = lidt_scale_wavelength(&s, 775e-9).unwrap().photon_flux / s.photon_flux;
        assert_relative_eq!(f, 0.5f64.sqrt(), max_relative = 1e-12);
        assert!(lidt_scale_wavelength(&s, -1.0).is_err());
    }

    #[test]
    fn photon_flux_conversions() {
        let rel = |got: f64, want: f64| (got - want).abs() / want;
        assert!(rel(photon_flux_from_power(5.5e4, 1.55e-6).unwrap(), 4.3e23) <= 0.02);
        assert!(rel(photon_flux_from_power(2.0, 1550e-9).unwrap(), 1.6e19) <= 0.03);
        assert!(rel(photon_flux_from_power(12.8, 1550e-9).unwrap(), 1.0e20) <= 0.02);
        assert!(photon_flux_from_power(0.0, 1550e-9).is_err());
        let p = power_from_photon_flux(1e20, 1550e-9).unwrap();
        assert!((p - 12.8).abs() < 0.1);
    }

    #[test]
    fn presets() {
        assert_eq!(LidtPreset::Conservative.spec(false).photon_flux, 4.3e23);
        assert_eq!(LidtPreset::FiberFuse.spec(false).photon_flux, 1e20);
        assert_relative_eq!(
            LidtPreset::FiberFuse.spec(true).photon_flux,
            1.1e20,
            max_relative = 1e-15
        );
        assert_eq!(
            "fiber-fuse".parse::<LidtPreset>().unwrap(),
            LidtPreset::FiberFuse
        );
    }

    #[test]
    fn isolation_totals() {
        assert_eq!(
            isolation_total(&budget(0.0, -60.0, 1, -35.0, -40.0)).value(),
            -170.0
        );
        assert_eq!(
            isolation_total(&budget(0.0, -50.0, 3, 0.0, -50.0)).value(),
            -200.0
        );
        assert_eq!(isolation_total(&budget(0.0, 0.0, 0, 0.0, 0.0)).value(), 0.0);
        assert!(IsolationBudget::new(db(1.0), db(-50.0), 1, db(0.0), db(-40.0)).is_err());
    }

    #[test]
    fn leakage_from_isolation() {
        assert_relative_eq!(
            mu_out_bound(1e20, 1e9, db(-170.0)).unwrap(),
            1e-6,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            mu_out_bound(1e20, 1e6, db(-200.0)).unwrap(),
            1e-6,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            mu_out_bound(3e7, 3e7, db(0.0)).unwrap(),
            1.0,
            max_relative = 1e-12
        );
        assert!(mu_out_bound(0.0, 1e9, db(-10.0)).is_err());
    }

    #[test]
    fn isolation_for_target() {
        assert_relative_eq!(
            required_isolation(1e-6, 1e20, 1e9).unwrap().value(),
            -170.0,
            epsilon = 1e-9
        );
        assert_relative_eq!(
            required_isolation(1e-6, 1e20, 1e3).unwrap().value(),
            -230.0,
            epsilon = 1e-9
        );
        assert_eq!(required_isolation(1.0, 1e9, 1e9).unwrap().value(), 0.0);
        assert_relative_eq!(chi_db(1e20, 1e9).unwrap().value(), 110.0, epsilon = 1e-12);
    }

    #[test]
    fn reference_designs_meet_their_targets() {
        for row in REFERENCE_DESIGNS {
            let total = isolation_total(&row.budget).value();
            assert!(total <= row.isolation_db, "{}: {total}", row.label);
            let need = required_isolation(1e-6, 1e20, row.clock_hz)
                .unwrap()
                .value();
            assert!(
                (need - row.isolation_db).abs() < 1e-9,
                "{}: {need}",
                row.label
            );
        }
    }

    #[test]
    fn plan_contains_practical_rows() {
        let cat = ComponentCatalog::default();
        let plans = plan_budget(db(-170.0), &cat, &PlanConstraints::default()).unwrap();
        assert!(plans.contains(&budget(0.0, -60.0, 1, -35.0, -40.0)));

        let no_att = PlanConstraints {
            allow_attenuator: false,
            ..PlanConstraints::default()
        };
        let plans = plan_budget(db(-170.0), &cat, &no_att).unwrap();
        assert!(plans.contains(&budget(0.0, -60.0, 2, 0.0, -50.0)));
        assert!(plans.iter().all(|b| b.attenuator_db.value() == 0.0));
        // One isolator cannot reach -170 dB without an attenuator.
        assert!(plans.iter().all(|b| b.isolator_count >= 2));
    }

    #[test]
    fn plan_for_trivial_target() {
        let plans = plan_budget(
            db(0.0),
            &ComponentCatalog::default(),
            &PlanConstraints::default(),
        )
        .unwrap();
        let first = plans[0];
        assert_eq!(first.isolator_count, 0);
        assert_eq!(first.attenuator_db.value(), 0.0);
    }

    #[test]
    fn plan_ordering_and_soundness() {
        let plans = plan_budget(
            db(-200.0),
            &ComponentCatalog::default(),
            &PlanConstraints::default(),
        )
        .unwrap();
        for w in plans.windows(2) {
            let a = (w[0].isolator_count, w[0].attenuator_db.value().abs());
            let b = (w[1].isolator_count, w[1].attenuator_db.value().abs());
            assert!(a <= b);
        }
        for p in &plans {
            let recheck = 2.0 * p.filter_db.value()
                + p.isolator_count as f64 * p.isolator_db.value()
                + 2.0 * p.attenuator_db.value()
                + p.reflectivity_db.value();
            assert!(recheck <= -200.0 + 1e-9);
        }
    }

    #[test]
    fn plan_infeasible_and_bad_catalog() {
        let err = plan_budget(
            db(-1000.0),
            &ComponentCatalog::default(),
            &PlanConstraints::default(),
        );
        assert!(matches!(err, Err(BudgetError::Infeasible(_))));
        let mut cat = ComponentCatalog::default();
        cat.isolators_db.clear();
        assert_eq!(
            plan_budget(db(-10.0), &cat, &PlanConstraints::default()),
            Err(BudgetError::EmptyCatalog("isolator"))
        );
    }

    proptest! {
        #[test]
        fn scaling_round_trips(flux in 1e10f64..1e25, tau in 1e-12f64..1e-3, tau2 in 1e-12f64..1e-3,
                               lam in 4e-7f64..2e-6, lam2 in 4e-7f64..2e-6) {
            let s = LidtSpec::new(flux, tau, lam).unwrap();
            let back = lidt_scale_pulse_width(&lidt_scale_pulse_width(&s, tau2).unwrap(), tau).unwrap();
            prop_assert!(((back.photon_flux - flux) / flux).abs() <= 1e-12);
            let back = lidt_scale_wavelength(&lidt_scale_wavelength(&s, lam2).unwrap(), lam).unwrap();
            prop_assert!(((back.photon_flux - flux) / flux).abs() <= 1e-12);
        }

        #[test]
        fn isolation_total_is_linear(f in -10.0f64..=0.0, i in -70.0f64..=0.0, n in 0u32..6,
                                     a in -40.0f64..=0.0, r in -60.0f64..=0.0) {
            let b = budget(f, i, n, a, r);
            let more = IsolationBudget { isolator_count: n + 1, ..b };
            let step = isolation_total(&more).value() - isolation_total(&b).value();
            prop_assert!((step - i).abs() < 1e-9);
        }

        #[test]
        fn flux_is_linear(p in 1e-3f64..1e5, lam in 4e-7f64..2e-6, k in 0.1f64..10.0) {
            let base = photon_flux_from_power(p, lam).unwrap();
            let scaled_p = photon_flux_from_power(k * p, lam).unwrap();
            let scaled_l = photon_flux_from_power(p, k * lam).unwrap();
            prop_assert!((scaled_p / base - k).abs() <= 1e-12 * k);
            prop_assert!((scaled_l / base - k).abs() <= 1e-12 * k);
        }
    }
}

#[cfg(test)]
mod plan_properties {
    use proptest::prelude::*;

    use super::{plan_budget, ComponentCatalog, PlanConstraints};
    use crate::numerics::Decibel;

    proptest! {
        #[test]
        fn every_plan_meets_its_target(target in -300.0f64..0.0, allow in any::<bool>(), max_att in 0.0f64..40.0) {
            let constraints = PlanConstraints { max_attenuator_db: max_att, allow_attenuator: allow };
            if let Ok(plans) = plan_budget(Decibel::new(target), &ComponentCatalog::default(), &constraints) {
                for p in plans {
                    let total = 2.0 * p.filter_db.value()
                        + f64::from(p.isolator_count) * p.isolator_db.value()
                        + 2.0 * p.attenuator_db.value()
                        + p.reflectivity_db.value();
                    prop_assert!(total <= target + 1e-9);
                    prop_assert!(p.attenuator_db.value().abs() <= max_att + 1e-9);
                    prop_assert!(allow || p.attenuator_db.value() == 0.0);
                }
            }
        }
    }
}
