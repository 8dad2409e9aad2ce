//! Ingestion of reflectometry peaks and isolator/filter spectra, and the two
//! worst-case figures derived from them: total reflectivity `R` and spectral
//! isolation.
//!
//! Trace CSV: `distance_m,reflectivity_db,polarization`, polarization `s`
//! (short arm) or `l` (long arm). Spectrum CSV: `wavelength_nm,isolation_db`.
//! Blank lines and lines starting with `#` are skipped; a header line whose
//! first field is not numeric is skipped when it is the first data line.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{db_from_linear, linear_from_db, Decibel};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CharacterizationError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {what} {value} dB is positive; passive components only attenuate")]
    PositiveDb {
        line: usize,
        what: &'static str,
        value: f64,
    },
    #[error("no reflectors in region [{d_min}, {d_max}] m")]
    NoReflectors { d_min: f64, d_max: f64 },
    #[error("invalid region [{0}, {1}]")]
    BadRegion(f64, f64),
    #[error("spectral curve needs at least 2 samples with strictly increasing wavelength")]
    BadCurve,
    #[error("band [{lo}, {hi}] nm lies outside curve support [{min}, {max}] nm")]
    OutsideSupport {
        lo: f64,
        hi: f64,
        min: f64,
        max: f64,
    },
}

/// Which interferometer arm the probe polarization was aligned to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarization {
    ShortArm,
    LongArm,
}

impl Polarization {
    pub fn tag(self) -> &'static str {
        match self {
            Polarization::ShortArm => "s",
            Polarization::LongArm => "l",
        }
    }
}

impl FromStr for Polarization {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "s" => Ok(Polarization::ShortArm),
            "l" => Ok(Polarization::LongArm),
            other => Err(format!(
                "invalid polarization tag {other:?} (expected s or l)"
            )),
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReflectionPeak {
    /// Distance from the module entrance, m.
    pub distance_m: f64,
    pub reflectivity_db: Decibel,
    pub polarization: Polarization,
}

/// Data lines as `(line_number, fields)`.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            None
        } else {
            Some((i + 1, line.split(',').map(str::trim).collect()))
        }
    })
}

fn is_header(fields: &[&str]) -> bool {
    fields.first().is_some_and(|f| f.parse::<f64>().is_err())
}

fn number(line: usize, field: &str, what: &str) -> Result<f64, CharacterizationError> {
    let v: f64 = field.parse().map_err(|_| CharacterizationError::Parse {
        line,
        message: format!("{what} {field:?} is not a number"),
    })?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CharacterizationError::Parse {
            line,
            message: format!("{what} {field:?} is not finite"),
        })
    }
}

fn field_count(line: usize, fields: &[&str], want: usize) -> Result<(), CharacterizationError> {
    if fields.len() == want {
        Ok(())
    } else {
        Err(CharacterizationError::Parse {
            line,
            message: format!("expected {want} fields, found {}", fields.len()),
        })
    }
}

/// Parses a trace CSV into peaks, in file order.
pub fn parse_trace(text: &str) -> Result<Vec<ReflectionPeak>, CharacterizationError> {
    let mut peaks = Vec::new();
    let mut first = true;
    for (line, fields) in data_lines(text) {
        if std::mem::take(&mut first) && is_header(&fields) {
            continue;
        }
        field_count(line, &fields, 3)?;
        let distance_m = number(line, fields[0], "distance")?;
        if distance_m < 0.0 {
            return Err(CharacterizationError::Parse {
                line,
                message: format!("distance {distance_m} m is negative"),
            });
        }
        let db = number(line, fields[1], "reflectivity")?;
        if db > 0.0 {
            return Err(CharacterizationError::PositiveDb {
                line,
                what: "reflectivity",
                value: db,
            });
        }
        let polarization = fields[2]
            .parse()
            .map_err(|message| CharacterizationError::Parse { line, message })?;
        peaks.push(ReflectionPeak {
            distance_m,
            reflectivity_db: Decibel::new(db),
            polarization,
        });
    }
    Ok(peaks)
}

/// Writes peaks back in the trace CSV format.
pub fn write_trace(peaks: &[ReflectionPeak]) -> String {
    let mut out = String::from("distance_m,reflectivity_db,polarization\n");
    for p in peaks {
        out.push_str(&format!(
            "{},{},{}\n",
            p.distance_m,
            p.reflectivity_db.value(),
            p.polarization
        ));
    }
    out
}

/// Upper bound on the total reflectivity of the components between `d_min`
/// and `d_max` (inclusive).
///
/// Reflectivity is linear in the input polarization, so for any probe
/// `a|s> + b|l>` with `|a|² + |b|² = 1` it is at most `R(s) + R(l)`: the
/// linear values of every peak in the region are added across both arms.
pub fn reflectivity_bound(
    peaks: &[ReflectionPeak],
    region: (f64, f64),
) -> Result<Decibel, CharacterizationError> {
    let (d_min, d_max) = region;
    if !(d_min.is_finite() && d_max.is_finite() && d_min <= d_max) {
        return Err(CharacterizationError::BadRegion(d_min, d_max));
    }
    let in_region: Vec<f64> = peaks
        .iter()
        .filter(|p| p.distance_m >= d_min && p.distance_m <= d_max)
        .map(|p| linear_from_db(p.reflectivity_db))
        .collect();
    if in_region.is_empty() {
        return Err(CharacterizationError::NoReflectors { d_min, d_max });
    }
    let total: f64 = in_region.iter().sum();
    db_from_linear(total).map_err(|_| CharacterizationError::NoReflectors { d_min, d_max })
}

/// Isolation (or insertion) versus wavelength, sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCurve {
    samples: Vec<(f64, Decibel)>,
}

impl SpectralCurve {
    pub fn new(samples: Vec<(f64, Decibel)>) -> Result<Self, CharacterizationError> {
        if samples.len() < 2
            || samples
                .windows(2)
                .any(|w| w[0].0.partial_cmp(&w[1].0) != Some(std::cmp::Ordering::Less))
        {
            return Err(CharacterizationError::BadCurve);
        }
        if samples
            .iter()
            .any(|s| !s.0.is_finite() || !s.1.value().is_finite())
        {
            return Err(CharacterizationError::BadCurve);
        }
        Ok(SpectralCurve { samples })
    }

    /// Same value at `lo` and `hi`.
    pub fn flat(lo_nm: f64, hi_nm: f64, value: Decibel) -> Result<Self, CharacterizationError> {
        SpectralCurve::new(vec![(lo_nm, value), (hi_nm, value)])
    }

    pub fn samples(&self) -> &[(f64, Decibel)] {
        &self.samples
    }

    pub fn support(&self) -> (f64, f64) {
        (self.samples[0].0, self.samples[self.samples.len() - 1].0)
    }

    /// Linear interpolation; `None` outside the sampled support.
    pub fn at(&self, wavelength_nm: f64) -> Option<Decibel> {
        let (lo, hi) = self.support();
        if wavelength_nm < lo || wavelength_nm > hi {
            return None;
        }
        let idx = self.samples.partition_point(|s| s.0 < wavelength_nm);
        if idx < self.samples.len() && self.samples[idx].0 == wavelength_nm {
            return Some(self.samples[idx].1);
        }
        let (x0, y0) = self.samples[idx - 1];
        let (x1, y1) = self.samples[idx];
        let t = (wavelength_nm - x0) / (x1 - x0);
        Some(Decibel::new(y0.value() + t * (y1.value() - y0.value())))
    }
}

/// Parses a spectrum CSV.
pub fn parse_spectrum(text: &str) -> Result<SpectralCurve, CharacterizationError> {
    let mut samples = Vec::new();
    let mut first = true;
    for (line, fields) in data_lines(text) {
        if std::mem::take(&mut first) && is_header(&fields) {
            continue;
        }
        field_count(line, &fields, 2)?;
        let wl = number(line, fields[0], "wavelength")?;
        let db = number(line, fields[1], "isolation")?;
        if db > 0.0 {
            return Err(CharacterizationError::PositiveDb {
                line,
                what: "isolation",
                value: db,
            });
        }
        if let Some(&(prev, _)) = samples.last() {
            if wl <= prev {
                return Err(CharacterizationError::Parse {
                    line,
                    message: format!("wavelength {wl} nm does not increase"),
                });
            }
        }
        samples.push((wl, Decibel::new(db)));
    }
    SpectralCurve::new(samples)
}

/// Worst case (least negative) over `band` of `n·I(λ) + 2·F(λ)`.
///
/// Both curves are piecewise linear, so the maximum is attained at a band
/// edge or at one of the sample wavelengths inside the band.
pub fn spectral_isolation(
    isolator: &SpectralCurve,
    filter: &SpectralCurve,
    n_isolators: u32,
    band: (f64, f64),
) -> Result<Decibel, CharacterizationError> {
    let (lo, hi) = band;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(CharacterizationError::BadRegion(lo, hi));
    }
    for curve in [isolator, filter] {
        let (min, max) = curve.support();
        if lo < min || hi > max {
            return Err(CharacterizationError::OutsideSupport { lo, hi, min, max });
        }
    }
    let n = n_isolators as f64;
    let candidates = [lo, hi]
        .into_iter()
        .chain(isolator.samples.iter().map(|s| s.0))
        .chain(filter.samples.iter().map(|s| s.0))
        .filter(|&w| w >= lo && w <= hi);
    let worst = candidates
        .map(|w| {
            // Both lookups are inside the checked support.
            let i = isolator.at(w).map_or(f64::NEG_INFINITY, Decibel::value);
            let f = filter.at(w).map_or(f64::NEG_INFINITY, Decibel::value);
            n * i + 2.0 * f
        })
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(Decibel::new(worst))
}
