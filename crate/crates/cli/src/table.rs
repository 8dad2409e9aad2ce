//! Sweep CSV and plot script.

use std::io::{Read, Write};
use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};

/// Rates below this are written as 0.
pub const RATE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub length_km: f64,
    pub mu_out: f64,
    pub attack: String,
    pub source: String,
    pub rate: f64,
}

/// Stable sort by attack label, then `mu_out`, then length.
pub fn sort_rows(rows: &mut [SweepRow]) {
    rows.sort_by(|a, b| {
        a.attack
            .cmp(&b.attack)
            .then(a.mu_out.total_cmp(&b.mu_out))
            .then(a.length_km.total_cmp(&b.length_km))
    });
}

pub fn floor_rate(rate: f64) -> f64 {
    if rate < RATE_FLOOR {
        0.0
    } else {
        rate
    }
}

pub fn write_rows<W: Write>(out: W, rows: &[SweepRow]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: Read>(input: R) -> anyhow::Result<Vec<SweepRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .enumerate()
        .map(|(i, r)| r.with_context(|| format!("sweep CSV record {}", i + 1)))
        .collect()
}

/// gnuplot script plotting one curve per `(attack, mu_out)` block of `csv`.
pub fn gnuplot_script(csv_path: &Path, title: &str, rows: &[SweepRow]) -> String {
    let data = csv_path.display().to_string().replace('\'', "''");
    let png = csv_path
        .with_extension("png")
        .display()
        .to_string()
        .replace('\'', "''");
    let mut blocks: Vec<(&str, f64)> = Vec::new();
    for r in rows {
        if blocks.last() != Some(&(r.attack.as_str(), r.mu_out)) {
            blocks.push((r.attack.as_str(), r.mu_out));
        }
    }
    let mut s = String::new();
    s.push_str("set terminal pngcairo size 900,600\n");
    s.push_str(&format!("set output '{png}'\n"));
    s.push_str(&format!("set title '{}'\n", title.replace('\'', "''")));
    s.push_str("set datafile separator ','\n");
    s.push_str("set logscale y\n");
    s.push_str("set format y '10^{%L}'\n");
    s.push_str("set xlabel 'Distance (km)'\n");
    s.push_str("set ylabel 'Key rate (bits/pulse)'\n");
    s.push_str("set key top right\n");
    let curves: Vec<String> = blocks
        .iter()
        .map(|(attack, mu)| {
            let label = if *attack == "none" {
                "no attack".to_string()
            } else {
                format!("{attack}, mu_out = {mu:e}")
            };
            format!(
                "'{data}' every ::1 using 1:((strcol(3) eq '{attack}' && $2 == {mu:e} && $5 > 0) ? $5 : 1/0) \
                 with lines title '{label}'"
            )
        })
        .collect();
    s.push_str("plot ");
    s.push_str(&curves.join(", \\\n     "));
    s.push('\n');
    s
}
