use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{require_positive, ChannelError, Result};

const SHIPPED_DEFAULT_CSV: &str = include_str!("../../data/absorption_default.csv");

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct Row {
    wavelength_nm: f64,
    alpha_db_per_km: f64,
}

/// Absorption coefficients (dB/km) sampled on a strictly increasing
/// wavelength grid, linearly interpolated between nodes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AbsorptionTable {
    entries: Vec<(f64, f64)>,
}

impl AbsorptionTable {
    pub fn new(entries: Vec<(f64, f64)>) -> Result<Self> {
        for &(wavelength, alpha) in &entries {
            if !(wavelength > 0.0 && wavelength.is_finite()) {
                return Err(ChannelError::InvalidTable(format!(
                    "wavelength {wavelength} nm is not positive"
                )));
            }
            if !(alpha >= 0.0 && alpha.is_finite()) {
                return Err(ChannelError::InvalidTable(format!(
                    "alpha {alpha} dB/km at {wavelength} nm is negative"
                )));
            }
        }
        if let Some(pair) = entries.windows(2).find(|w| w[1].0 <= w[0].0) {
            let kind = if pair[1].0 == pair[0].0 {
                "duplicate"
            } else {
                "non-increasing"
            };
            return Err(ChannelError::InvalidTable(format!(
                "{kind} wavelength {} nm",
                pair[1].0
            )));
        }
        Ok(Self { entries })
    }

    /// Zero absorption across 200 nm – 20 µm.
    pub fn transparent() -> Self {
        Self {
            entries: vec![(200.0, 0.0), (20_000.0, 0.0)],
        }
    }

    /// Table bundled with the crate (`data/absorption_default.csv`).
    pub fn shipped_default() -> Self {
        Self::from_csv_reader(SHIPPED_DEFAULT_CSV.as_bytes())
            .expect("bundled absorption table is valid")
    }

    /// Reads `wavelength_nm,alpha_db_per_km` CSV.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = csv.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "wavelength_nm" || &headers[1] != "alpha_db_per_km"
        {
            return Err(ChannelError::InvalidTable(format!(
                "expected header `wavelength_nm,alpha_db_per_km`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let entries = csv
            .deserialize::<Row>()
            .map(|row| row.map(|r| (r.wavelength_nm, r.alpha_db_per_km)))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Self::new(entries)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(std::io::BufReader::new(file))
    }

    pub fn to_csv_string(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        for &(wavelength_nm, alpha_db_per_km) in &self.entries {
            writer
                .serialize(Row {
                    wavelength_nm,
                    alpha_db_per_km,
                })
                .expect("in-memory csv write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory csv flush")).expect("utf-8 csv")
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Interpolated coefficient; no extrapolation outside the table.
    pub fn alpha_db_per_km(&self, wavelength_nm: f64) -> Result<f64> {
        let lambda = require_positive("wavelength_nm", wavelength_nm)?;
        let (first, last) = match (self.entries.first(), self.entries.last()) {
            (Some(first), Some(last)) => (*first, *last),
            _ => return Err(ChannelError::EmptyTable),
        };
        if lambda < first.0 || lambda > last.0 {
            return Err(ChannelError::OutOfRange {
                wavelength_nm: lambda,
                min_nm: first.0,
                max_nm: last.0,
            });
        }
        let upper = self.entries.partition_point(|&(w, _)| w < lambda);
        let (w1, a1) = self.entries[upper];
        if w1 == lambda || upper == 0 {
            return Ok(a1);
        }
        let (w0, a0) = self.entries[upper - 1];
        Ok(a0 + (a1 - a0) * (lambda - w0) / (w1 - w0))
    }
}
