use std::io::Write;

use super::{Result, SimError};

/// Received traces two bit periods long, folded on the bit clock.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EyeMatrix {
    /// Column times in microseconds, both ends inclusive.
    pub time_us: Vec<f64>,
    pub traces: Vec<Vec<f64>>,
}

impl EyeMatrix {
    pub fn is_empty(&self) -> bool {
        self.traces.is_empty() || self.time_us.is_empty()
    }

    /// Column `idx` of every trace.
    pub fn column(&self, idx: usize) -> Vec<f64> {
        self.traces.iter().map(|t| t[idx]).collect()
    }
}

/// CSV: a header row holding the time axis, then one row per trace.
pub fn eye_export<W: Write>(eye: &EyeMatrix, out: W) -> Result<()> {
    if eye.is_empty() {
        return Err(SimError::invalid("eye", "matrix is empty".into()));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(eye.time_us.iter().map(|t| format!("{t:.6}")))?;
    for (i, trace) in eye.traces.iter().enumerate() {
        if trace.len() != eye.time_us.len() {
            return Err(SimError::invalid(
                "eye",
                format!(
                    "trace {i} has {} samples, axis has {}",
                    trace.len(),
                    eye.time_us.len()
                ),
            ));
        }
        w.write_record(trace.iter().map(|v| format!("{v:e}")))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn export_shape() {
        let eye = EyeMatrix {
            time_us: (0..64).map(|i| i as f64 * 0.1).collect(),
            traces: vec![vec![0.5; 64]; 100],
        };
        let mut buf = Vec::new();
        eye_export(&eye, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 101);
        assert!(text.lines().all(|l| l.split(',').count() == 64));
        assert!(text.starts_with("0.000000,0.100000"));
    }

    #[test]
    fn empty_or_ragged_rejected() {
        assert!(eye_export(&EyeMatrix::default(), Vec::new()).is_err());
        let ragged = EyeMatrix {
            time_us: vec![0.0, 1.0],
            traces: vec![vec![1.0]],
        };
        assert!(eye_export(&ragged, Vec::new()).is_err());
    }
}
