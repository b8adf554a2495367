use serde::{Deserialize, Serialize};

use super::{CodecError, Payload, Result};

/// z for a two-sided 95% interval.
const Z95: f64 = 1.959_963_984_540_054;

/// Packet error rate with a Wilson 95% score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerEstimate {
    pub packets_sent: u64,
    pub packets_errored: u64,
    pub per: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
}

impl PerEstimate {
    pub fn new(packets_sent: u64, packets_errored: u64) -> Result<Self> {
        if packets_sent == 0 || packets_errored > packets_sent {
            return Err(CodecError::LengthMismatch {
                what: "errored vs sent packets",
                left: packets_errored as usize,
                right: packets_sent as usize,
            });
        }
        let n = packets_sent as f64;
        let p = packets_errored as f64 / n;
        let z2 = Z95 * Z95;
        let denom = 1.0 + z2 / n;
        let centre = (p + z2 / (2.0 * n)) / denom;
        let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        Ok(Self {
            packets_sent,
            packets_errored,
            per: p,
            ci95_low: if packets_errored == 0 {
                0.0
            } else {
                (centre - half).max(0.0)
            },
            ci95_high: if packets_errored == packets_sent {
                1.0
            } else {
                (centre + half).min(1.0)
            },
        })
    }

    /// Binomial standard error `√(p(1−p)/n)` at probability `p`.
    pub fn standard_error_at(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.packets_sent as f64).sqrt()
    }
}

/// A packet is errored when decoding failed or any payload bit differs.
pub fn per_count<E>(
    sent: &[Payload],
    received: &[std::result::Result<Payload, E>],
) -> Result<PerEstimate> {
    if sent.len() != received.len() {
        return Err(CodecError::LengthMismatch {
            what: "sent vs received packets",
            left: sent.len(),
            right: received.len(),
        });
    }
    let errored = sent
        .iter()
        .zip(received)
        .filter(|(s, r)| r.as_ref().map_or(true, |p| p != *s))
        .count();
    PerEstimate::new(sent.len() as u64, errored as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let sent = vec![[1u8, 2, 3, 4]; 62_500];
        let mut rx: Vec<std::result::Result<Payload, CodecError>> =
            sent.iter().map(|&p| Ok(p)).collect();
        assert_eq!(per_count(&sent, &rx).unwrap().per, 0.0);
        rx[123] = Ok([1, 2, 3, 5]);
        let e = per_count(&sent, &rx).unwrap();
        assert_eq!(e.packets_errored, 1);
        assert_close!(e.per, 1.6e-5, 1e-18);
        let failed: Vec<std::result::Result<Payload, CodecError>> =
            sent.iter().map(|_| Err(CodecError::SyncLoss)).collect();
        assert_eq!(per_count(&sent, &failed).unwrap().per, 1.0);
        assert!(per_count(&sent[1..], &rx).is_err());
    }

    #[test]
    fn wilson_interval() {
        // statsmodels proportion_confint(5, 100, method="wilson")
        let e = PerEstimate::new(100, 5).unwrap();
        assert_close!(e.ci95_low, 0.021_543_7, 1e-6);
        assert_close!(e.ci95_high, 0.111_750_5, 1e-6);
        let zero = PerEstimate::new(62_500, 0).unwrap();
        assert_eq!(zero.ci95_low, 0.0);
        assert!(zero.ci95_high > 0.0 && zero.ci95_high < 1e-4);
        let all = PerEstimate::new(10, 10).unwrap();
        assert_eq!(all.ci95_high, 1.0);
        assert!(PerEstimate::new(0, 0).is_err());
        assert!(PerEstimate::new(3, 4).is_err());
    }
}
