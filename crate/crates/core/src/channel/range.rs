use super::{require_positive, Result};

/// Result of a maximum-range search.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LinkRange {
    pub distance_m: f64,
    /// Budget never exceeded up to the solver cap; `distance_m` is the cap.
    pub unbounded: bool,
}

/// Coarse forward scan followed by bisection on a non-decreasing loss curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSolver {
    pub scan_step_m: f64,
    pub resolution_m: f64,
    pub max_distance_m: f64,
}

impl Default for RangeSolver {
    fn default() -> Self {
        Self {
            scan_step_m: 10.0,
            resolution_m: 1.0,
            max_distance_m: 100_000.0,
        }
    }
}

impl RangeSolver {
    /// Largest `d` with `loss(d) <= budget`, assuming `loss(0) = 0` and that
    /// `loss` never decreases. Step discontinuities are handled: the answer
    /// sits just below the step.
    pub fn solve<F>(&self, mut loss: F, budget_db: f64) -> Result<LinkRange>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let step = require_positive("scan_step_m", self.scan_step_m)?;
        let resolution = require_positive("resolution_m", self.resolution_m)?;
        let cap = require_positive("max_distance_m", self.max_distance_m)?;

        let mut ok = 0.0;
        let exceeded = loop {
            if ok >= cap {
                return Ok(LinkRange {
                    distance_m: cap,
                    unbounded: true,
                });
            }
            let next = (ok + step).min(cap);
            if loss(next)? > budget_db {
                break next;
            }
            ok = next;
        };

        let (mut lo, mut hi) = (ok, exceeded);
        while hi - lo > resolution {
            let mid = 0.5 * (lo + hi);
            if loss(mid)? > budget_db {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(LinkRange {
            distance_m: lo,
            unbounded: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_loss() {
        let r = RangeSolver::default()
            .solve(|d| Ok(d / 100.0), 12.34)
            .unwrap();
        assert!(!r.unbounded);
        assert!(r.distance_m <= 1234.0 && r.distance_m > 1233.0);
    }

    #[test]
    fn step_loss_stops_before_step() {
        let r = RangeSolver::default()
            .solve(|d| Ok(if d > 5_003.3 { 100.0 } else { d / 1e4 }), 10.0)
            .unwrap();
        assert!(r.distance_m <= 5_003.3 && r.distance_m > 5_002.3);
    }

    #[test]
    fn never_exceeded() {
        let solver = RangeSolver {
            max_distance_m: 1234.5,
            ..RangeSolver::default()
        };
        let r = solver.solve(|_| Ok(0.0), 1.0).unwrap();
        assert_eq!(
            r,
            LinkRange {
                distance_m: 1234.5,
                unbounded: true
            }
        );
    }

    #[test]
    fn rejects_bad_solver_settings() {
        let solver = RangeSolver {
            scan_step_m: 0.0,
            ..RangeSolver::default()
        };
        assert!(solver.solve(Ok, 1.0).is_err());
    }
}
