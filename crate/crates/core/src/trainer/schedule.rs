use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Piecewise-constant learning rate: consecutive `(steps, rate)` segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrSchedule {
    segments: Vec<(u64, f64)>,
}

impl LrSchedule {
    pub fn new(segments: Vec<(u64, f64)>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidParameter("learning-rate schedule is empty".into()));
        }
        for &(steps, rate) in &segments {
            if steps == 0 {
                return Err(Error::InvalidParameter("schedule segment with zero steps".into()));
            }
            if !(rate > 0.0 && rate.is_finite()) {
                return Err(Error::InvalidParameter(format!("learning rate must be positive, got {rate}")));
            }
        }
        Ok(LrSchedule { segments })
    }

    pub fn constant(steps: u64, rate: f64) -> Result<Self> {
        LrSchedule::new(vec![(steps, rate)])
    }

    /// Parses `steps:rate` pairs separated by commas, e.g.
    /// `20000:1e-4,35000:0.4e-4`. A bare rate covers `total` steps.
    pub fn parse(text: &str, total: Option<u64>) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse learning-rate schedule {text:?}"));
        let text = text.trim();
        if !text.contains(':') {
            let rate: f64 = text.parse().map_err(|_| bad())?;
            let steps = total.ok_or_else(bad)?;
            return LrSchedule::constant(steps, rate);
        }
        let segments = text
            .split(',')
            .map(|seg| {
                let (s, r) = seg.split_once(':').ok_or_else(bad)?;
                Ok((s.trim().parse().map_err(|_| bad())?, r.trim().parse().map_err(|_| bad())?))
            })
            .collect::<Result<Vec<_>>>()?;
        LrSchedule::new(segments)
    }

    pub fn total_steps(&self) -> u64 {
        self.segments.iter().map(|s| s.0).sum()
    }

    pub fn segments(&self) -> &[(u64, f64)] {
        &self.segments
    }

    /// Same rates with segment lengths scaled to cover `total` steps. The
    /// last segment absorbs rounding; segments that shrink to nothing are
    /// dropped.
    pub fn rescaled(&self, total: u64) -> Result<Self> {
        if total == 0 {
            return Err(Error::InvalidParameter("schedule must cover at least one step".into()));
        }
        let old = self.total_steps() as u128;
        let mut segments = Vec::with_capacity(self.segments.len());
        let (mut start, mut acc) = (0u64, 0u128);
        for (i, &(steps, rate)) in self.segments.iter().enumerate() {
            acc += steps as u128;
            let end = if i + 1 == self.segments.len() { total } else { (acc * total as u128 / old) as u64 };
            if end > start {
                segments.push((end - start, rate));
                start = end;
            }
        }
        LrSchedule::new(segments)
    }

    /// Rate of the segment containing zero-based step `t`.
    pub fn rate_at(&self, t: u64) -> Option<f64> {
        let mut end = 0;
        for &(steps, rate) in &self.segments {
            end += steps;
            if t < end {
                return Some(rate);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rescaling_keeps_proportions() {
        let s = LrSchedule::parse("2000:0.05,3000:0.02", None).unwrap();
        assert_eq!(s.rescaled(5000).unwrap(), s);
        assert_eq!(s.rescaled(10).unwrap().segments(), &[(4, 0.05), (6, 0.02)]);
        assert_eq!(s.rescaled(1).unwrap().segments(), &[(1, 0.02)]);
        assert!(s.rescaled(0).is_err());
    }

    #[test]
    fn step_boundary() {
        let s = LrSchedule::parse("20000:1e-4,35000:0.4e-4", None).unwrap();
        assert_eq!(s.rate_at(19_999), Some(1e-4));
        assert_eq!(s.rate_at(20_000), Some(0.4e-4));
        assert_eq!(s.rate_at(54_999), Some(0.4e-4));
        assert_eq!(s.rate_at(55_000), None);
        assert_eq!(s.total_steps(), 55_000);
    }

    #[test]
    fn bare_rate_and_errors() {
        assert_eq!(LrSchedule::parse("0.004", Some(1000)).unwrap().segments(), &[(1000, 0.004)]);
        assert!(LrSchedule::parse("0.004", None).is_err());
        assert!(LrSchedule::parse("10:-1", None).is_err());
        assert!(LrSchedule::parse("0:1", None).is_err());
        assert!(LrSchedule::parse("x:y", None).is_err());
    }

    proptest! {
        #[test]
        fn rate_comes_from_the_containing_segment(
            segs in proptest::collection::vec((1u64..50, 1u32..1000), 1..6),
            probe in 0u64..400,
        ) {
            let segments: Vec<(u64, f64)> = segs.iter().map(|&(s, r)| (s, f64::from(r) * 1e-3)).collect();
            let sched = LrSchedule::new(segments.clone()).unwrap();
            let mut start = 0;
            let mut expected = None;
            for (steps, rate) in segments {
                if probe >= start && probe < start + steps {
                    expected = Some(rate);
                }
                start += steps;
            }
            prop_assert_eq!(sched.rate_at(probe), expected);
        }
    }
}
