use crate::datamodel::SensorKind;
use crate::error::{Error, Result};

/// Inclusive integer range of histogram bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HistogramSupport {
    pub lo: i64,
    pub hi: i64,
}

impl HistogramSupport {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if hi < lo {
            return Err(Error::EmptySignal);
        }
        Ok(Self { lo, hi })
    }

    /// Fixed per-kind ranges: ±20 m/s², ±10 rad/s, ±100 µT.
    pub fn for_sensor(kind: SensorKind) -> Self {
        let r = match kind {
            SensorKind::Accelerometer | SensorKind::LinearAcceleration | SensorKind::Gravity => 20,
            SensorKind::Gyroscope => 10,
            SensorKind::Compass => 100,
        };
        Self { lo: -r, hi: r }
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bins(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
}

/// Rounds each sample half away from zero, clamps into `support`, and
/// returns per-bin counts divided by the signal length.
pub fn histogram_features(x: &[f64], support: HistogramSupport) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(Error::EmptySignal);
    }
    let mut counts = vec![0usize; support.len()];
    for &v in x {
        let r = v.round().clamp(support.lo as f64, support.hi as f64) as i64;
        counts[(r - support.lo) as usize] += 1;
    }
    let n = x.len() as f64;
    Ok(counts.into_iter().map(|c| c as f64 / n).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let s = HistogramSupport::new(0, 3).unwrap();
        assert_eq!(
            histogram_features(&[1.2, 1.6, 2.0], s).unwrap(),
            vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 0.0]
        );
        let h = histogram_features(&[4.4; 10], HistogramSupport::new(0, 9).unwrap()).unwrap();
        assert_eq!(h[4], 1.0);
        let acc = HistogramSupport::for_sensor(SensorKind::Accelerometer);
        let h = histogram_features(&[25.0], acc).unwrap();
        assert_eq!(h[acc.len() - 1], 1.0);
        assert!(matches!(histogram_features(&[], acc), Err(Error::EmptySignal)));
    }

    #[test]
    fn half_rounds_away_from_zero() {
        let s = HistogramSupport::new(-3, 3).unwrap();
        let h = histogram_features(&[2.5, -2.5, 0.5, -0.5], s).unwrap();
        assert_eq!(h, vec![0.25, 0.0, 0.25, 0.0, 0.25, 0.0, 0.25]);
    }

    #[test]
    fn supports() {
        assert_eq!(HistogramSupport::for_sensor(SensorKind::Gravity).len(), 41);
        assert_eq!(HistogramSupport::for_sensor(SensorKind::Gyroscope).len(), 21);
        assert_eq!(HistogramSupport::for_sensor(SensorKind::Compass).len(), 201);
    }

    proptest! {
        #[test]
        fn normalized(xs in prop::collection::vec(-300.0f64..300.0, 1..200)) {
            for kind in [SensorKind::Accelerometer, SensorKind::Gyroscope, SensorKind::Compass] {
                let h = histogram_features(&xs, HistogramSupport::for_sensor(kind)).unwrap();
                prop_assert!(h.iter().all(|&v| v >= 0.0));
                prop_assert!((h.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }
}
