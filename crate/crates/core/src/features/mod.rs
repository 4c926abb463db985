//! The four feature families, their canonical catalog, and before/after
//! difference vectors.

mod assemble;
mod gait;
mod histogram;
mod spectral;
mod stats;

use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use assemble::{
    assemble_feature_vector, build_matrix, device_block, device_catalog, feature_catalog, labeled_instance,
    labeled_instances, FeatureMatrix,
};
pub use gait::{gait_features, GAIT_NAMES};
pub use histogram::{histogram_features, HistogramSupport};
pub use spectral::{dominant_frequency, fft_features, power_spectrum, FFT_NAMES};
pub use stats::{axis_covariances, stat_features, COVARIANCE_NAMES, STAT_NAMES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Statistics,
    Frequency,
    Histogram,
    KnownGait,
}

impl Family {
    /// Row order of the feature-set ablation table.
    pub const ABLATION_ORDER: [Family; 4] = [
        Family::Histogram,
        Family::KnownGait,
        Family::Frequency,
        Family::Statistics,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Family::Statistics => "stat",
            Family::Frequency => "fft",
            Family::Histogram => "hist",
            Family::KnownGait => "gait",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Family::Statistics => "Statistics",
            Family::Frequency => "Frequency",
            Family::Histogram => "Histogram",
            Family::KnownGait => "KnownGait",
        }
    }

    /// Family of a catalog name `device.sensor.axis.family.id`.
    pub fn of_name(name: &str) -> Option<Family> {
        let tag = name.split('.').nth(3)?;
        [Family::Statistics, Family::Frequency, Family::Histogram, Family::KnownGait]
            .into_iter()
            .find(|f| f.tag() == tag)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Family::ABLATION_ORDER
            .into_iter()
            .find(|f| f.label().eq_ignore_ascii_case(s) || f.tag() == s)
            .ok_or_else(|| format!("unknown feature family '{s}'"))
    }
}

/// Hex SHA-256 over the newline-joined catalog names.
pub fn catalog_fingerprint(catalog: &[String]) -> String {
    let mut h = Sha256::new();
    for (i, name) in catalog.iter().enumerate() {
        if i > 0 {
            h.update(b"\n");
        }
        h.update(name.as_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub catalog: Vec<String>,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>, catalog: Vec<String>) -> Result<Self> {
        if values.len() != catalog.len() {
            return Err(Error::LengthMismatch(values.len(), catalog.len()));
        }
        Ok(Self { values, catalog })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `after - before`, elementwise.
pub fn feature_difference(before: &FeatureVector, after: &FeatureVector) -> Result<FeatureVector> {
    if before.catalog != after.catalog {
        return Err(Error::CatalogMismatch);
    }
    let values = after
        .values
        .iter()
        .zip(&before.values)
        .map(|(a, b)| a - b)
        .collect();
    Ok(FeatureVector {
        values,
        catalog: after.catalog.clone(),
    })
}

/// One subject's f-difference vector with its BrAC label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledInstance {
    pub subject_id: String,
    pub diff: FeatureVector,
    pub brac: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fv(values: Vec<f64>) -> FeatureVector {
        let catalog = (0..values.len()).map(|i| format!("f{i}")).collect();
        FeatureVector::new(values, catalog).unwrap()
    }

    #[test]
    fn difference_examples() {
        let d = feature_difference(&fv(vec![1.0, 2.0]), &fv(vec![3.0, 1.0])).unwrap();
        assert_eq!(d.values, vec![2.0, -1.0]);
        let x = fv(vec![0.25, -7.0, 1e9]);
        assert!(feature_difference(&x, &x).unwrap().values.iter().all(|&v| v == 0.0));
        let mut other = fv(vec![1.0, 2.0]);
        other.catalog[1] = "g".into();
        assert!(matches!(
            feature_difference(&fv(vec![1.0, 2.0]), &other),
            Err(Error::CatalogMismatch)
        ));
    }

    #[test]
    fn family_parsing() {
        assert_eq!(Family::of_name("Band.Gyroscope.X.hist.bin_-3"), Some(Family::Histogram));
        assert_eq!(Family::of_name("Band.Accelerometer.multi.gait.nsma"), Some(Family::KnownGait));
        assert_eq!(Family::of_name("garbage"), None);
    }

    #[test]
    fn fingerprint_depends_on_order() {
        let a = vec!["a".to_string(), "b".to_string()];
        let b = vec!["b".to_string(), "a".to_string()];
        assert_ne!(catalog_fingerprint(&a), catalog_fingerprint(&b));
        assert_eq!(catalog_fingerprint(&a).len(), 64);
    }

    proptest! {
        #[test]
        fn difference_matches_loop_and_is_antisymmetric(
            pairs in prop::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 1..60)
        ) {
            let a = fv(pairs.iter().map(|p| p.0).collect());
            let b = fv(pairs.iter().map(|p| p.1).collect());
            let ab = feature_difference(&a, &b).unwrap();
            let ba = feature_difference(&b, &a).unwrap();
            for (i, (x, y)) in pairs.iter().enumerate() {
                prop_assert_eq!(ab.values[i], y - x);
                prop_assert_eq!(ab.values[i], -ba.values[i]);
            }
        }
    }
}
