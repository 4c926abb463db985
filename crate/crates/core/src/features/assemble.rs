use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use super::gait::{gait_features, GAIT_NAMES, GYRO_FEATURES_START};
use super::histogram::{histogram_features, HistogramSupport};
use super::spectral::{fft_features, FFT_NAMES};
use super::stats::{axis_covariances, stat_features, COVARIANCE_NAMES, STAT_NAMES};
use super::{feature_difference, Family, FeatureVector, LabeledInstance};
use crate::datamodel::{read_file, Device, GaitRecording, SensorKind, SubjectPair};
use crate::error::{Error, Result};
use crate::par_map;
use crate::signal::{preprocess, Axis, AxisSignal, SignalConfig};

fn name(device: Device, sensor: SensorKind, axis: &str, family: Family, id: &str) -> String {
    format!("{device}.{sensor}.{axis}.{}.{id}", family.tag())
}

/// Catalog of one device's block. Order: for each sensor and axis the
/// statistics, FFT and histogram features; then per-sensor covariances;
/// then the device's gait features.
pub fn device_catalog(device: Device) -> Vec<String> {
    let sensors = device.spec().sensors;
    let mut out = Vec::new();
    for &sensor in sensors {
        let support = HistogramSupport::for_sensor(sensor);
        for axis in Axis::ALL {
            let a = axis.name();
            out.extend(STAT_NAMES.iter().map(|id| name(device, sensor, a, Family::Statistics, id)));
            out.extend(FFT_NAMES.iter().map(|id| name(device, sensor, a, Family::Frequency, id)));
            out.extend(
                support
                    .bins()
                    .map(|b| name(device, sensor, a, Family::Histogram, &format!("bin_{b}"))),
            );
        }
    }
    for &sensor in sensors {
        out.extend(
            COVARIANCE_NAMES
                .iter()
                .map(|id| name(device, sensor, "XYZ", Family::Statistics, id)),
        );
    }
    for (i, id) in GAIT_NAMES.iter().enumerate() {
        let source = if i < GYRO_FEATURES_START {
            SensorKind::Accelerometer
        } else {
            SensorKind::Gyroscope
        };
        out.push(name(device, source, "multi", Family::KnownGait, id));
    }
    out
}

/// Concatenated catalog of the masked devices in canonical device order.
pub fn feature_catalog(mask: &BTreeSet<Device>) -> Vec<String> {
    Device::ALL
        .into_iter()
        .filter(|d| mask.contains(d))
        .flat_map(device_catalog)
        .collect()
}

/// Feature values of one device, aligned with [`device_catalog`].
pub fn device_block(recording: &GaitRecording, device: Device, cfg: &SignalConfig) -> Result<Vec<f64>> {
    let sensors = device.spec().sensors;
    let mut signals: Vec<[AxisSignal; 3]> = Vec::with_capacity(sensors.len());
    for &sensor in sensors {
        let stream = recording
            .stream(device, sensor)
            .ok_or_else(|| Error::MissingSensor(format!("{device}/{sensor}")))?;
        signals.push(preprocess(stream, cfg)?);
    }

    let mut out = Vec::new();
    for (&sensor, axes) in sensors.iter().zip(&signals) {
        let support = HistogramSupport::for_sensor(sensor);
        for sig in axes {
            out.extend(stat_features(&sig.values)?);
            out.extend(fft_features(&sig.values, sig.rate_hz)?);
            out.extend(histogram_features(&sig.values, support)?);
        }
    }
    for axes in &signals {
        out.extend(axis_covariances(&axes[0].values, &axes[1].values, &axes[2].values)?);
    }
    let by_kind = |k: SensorKind| {
        sensors
            .iter()
            .position(|&s| s == k)
            .map(|i| [&signals[i][0].values[..], &signals[i][1].values[..], &signals[i][2].values[..]])
    };
    let accel = by_kind(SensorKind::Accelerometer)
        .ok_or_else(|| Error::MissingSensor(format!("{device}/Accelerometer")))?;
    out.extend(gait_features(accel, by_kind(SensorKind::Gyroscope), cfg.target_hz)?);
    Ok(out)
}

pub fn assemble_feature_vector(
    recording: &GaitRecording,
    mask: &BTreeSet<Device>,
    cfg: &SignalConfig,
) -> Result<FeatureVector> {
    let present = recording.devices();
    let mut values = Vec::new();
    for device in Device::ALL.into_iter().filter(|d| mask.contains(d)) {
        if !present.contains(&device) {
            return Err(Error::MissingDevice(device.to_string()));
        }
        values.extend(device_block(recording, device, cfg)?);
    }
    FeatureVector::new(values, feature_catalog(mask))
}

pub fn labeled_instance(pair: &SubjectPair, mask: &BTreeSet<Device>, cfg: &SignalConfig) -> Result<LabeledInstance> {
    let before = assemble_feature_vector(pair.before(), mask, cfg)?;
    let after = assemble_feature_vector(pair.after(), mask, cfg)?;
    Ok(LabeledInstance {
        subject_id: pair.subject_id().to_string(),
        diff: feature_difference(&before, &after)?,
        brac: pair.brac(),
    })
}

/// Instances for every pair that carries all masked devices; the others
/// are skipped.
pub fn labeled_instances(
    pairs: &[SubjectPair],
    mask: &BTreeSet<Device>,
    cfg: &SignalConfig,
) -> Result<Vec<LabeledInstance>> {
    let eligible: Vec<&SubjectPair> = pairs
        .iter()
        .filter(|p| mask.is_subset(&p.before().devices()))
        .collect();
    par_map(&eligible, |p| labeled_instance(p, mask, cfg))
        .into_iter()
        .collect()
}

/// Difference matrix over `mask`; a device a subject did not carry
/// contributes NaN cells instead of failing the whole row.
pub fn build_matrix(pairs: &[SubjectPair], mask: &BTreeSet<Device>, cfg: &SignalConfig) -> Result<FeatureMatrix> {
    let rows: Vec<Result<Vec<f64>>> = par_map(pairs, |p| {
        let present = p.before().devices();
        let mut row = Vec::new();
        for device in Device::ALL.into_iter().filter(|d| mask.contains(d)) {
            if present.contains(&device) {
                let b = device_block(p.before(), device, cfg)?;
                let a = device_block(p.after(), device, cfg)?;
                row.extend(a.iter().zip(&b).map(|(x, y)| x - y));
            } else {
                row.extend(std::iter::repeat_n(f64::NAN, device_catalog(device).len()));
            }
        }
        Ok(row)
    });
    Ok(FeatureMatrix {
        catalog: feature_catalog(mask),
        subject_ids: pairs.iter().map(|p| p.subject_id().to_string()).collect(),
        rows: rows.into_iter().collect::<Result<_>>()?,
        brac: pairs.iter().map(SubjectPair::brac).collect(),
    })
}

/// Instances as rows, catalog as columns. Missing cells are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub catalog: Vec<String>,
    pub subject_ids: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub brac: Vec<f64>,
}

impl FeatureMatrix {
    pub fn from_instances(instances: &[LabeledInstance]) -> Result<Self> {
        let catalog = instances.first().map(|i| i.diff.catalog.clone()).unwrap_or_default();
        if instances.iter().any(|i| i.diff.catalog != catalog) {
            return Err(Error::CatalogMismatch);
        }
        Ok(Self {
            catalog,
            subject_ids: instances.iter().map(|i| i.subject_id.clone()).collect(),
            rows: instances.iter().map(|i| i.diff.values.clone()).collect(),
            brac: instances.iter().map(|i| i.brac).collect(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.catalog.len()
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self {
            catalog: cols.iter().map(|&c| self.catalog[c].clone()).collect(),
            subject_ids: self.subject_ids.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| cols.iter().map(|&c| r[c]).collect())
                .collect(),
            brac: self.brac.clone(),
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self {
            catalog: self.catalog.clone(),
            subject_ids: rows.iter().map(|&r| self.subject_ids[r].clone()).collect(),
            rows: rows.iter().map(|&r| self.rows[r].clone()).collect(),
            brac: rows.iter().map(|&r| self.brac[r]).collect(),
        }
    }

    pub fn columns_of_family(&self, family: Family) -> Vec<usize> {
        (0..self.catalog.len())
            .filter(|&c| Family::of_name(&self.catalog[c]) == Some(family))
            .collect()
    }

    pub fn columns_of_devices(&self, mask: &BTreeSet<Device>) -> Vec<usize> {
        (0..self.catalog.len())
            .filter(|&c| {
                self.catalog[c]
                    .split('.')
                    .next()
                    .and_then(|d| d.parse::<Device>().ok())
                    .is_some_and(|d| mask.contains(&d))
            })
            .collect()
    }

    /// Drops rows with any NaN cell.
    pub fn complete_rows(&self) -> Self {
        let keep: Vec<usize> = (0..self.rows.len())
            .filter(|&r| self.rows[r].iter().all(|v| !v.is_nan()))
            .collect();
        self.select_rows(&keep)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.rows.len() * self.catalog.len() * 12 + self.catalog.len() * 32);
        out.push_str("subject_id");
        for c in &self.catalog {
            out.push(',');
            out.push_str(c);
        }
        out.push_str(",brac\n");
        for ((s, row), b) in self.subject_ids.iter().zip(&self.rows).zip(&self.brac) {
            out.push_str(s);
            for v in row {
                out.push(',');
                if !v.is_nan() {
                    let _ = write!(out, "{v}");
                }
            }
            let _ = writeln!(out, ",{b}");
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let header = lines.next().ok_or_else(|| Error::malformed(1, "empty matrix file"))?.1;
        let cols: Vec<&str> = header.trim_end().split(',').collect();
        if cols.len() < 2 || cols[0] != "subject_id" || cols[cols.len() - 1] != "brac" {
            return Err(Error::malformed(1, "expected header 'subject_id,<features...>,brac'"));
        }
        let catalog: Vec<String> = cols[1..cols.len() - 1].iter().map(|s| s.to_string()).collect();
        let mut m = Self {
            catalog,
            subject_ids: Vec::new(),
            rows: Vec::new(),
            brac: Vec::new(),
        };
        for (n, raw) in lines {
            let line = raw.trim_end();
            if line.is_empty() {
                continue;
            }
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != cols.len() {
                return Err(Error::malformed(n, format!("expected {} cells, got {}", cols.len(), cells.len())));
            }
            let num = |s: &str| -> Result<f64> {
                if s.is_empty() {
                    Ok(f64::NAN)
                } else {
                    s.parse().map_err(|_| Error::malformed(n, format!("'{s}' is not a number")))
                }
            };
            let row = cells[1..cells.len() - 1].iter().map(|c| num(c)).collect::<Result<Vec<_>>>()?;
            let brac = num(cells[cells.len() - 1])?;
            if brac.is_nan() || brac < 0.0 {
                return Err(Error::NegativeBrac {
                    subject: cells[0].to_string(),
                    brac,
                });
            }
            if m.subject_ids.iter().any(|s| s == cells[0]) {
                return Err(Error::DuplicateSubject(cells[0].to_string()));
            }
            m.subject_ids.push(cells[0].to_string());
            m.rows.push(row);
            m.brac.push(brac);
        }
        Ok(m)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_csv(&read_file(path.as_ref())?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_catalog_length() {
        // 2 sensors x 3 axes x (11 stat + 6 fft) + accel 3 x 41 bins + gyro 3 x 21 bins
        // + 2 x 3 covariances + 13 gait
        let expected = 2 * 3 * (11 + 6) + 3 * 41 + 3 * 21 + 2 * 3 + 13;
        assert_eq!(expected, 307);
        assert_eq!(device_catalog(Device::Band).len(), 307);
        // three motion sensors on the ±20 support, gyro ±10, compass ±100
        let full = 5 * 3 * (11 + 6) + 3 * 3 * 41 + 3 * 21 + 3 * 201 + 5 * 3 + 13;
        assert_eq!(full, 1318);
        for d in [Device::Glass, Device::Watch, Device::Phone] {
            assert_eq!(device_catalog(d).len(), 1318);
        }
        let all: BTreeSet<Device> = Device::ALL.into_iter().collect();
        assert_eq!(feature_catalog(&all).len(), 3 * 1318 + 307);
    }

    #[test]
    fn catalog_names_are_unique_and_typed() {
        let all: BTreeSet<Device> = Device::ALL.into_iter().collect();
        let cat = feature_catalog(&all);
        let uniq: BTreeSet<&String> = cat.iter().collect();
        assert_eq!(uniq.len(), cat.len());
        assert!(cat.iter().all(|n| Family::of_name(n).is_some() && !n.contains(',')));
        assert_eq!(cat[0], "Glass.Accelerometer.X.stat.mean");
    }

    #[test]
    fn matrix_csv_round_trip_with_missing_cells() {
        let m = FeatureMatrix {
            catalog: vec!["a".into(), "b".into()],
            subject_ids: vec!["s1".into(), "s2".into()],
            rows: vec![vec![1.5, f64::NAN], vec![-0.1, 3.0]],
            brac: vec![0.0, 250.0],
        };
        let text = m.to_csv();
        assert!(text.starts_with("subject_id,a,b,brac\ns1,1.5,,0\n"));
        let back = FeatureMatrix::parse_csv(&text).unwrap();
        assert_eq!(back.to_csv(), text);
        assert_eq!(back.complete_rows().subject_ids, vec!["s2".to_string()]);
    }
}
