use std::collections::BTreeSet;

use gaitbrac::datamodel::{load_dataset, BracThreshold, Device};
use gaitbrac::eval::{ablate_devices, EvalConfig};
use gaitbrac::models::ModelKind;
use gaitbrac::signal::SignalConfig;
use gaitbrac::synth::{generate_dataset_with, write_dataset, SynthConfig};
use gaitbrac::Error;

fn written(n: usize, phone_missing: usize) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SynthConfig { phone_missing, ..SynthConfig::default() };
    write_dataset(dir.path(), &generate_dataset_with(n, &cfg, 9).unwrap()).unwrap();
    dir
}

#[test]
fn load_round_trips_generated_data() {
    let cfg = SynthConfig::default();
    let pairs = generate_dataset_with(4, &cfg, 9).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_dataset(dir.path(), &pairs).unwrap();
    let loaded = load_dataset(dir.path().join("recordings"), dir.path().join("labels.csv")).unwrap();
    assert_eq!(loaded, pairs);
}

#[test]
fn missing_after_session() {
    let dir = written(3, 0);
    std::fs::remove_file(dir.path().join("recordings/S02_after.csv")).unwrap();
    let err = load_dataset(dir.path().join("recordings"), dir.path().join("labels.csv")).unwrap_err();
    assert!(matches!(err, Error::MissingSession { ref subject, .. } if subject == "S02"), "{err}");
}

#[test]
fn missing_label() {
    let dir = written(3, 0);
    let labels = dir.path().join("labels.csv");
    let text = std::fs::read_to_string(&labels).unwrap();
    let kept: Vec<&str> = text.lines().filter(|l| !l.starts_with("S03")).collect();
    std::fs::write(&labels, kept.join("\n") + "\n").unwrap();
    let err = load_dataset(dir.path().join("recordings"), &labels).unwrap_err();
    assert!(matches!(err, Error::MissingLabel(ref s) if s == "S03"), "{err}");
}

#[test]
fn empty_directory() {
    let dir = written(3, 0);
    let empty = tempfile::tempdir().unwrap();
    let err = load_dataset(empty.path(), dir.path().join("labels.csv")).unwrap_err();
    assert_eq!(err.code(), "MissingSession");
}

#[test]
fn malformed_file_names_the_file() {
    let dir = written(3, 0);
    let path = dir.path().join("recordings/S01_before.csv");
    std::fs::write(&path, "subject_id,session,device,sensor\nS01,before,Phone,Accelerometer\nnot,a,row\n").unwrap();
    let err = load_dataset(dir.path().join("recordings"), dir.path().join("labels.csv")).unwrap_err();
    assert_eq!(err.code(), "MalformedFile");
    assert!(err.to_string().contains("S01_before.csv"), "{err}");
}

#[test]
fn phone_masks_drop_phoneless_subjects() {
    let cfg = SynthConfig { phone_missing: 2, ..SynthConfig::default() };
    let pairs = generate_dataset_with(10, &cfg, 4).unwrap();
    let phoneless: BTreeSet<&str> = pairs.iter().filter(|p| !p.has_phone()).map(|p| p.subject_id()).collect();
    assert_eq!(phoneless.len(), 2);

    let eval = EvalConfig::new(ModelKind::Dt, Some(BracThreshold::new(220.0).unwrap()));
    let rows = ablate_devices(&pairs, &eval, &SignalConfig::default()).unwrap();
    for row in rows {
        let scored: BTreeSet<&str> = row.report.predictions.iter().map(|p| p.subject_id.as_str()).collect();
        if row.mask.contains(&Device::Phone) {
            assert_eq!(scored.len(), 8, "{}", row.label);
            assert!(scored.is_disjoint(&phoneless), "{}", row.label);
        } else {
            assert_eq!(scored.len(), 10, "{}", row.label);
        }
    }
}
