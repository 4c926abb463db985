//! WebAssembly bindings for the browser demo in `www/`.

use std::collections::BTreeSet;

use gaitbrac::datamodel::{BracThreshold, Device, SensorKind};
use gaitbrac::eval::{loso_instances, EvalConfig, Metrics};
use gaitbrac::features::{labeled_instances, power_spectrum};
use gaitbrac::models::ModelKind;
use gaitbrac::signal::{preprocess, SignalConfig};
use gaitbrac::synth::{generate_dataset, generate_pair, BracDistribution, SubjectProfile};
use wasm_bindgen::prelude::*;

/// Preprocessed vertical acceleration of one device before and after
/// drinking, with one-sided magnitude spectra.
#[wasm_bindgen]
pub struct WalkView {
    before: Vec<f64>,
    after: Vec<f64>,
    freqs: Vec<f64>,
    spectrum_before: Vec<f64>,
    spectrum_after: Vec<f64>,
}

#[wasm_bindgen]
impl WalkView {
    #[wasm_bindgen(getter)]
    pub fn before(&self) -> Vec<f64> {
        self.before.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn after(&self) -> Vec<f64> {
        self.after.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn freqs(&self) -> Vec<f64> {
        self.freqs.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn spectrum_before(&self) -> Vec<f64> {
        self.spectrum_before.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn spectrum_after(&self) -> Vec<f64> {
        self.spectrum_after.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn peak_before(&self) -> f64 {
        peak(&self.freqs, &self.spectrum_before)
    }

    #[wasm_bindgen(getter)]
    pub fn peak_after(&self) -> f64 {
        peak(&self.freqs, &self.spectrum_after)
    }
}

fn peak(freqs: &[f64], spectrum: &[f64]) -> f64 {
    let mut best = 0;
    for i in 1..spectrum.len() {
        if spectrum[i] > spectrum[best] {
            best = i;
        }
    }
    freqs.get(best).copied().unwrap_or(0.0)
}

fn vertical_axis(device: Device) -> usize {
    match device {
        Device::Glass | Device::Phone => 1,
        Device::Watch | Device::Band => 0,
    }
}

fn magnitudes(x: &[f64]) -> Vec<f64> {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let centered: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let p = power_spectrum(&centered);
    p[1..=x.len() / 2].iter().map(|v| v.sqrt() / x.len() as f64).collect()
}

pub fn walk_view(cadence_hz: f64, brac: f64, seed: u32, device: &str) -> Result<WalkView, String> {
    let device: Device = device.parse().map_err(|e: gaitbrac::Error| e.to_string())?;
    let profile = SubjectProfile {
        subject_id: "demo".into(),
        cadence_hz,
        step_amplitude: 2.5,
        arm_swing_ratio: 0.7,
        brac,
        seed: u64::from(seed),
        has_phone: true,
    };
    let pair = generate_pair(&profile).map_err(|e| e.to_string())?;
    let cfg = SignalConfig::default();
    let axis = vertical_axis(device);
    let signal = |rec: &gaitbrac::datamodel::GaitRecording| -> Result<Vec<f64>, String> {
        let stream = rec
            .stream(device, SensorKind::Accelerometer)
            .ok_or_else(|| format!("no accelerometer on {device}"))?;
        let axes = preprocess(stream, &cfg).map_err(|e| e.to_string())?;
        Ok(axes[axis].values.clone())
    };
    let before = signal(pair.before())?;
    let after = signal(pair.after())?;
    let n = before.len();
    let freqs = (1..=n / 2).map(|k| k as f64 * cfg.target_hz / n as f64).collect();
    Ok(WalkView {
        spectrum_before: magnitudes(&before),
        spectrum_after: magnitudes(&after),
        before,
        after,
        freqs,
    })
}

#[wasm_bindgen]
pub fn simulate_walk(cadence_hz: f64, brac: f64, seed: u32, device: &str) -> Result<WalkView, JsError> {
    walk_view(cadence_hz, brac, seed, device).map_err(|e| JsError::new(&e))
}

/// Pooled leave-one-subject-out result on a synthetic cohort.
#[wasm_bindgen]
pub struct RocView {
    auc: f64,
    fpr_at_tpr1: f64,
    fpr: Vec<f64>,
    tpr: Vec<f64>,
    scores: Vec<f64>,
    bracs: Vec<f64>,
}

#[wasm_bindgen]
impl RocView {
    #[wasm_bindgen(getter)]
    pub fn auc(&self) -> f64 {
        self.auc
    }

    #[wasm_bindgen(getter)]
    pub fn fpr_at_tpr1(&self) -> f64 {
        self.fpr_at_tpr1
    }

    #[wasm_bindgen(getter)]
    pub fn fpr(&self) -> Vec<f64> {
        self.fpr.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn tpr(&self) -> Vec<f64> {
        self.tpr.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn scores(&self) -> Vec<f64> {
        self.scores.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn bracs(&self) -> Vec<f64> {
        self.bracs.clone()
    }
}

/// `devices` is a `+`-separated list such as `Phone+Watch`, or `all`.
pub fn roc_view(n_subjects: u32, seed: u32, threshold: u32, model: &str, devices: &str) -> Result<RocView, String> {
    let kind: ModelKind = model.parse()?;
    let threshold = BracThreshold::new(f64::from(threshold)).map_err(|e| e.to_string())?;
    let mask: BTreeSet<Device> = if devices.eq_ignore_ascii_case("all") {
        Device::ALL.into_iter().collect()
    } else {
        devices
            .split('+')
            .map(|d| d.trim().parse::<Device>().map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?
    };
    let pairs =
        generate_dataset(n_subjects as usize, &BracDistribution::default(), u64::from(seed)).map_err(|e| e.to_string())?;
    let instances = labeled_instances(&pairs, &mask, &SignalConfig::default()).map_err(|e| e.to_string())?;
    let report = loso_instances(&instances, &EvalConfig::new(kind, Some(threshold))).map_err(|e| e.to_string())?;
    let Metrics::Classification { auc, fpr_at_tpr1, roc, .. } = &report.metrics else {
        return Err(format!("{kind} is not a classifier"));
    };
    Ok(RocView {
        auc: *auc,
        fpr_at_tpr1: *fpr_at_tpr1,
        fpr: roc.iter().map(|p| p.fpr).collect(),
        tpr: roc.iter().map(|p| p.tpr).collect(),
        scores: report.predictions.iter().map(|p| p.score).collect(),
        bracs: report.predictions.iter().map(|p| p.brac).collect(),
    })
}

#[wasm_bindgen]
pub fn evaluate_cohort(n_subjects: u32, seed: u32, threshold: u32, model: &str, devices: &str) -> Result<RocView, JsError> {
    roc_view(n_subjects, seed, threshold, model, devices).map_err(|e| JsError::new(&e))
}
