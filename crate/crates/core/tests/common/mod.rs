//! Brute-force oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::Path;

use gaitbrac::datamodel::{Device, GaitRecording, Sample, SensorKind, SensorStream, Session};
use gaitbrac::models::{Ensemble, HyperParams, LinearModel, ModelKind, TreeNode};
use rand::Rng;
use rand_distr::{Distribution, Normal};

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// |X_k|² by the defining sum, for every bin.
pub fn naive_dft_power(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (j, &v) in x.iter().enumerate() {
                let ang = TAU * ((k * j) % n) as f64 / n as f64;
                re += v * ang.cos();
                im -= v * ang.sin();
            }
            re * re + im * im
        })
        .collect()
}

/// Energy, top-4 frequencies and the strongest bin, from the naive DFT.
pub fn oracle_fft(x: &[f64], rate: f64) -> [f64; 6] {
    let n = x.len();
    let p = naive_dft_power(x);
    let energy = p.iter().sum::<f64>() / n as f64;
    let mut bins: Vec<usize> = (1..=n / 2).collect();
    // stable sort keeps lower bins first among equal magnitudes
    bins.sort_by(|&a, &b| p[b].partial_cmp(&p[a]).unwrap());
    let hz = |k: usize| k as f64 * rate / n as f64;
    [energy, hz(bins[0]), hz(bins[1]), hz(bins[2]), hz(bins[3]), bins[0] as f64]
}

/// Textbook statistics with plain two-pass sums.
pub fn oracle_stats(x: &[f64]) -> [f64; 11] {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    let m3 = x.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
    let skew = if std > 0.0 { m3 / std.powi(3) } else { 0.0 };
    let mut s = x.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let min = s[0];
    let max = *s.last().unwrap();
    let median = if s.len() % 2 == 1 {
        s[s.len() / 2]
    } else {
        (s[s.len() / 2 - 1] + s[s.len() / 2]) / 2.0
    };
    let rms = (x.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
    let crossings = |level: f64| {
        let mut c = 0;
        for i in 1..x.len() {
            let a = x[i - 1] < level;
            let b = x[i] < level;
            if a != b {
                c += 1;
            }
        }
        c as f64 / (n - 1.0)
    };
    [mean, var, std, skew, min, max, median, max - min, rms, crossings(0.0), crossings(mean)]
}

/// Histogram by explicit bin edges `[b - ½, b + ½)` on the positive side
/// and `(b - ½, b + ½]` on the negative side, with the extreme bins
/// absorbing everything beyond them.
pub fn oracle_histogram(x: &[f64], lo: i64, hi: i64) -> Vec<f64> {
    let mut out = Vec::new();
    for b in lo..=hi {
        let bf = b as f64;
        let count = x
            .iter()
            .filter(|&&v| {
                let lower_ok = if b == lo {
                    true
                } else if bf > 0.0 {
                    v >= bf - 0.5
                } else {
                    v > bf - 0.5
                };
                let upper_ok = if b == hi {
                    true
                } else if bf >= 0.0 {
                    v < bf + 0.5
                } else {
                    v <= bf + 0.5
                };
                lower_ok && upper_ok
            })
            .count();
        out.push(count as f64 / x.len() as f64);
    }
    out
}

pub fn brute_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let (mut won, mut pairs) = (0.0, 0.0);
    for i in 0..scores.len() {
        for j in 0..scores.len() {
            if labels[i] && !labels[j] {
                pairs += 1.0;
                if scores[i] > scores[j] {
                    won += 1.0;
                } else if scores[i] == scores[j] {
                    won += 0.5;
                }
            }
        }
    }
    won / pairs
}

/// Minimum FPR over every cutoff (each distinct score, plus +inf) at which
/// all drunk rows are flagged.
pub fn sweep_fpr_at_full_tpr(scores: &[f64], labels: &[bool]) -> f64 {
    let pos = labels.iter().filter(|&&l| l).count();
    let neg = labels.len() - pos;
    let mut cutoffs: Vec<f64> = scores.to_vec();
    cutoffs.push(f64::INFINITY);
    let mut best = f64::INFINITY;
    for c in cutoffs {
        let tp = scores.iter().zip(labels).filter(|(s, l)| **l && **s >= c).count();
        let fp = scores.iter().zip(labels).filter(|(s, l)| !**l && **s >= c).count();
        if tp == pos {
            best = best.min(fp as f64 / neg as f64);
        }
    }
    best
}

/// Random test signal: noise, a few tones and an offset at a random scale.
pub fn random_signal(rng: &mut impl Rng, len: usize, rate: f64) -> Vec<f64> {
    let scale = 10f64.powf(rng.random_range(-1.0..1.5));
    let offset = rng.random_range(-1.0..1.0) * scale;
    let noise = Normal::new(0.0, scale).unwrap();
    let tones: Vec<(f64, f64, f64)> = (0..rng.random_range(0..4))
        .map(|_| {
            (
                rng.random_range(0.0..2.0) * scale,
                rng.random_range(0.2..rate / 2.0),
                rng.random_range(0.0..TAU),
            )
        })
        .collect();
    (0..len)
        .map(|k| {
            let t = k as f64 / rate;
            offset
                + noise.sample(rng)
                + tones.iter().map(|&(a, f, p)| a * (TAU * f * t + p).sin()).sum::<f64>()
        })
        .collect()
}

fn random_value(rng: &mut impl Rng) -> f64 {
    match rng.random_range(0..10) {
        0 => 0.0,
        1 => -0.0,
        2 => rng.random_range(-1e300..1e300),
        3 => rng.random_range(-1e-300..1e-300),
        4 => (rng.random_range(-100_000i64..100_000) as f64) / 1e4,
        5 => f64::from_bits(rng.next_u64() & !(0x7ff << 52) | (rng.random_range(1u64..2046) << 52)),
        _ => rng.random_range(-50.0..50.0),
    }
}

/// A structurally valid recording with random devices, sensors, lengths,
/// timestamps and values.
pub fn random_recording(rng: &mut impl Rng, id: usize) -> GaitRecording {
    let session = if rng.random() { Session::Before } else { Session::After };
    let mut streams = Vec::new();
    for device in Device::ALL {
        if rng.random_range(0..4) == 0 {
            continue;
        }
        for &sensor in device.spec().sensors {
            if rng.random_range(0..3) == 0 {
                continue;
            }
            let n = rng.random_range(2..40);
            let mut t: i64 = rng.random_range(-1_000_000_000..1_000_000_000);
            let samples = (0..n)
                .map(|_| {
                    t += rng.random_range(1..50_000_000);
                    Sample::new(t, random_value(rng), random_value(rng), random_value(rng))
                })
                .collect();
            streams.push(SensorStream::new(device, sensor, samples).unwrap());
        }
    }
    if streams.is_empty() {
        let samples = vec![Sample::new(0, 1.0, 2.0, 3.0), Sample::new(5, 4.0, 5.0, 6.0)];
        streams.push(SensorStream::new(Device::Band, SensorKind::Gyroscope, samples).unwrap());
    }
    let subject = format!("subj-{id}_{}", rng.random_range(0..1000));
    GaitRecording::new(subject, session, streams).unwrap()
}

fn random_tree(rng: &mut impl Rng, n_features: usize, depth: usize) -> TreeNode {
    if depth == 0 || rng.random_range(0..3) == 0 {
        return TreeNode::Leaf(random_value(rng));
    }
    TreeNode::Split {
        feature: rng.random_range(0..n_features),
        threshold: random_value(rng),
        left: Box::new(random_tree(rng, n_features, depth - 1)),
        right: Box::new(random_tree(rng, n_features, depth - 1)),
    }
}

/// A structurally valid model of a random kind with random contents.
pub fn random_model(rng: &mut impl Rng) -> Ensemble {
    let kind = ModelKind::ALL[rng.random_range(0..ModelKind::ALL.len())];
    let n_features = rng.random_range(1..30);
    let mut params = HyperParams::defaults_for(kind);
    params.learning_rate = rng.random_range(0.001..2.0);
    params.max_depth = if rng.random() { None } else { Some(rng.random_range(1..8)) };
    params.alpha = random_value(rng).abs();
    params.random_seed = rng.next_u64();
    let stages = match kind {
        ModelKind::Lasso => 0,
        ModelKind::Dt | ModelKind::Rt => 1,
        ModelKind::GbClf | ModelKind::GbReg => rng.random_range(0..6),
        _ => rng.random_range(1..6),
    };
    let trees: Vec<TreeNode> = (0..stages).map(|_| random_tree(rng, n_features, 6)).collect();
    let stage_weights = (0..stages).map(|_| random_value(rng)).collect();
    let linear = (kind == ModelKind::Lasso).then(|| LinearModel {
        weights: (0..n_features).map(|_| random_value(rng)).collect(),
        intercept: random_value(rng),
        converged: rng.random(),
    });
    let fingerprint: String = (0..64).map(|_| char::from_digit(rng.random_range(0..16), 16).unwrap()).collect();
    Ensemble {
        kind,
        params,
        n_features,
        fingerprint,
        init_value: random_value(rng),
        trees,
        stage_weights,
        linear,
    }
}

/// Relative path -> bytes for every file under `dir`.
pub fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        let mut entries: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
        entries.sort();
        for p in entries {
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}

/// Runs the CLI binary and returns (exit code, stdout, stderr).
pub fn run_cli(args: &[&str]) -> (i32, String, String) {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_gaitbrac"))
        .args(args)
        .output()
        .expect("spawn gaitbrac");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

pub fn read_metric(report_csv: &str, key: &str) -> Option<f64> {
    report_csv
        .lines()
        .skip(1)
        .filter_map(|l| l.split_once(','))
        .find(|(k, _)| *k == key)
        .and_then(|(_, v)| v.parse().ok())
}
