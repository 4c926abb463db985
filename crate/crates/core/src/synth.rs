//! Parametric synthetic gait generator.
//!
//! Each subject walks at a personal cadence. The body-frame linear
//! acceleration is a step harmonic plus its overtone, with a half-cadence
//! stride component sideways and an arm swing on the wrists. Devices see
//! that motion through fixed axis mappings, on top of gravity and a constant
//! magnetic field. After drinking, cadence slows, the step phase wanders and
//! a slow sideways sway appears, each in proportion to BrAC.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::datamodel::{
    serialize_labels, write_recording, Device, GaitRecording, Sample, SensorKind, SensorStream, Session, SubjectPair,
};
use crate::error::{Error, Result};
use crate::par_map;

/// Upper end of the BrAC label range.
pub const MAX_BRAC: f64 = 430.0;
pub const GRAVITY: f64 = 9.81;
/// Length of every generated stream.
pub const DURATION_S: f64 = 16.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SubjectProfile {
    pub subject_id: String,
    pub cadence_hz: f64,
    /// Vertical step acceleration amplitude, m/s².
    pub step_amplitude: f64,
    /// Wrist swing amplitude relative to the step amplitude.
    pub arm_swing_ratio: f64,
    pub brac: f64,
    pub seed: u64,
    pub has_phone: bool,
}

impl SubjectProfile {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidProfile(format!("{}: {m}", self.subject_id)));
        if !(1.6..=2.2).contains(&self.cadence_hz) {
            return bad("cadence must lie in [1.6, 2.2] Hz");
        }
        if !(self.step_amplitude > 0.0 && self.step_amplitude.is_finite()) {
            return bad("step amplitude must be positive");
        }
        if !(self.arm_swing_ratio >= 0.0 && self.arm_swing_ratio.is_finite()) {
            return bad("arm swing ratio must be non-negative");
        }
        if !(0.0..=MAX_BRAC).contains(&self.brac) {
            return bad("BrAC must lie in [0, 430]");
        }
        if self.subject_id.is_empty() || self.subject_id.contains(',') {
            return bad("bad subject id");
        }
        Ok(())
    }
}

/// Size of each alcohol effect at the maximum BrAC; all scale linearly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectModel {
    /// Fractional cadence reduction.
    pub cadence_slowdown: f64,
    /// Standard deviation of the step-phase wander, radians.
    pub phase_jitter_rad: f64,
    /// Sideways sway acceleration amplitude, m/s².
    pub sway_amplitude: f64,
    pub sway_hz: f64,
}

impl Default for EffectModel {
    fn default() -> Self {
        Self {
            cadence_slowdown: 0.25,
            phase_jitter_rad: 0.5,
            sway_amplitude: 1.5,
            sway_hz: 0.4,
        }
    }
}

impl EffectModel {
    /// Only the cadence changes with BrAC.
    pub fn cadence_only() -> Self {
        Self {
            phase_jitter_rad: 0.0,
            sway_amplitude: 0.0,
            ..Self::default()
        }
    }

    pub fn none() -> Self {
        Self {
            cadence_slowdown: 0.0,
            ..Self::cadence_only()
        }
    }

    fn scale(brac: f64) -> f64 {
        brac / MAX_BRAC
    }

    pub fn cadence(&self, base_hz: f64, brac: f64, session: Session) -> f64 {
        match session {
            Session::Before => base_hz,
            Session::After => base_hz * (1.0 - self.cadence_slowdown * Self::scale(brac)),
        }
    }
}

/// Measurement noise levels (standard deviations).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub accel: f64,
    pub gyro: f64,
    pub compass: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            accel: 0.15,
            gyro: 0.03,
            compass: 0.4,
        }
    }
}

/// Stratified BrAC draw: `round(sober_fraction·n)` subjects below
/// `split`, skewed toward zero by `sober_skew`, and the rest spread evenly
/// over `[split, MAX_BRAC]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracDistribution {
    pub sober_fraction: f64,
    pub split: f64,
    /// Exponent on the uniform quantile of the low group; 1 is uniform.
    pub sober_skew: f64,
}

impl Default for BracDistribution {
    fn default() -> Self {
        Self {
            sober_fraction: 0.7,
            split: 220.0,
            sober_skew: 2.0,
        }
    }
}

impl BracDistribution {
    pub fn sample(&self, n: usize, rng: &mut impl Rng) -> Result<Vec<f64>> {
        if n < 3 {
            return Err(Error::BadDistribution(format!("need at least 3 subjects, got {n}")));
        }
        if !(self.sober_fraction > 0.0 && self.sober_fraction < 1.0) {
            return Err(Error::BadDistribution("sober fraction must lie in (0, 1)".into()));
        }
        if !(self.split > 0.0 && self.split < MAX_BRAC) {
            return Err(Error::BadDistribution("split must lie in (0, 430)".into()));
        }
        if !(self.sober_skew > 0.0 && self.sober_skew.is_finite()) {
            return Err(Error::BadDistribution("skew must be positive".into()));
        }
        let n_low = ((self.sober_fraction * n as f64).round() as usize).clamp(1, n - 1);
        let n_high = n - n_low;
        let mut out = Vec::with_capacity(n);
        for k in 0..n_low {
            let q = (k as f64 + rng.random::<f64>()) / n_low as f64;
            out.push(self.split * q.powf(self.sober_skew));
        }
        for k in 0..n_high {
            let q = (k as f64 + rng.random::<f64>()) / n_high as f64;
            out.push(self.split + (MAX_BRAC - self.split) * q);
        }
        out.shuffle(rng);
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SynthConfig {
    pub effect: EffectModel,
    pub noise: NoiseModel,
    pub distribution: BracDistribution,
    /// How many subjects carry no phone.
    pub phone_missing: usize,
}

fn mix(mut z: u64) -> u64 {
    // splitmix64 finalizer
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn stream_rng(seed: u64, session: Session, device: u64, sensor: u64) -> ChaCha8Rng {
    let s = mix(mix(mix(seed ^ (session as u64 + 1)) ^ (device + 1) << 8) ^ (sensor + 1) << 16);
    ChaCha8Rng::seed_from_u64(s)
}

/// The whole-body motion of one session, shared by all devices.
struct Gait {
    cadence: f64,
    amplitude: f64,
    arm_swing: f64,
    phase0: f64,
    stride_phase: f64,
    jitter: [(f64, f64, f64); 4],
    sway: f64,
    sway_hz: f64,
    sway_phase: f64,
}

impl Gait {
    fn new(p: &SubjectProfile, session: Session, effect: &EffectModel) -> Self {
        let mut rng = stream_rng(p.seed, session, 99, 99);
        let level = match session {
            Session::Before => 0.0,
            Session::After => EffectModel::scale(p.brac),
        };
        // four slow sinusoids with equal power; their sum has std `sigma`
        let sigma = effect.phase_jitter_rad * level;
        let amp = sigma * (2.0f64 / 4.0).sqrt();
        let mut jitter = [(0.0, 0.0, 0.0); 4];
        for j in &mut jitter {
            *j = (amp, rng.random_range(0.05..0.5), rng.random_range(0.0..TAU));
        }
        Self {
            cadence: effect.cadence(p.cadence_hz, p.brac, session),
            amplitude: p.step_amplitude,
            arm_swing: p.arm_swing_ratio,
            phase0: rng.random_range(0.0..TAU),
            stride_phase: rng.random_range(0.0..TAU),
            jitter,
            sway: effect.sway_amplitude * level,
            sway_hz: effect.sway_hz,
            sway_phase: rng.random_range(0.0..TAU),
        }
    }

    fn phase(&self, t: f64) -> f64 {
        let wander: f64 = self.jitter.iter().map(|&(a, f, ph)| a * (TAU * f * t + ph).sin()).sum();
        TAU * self.cadence * t + self.phase0 + wander
    }

    /// Sideways sway acceleration.
    fn sway_at(&self, t: f64) -> f64 {
        self.sway * (TAU * self.sway_hz * t + self.sway_phase).sin()
    }

    /// Body tilt toward the side, radians; follows the sway.
    fn tilt_at(&self, t: f64) -> f64 {
        0.02 * self.sway_at(t)
    }
}

/// Body frame: forward, lateral, vertical.
type Body = [f64; 3];

/// Device axes (x, y, z) as signed picks from the body frame.
fn to_device(device: Device, v: Body) -> [f64; 3] {
    let [f, l, u] = v;
    match device {
        Device::Glass => [l, u, -f],
        Device::Watch => [u, f, l],
        Device::Band => [-u, f, -l],
        Device::Phone => [l, u, f],
    }
}

fn device_motion(device: Device, g: &Gait, t: f64) -> (Body, Body) {
    let phi = g.phase(t);
    let half = 0.5 * phi + g.stride_phase;
    let a = g.amplitude;
    let (damp, swing_sign) = match device {
        Device::Glass => (0.6, 0.0),
        Device::Watch => (1.0, 1.0),
        Device::Band => (1.0, -1.0),
        Device::Phone => (1.0, 0.0),
    };
    let vertical = a * (phi.sin() + 0.35 * (2.0 * phi + 0.6).sin());
    let forward = 0.3 * a * (phi + 0.3).cos() + swing_sign * g.arm_swing * a * half.sin();
    let lateral = 0.25 * a * half.sin() + g.sway_at(t);
    let linear = [damp * forward, damp * lateral + (1.0 - damp) * g.sway_at(t), damp * vertical];

    let swing_rate = swing_sign.abs() * 1.2 * g.arm_swing;
    let base = if device == Device::Glass { 0.15 } else { 0.3 };
    let sway_rate = 0.02 * g.sway * TAU * g.sway_hz * (TAU * g.sway_hz * t + g.sway_phase).cos();
    let angular = [
        sway_rate + 0.5 * base * half.cos(),
        base * phi.cos() + swing_rate * half.cos(),
        0.5 * base * (half + 0.8).sin(),
    ];
    (linear, angular)
}

fn gravity_body(g: &Gait, t: f64) -> Body {
    let tilt = g.tilt_at(t);
    [0.0, GRAVITY * tilt.sin(), GRAVITY * tilt.cos()]
}

fn magnetic_body(g: &Gait, t: f64) -> Body {
    // Earth field with a small heading wobble at the stride frequency
    let yaw = 0.05 * (0.5 * g.phase(t)).sin();
    let (s, c) = yaw.sin_cos();
    let (f, l, u) = (22.0, 3.0, -40.0);
    [c * f - s * l, s * f + c * l, u]
}

fn quantize(v: f64) -> f64 {
    (v * 1e4).round() / 1e4
}

fn sensor_index(kind: SensorKind) -> u64 {
    SensorKind::ALL.iter().position(|&k| k == kind).unwrap_or(0) as u64
}

fn device_index(device: Device) -> u64 {
    Device::ALL.iter().position(|&d| d == device).unwrap_or(0) as u64
}

fn generate_stream(
    p: &SubjectProfile,
    session: Session,
    gait: &Gait,
    device: Device,
    sensor: SensorKind,
    noise: &NoiseModel,
) -> Result<SensorStream> {
    let rate = device.spec().max_rate_hz;
    let n = (DURATION_S * rate).round() as usize;
    let mut rng = stream_rng(p.seed, session, device_index(device), sensor_index(sensor));
    let sd = match sensor {
        SensorKind::Accelerometer | SensorKind::LinearAcceleration => noise.accel,
        SensorKind::Gravity => noise.accel * 0.1,
        SensorKind::Gyroscope => noise.gyro,
        SensorKind::Compass => noise.compass,
    };
    let dist = Normal::new(0.0, sd).map_err(|e| Error::InvalidProfile(e.to_string()))?;
    let mut samples = Vec::with_capacity(n);
    for k in 0..n {
        let t = k as f64 / rate;
        let t_ns = (k as f64 * 1e9 / rate).round() as i64;
        let v: Body = match sensor {
            SensorKind::Accelerometer => {
                let (lin, _) = device_motion(device, gait, t);
                let grav = gravity_body(gait, t);
                [lin[0] + grav[0], lin[1] + grav[1], lin[2] + grav[2]]
            }
            SensorKind::LinearAcceleration => device_motion(device, gait, t).0,
            SensorKind::Gyroscope => device_motion(device, gait, t).1,
            SensorKind::Gravity => gravity_body(gait, t),
            SensorKind::Compass => magnetic_body(gait, t),
        };
        let d = to_device(device, v);
        samples.push(Sample::new(
            t_ns,
            quantize(d[0] + dist.sample(&mut rng)),
            quantize(d[1] + dist.sample(&mut rng)),
            quantize(d[2] + dist.sample(&mut rng)),
        ));
    }
    SensorStream::new(device, sensor, samples)
}

pub fn generate_recording(
    p: &SubjectProfile,
    session: Session,
    effect: &EffectModel,
    noise: &NoiseModel,
) -> Result<GaitRecording> {
    p.validate()?;
    let gait = Gait::new(p, session, effect);
    let mut streams = Vec::new();
    for device in Device::ALL {
        if device == Device::Phone && !p.has_phone {
            continue;
        }
        for &sensor in device.spec().sensors {
            streams.push(generate_stream(p, session, &gait, device, sensor, noise)?);
        }
    }
    GaitRecording::new(p.subject_id.clone(), session, streams)
}

pub fn generate_pair(p: &SubjectProfile) -> Result<SubjectPair> {
    generate_pair_with(p, &EffectModel::default(), &NoiseModel::default())
}

pub fn generate_pair_with(p: &SubjectProfile, effect: &EffectModel, noise: &NoiseModel) -> Result<SubjectPair> {
    let before = generate_recording(p, Session::Before, effect, noise)?;
    let after = generate_recording(p, Session::After, effect, noise)?;
    SubjectPair::new(before, after, p.brac)
}

/// Subject profiles for a dataset, in subject-id order.
pub fn generate_profiles(n: usize, cfg: &SynthConfig, master_seed: u64) -> Result<Vec<SubjectProfile>> {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    let bracs = cfg.distribution.sample(n, &mut rng)?;
    if cfg.phone_missing > n {
        return Err(Error::BadDistribution("more phoneless subjects than subjects".into()));
    }
    let mut phoneless: Vec<usize> = (0..n).collect();
    phoneless.shuffle(&mut rng);
    phoneless.truncate(cfg.phone_missing);
    let width = n.to_string().len().max(2);
    Ok(bracs
        .into_iter()
        .enumerate()
        .map(|(i, brac)| SubjectProfile {
            subject_id: format!("S{:0width$}", i + 1),
            cadence_hz: rng.random_range(1.6..=2.2),
            step_amplitude: rng.random_range(1.5..=3.0),
            arm_swing_ratio: rng.random_range(0.4..=1.0),
            // labels are stored with the same precision as the signals
            brac: quantize(brac),
            seed: rng.random(),
            has_phone: !phoneless.contains(&i),
        })
        .collect())
}

pub fn generate_dataset(n: usize, distribution: &BracDistribution, master_seed: u64) -> Result<Vec<SubjectPair>> {
    let cfg = SynthConfig {
        distribution: *distribution,
        ..SynthConfig::default()
    };
    generate_dataset_with(n, &cfg, master_seed)
}

pub fn generate_dataset_with(n: usize, cfg: &SynthConfig, master_seed: u64) -> Result<Vec<SubjectPair>> {
    let profiles = generate_profiles(n, cfg, master_seed)?;
    par_map(&profiles, |p| generate_pair_with(p, &cfg.effect, &cfg.noise))
        .into_iter()
        .collect()
}

/// Writes `recordings/<id>_before.csv`, `recordings/<id>_after.csv` and
/// `labels.csv` under `dir`.
pub fn write_dataset(dir: impl AsRef<Path>, pairs: &[SubjectPair]) -> Result<()> {
    let dir = dir.as_ref();
    let rec_dir = dir.join("recordings");
    std::fs::create_dir_all(&rec_dir).map_err(|e| Error::io(&rec_dir, e))?;
    let mut labels = BTreeMap::new();
    for p in pairs {
        for rec in [p.before(), p.after()] {
            let name = format!("{}_{}.csv", p.subject_id(), rec.session().name());
            write_recording(rec_dir.join(name), rec)?;
        }
        labels.insert(p.subject_id().to_string(), p.brac());
    }
    let path = dir.join("labels.csv");
    std::fs::write(&path, serialize_labels(&labels)).map_err(|e| Error::io(&path, e))
}
