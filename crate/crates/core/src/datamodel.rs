//! Device and sensor catalog, recording types, and the recording / label
//! CSV formats.
//!
//! A recording file looks like this:
//!
//! ```text
//! subject_id,session,device,sensor
//! s01,before
//! #stream,Glass,Accelerometer
//! 0,0.12,-0.3,9.81
//! 10000000,0.15,-0.28,9.79
//! #stream,Glass,Gyroscope
//! ...
//! ```
//!
//! The second line fills the `subject_id` and `session` columns; each
//! `#stream` section line fills `device` and `sensor` for the `t_ns,x,y,z`
//! rows that follow it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const RECORDING_HEADER: &str = "subject_id,session,device,sensor";
pub const LABELS_HEADER: &str = "subject_id,brac";
const STREAM_MARKER: &str = "#stream";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Device {
    Glass,
    Watch,
    Band,
    Phone,
}

impl Device {
    /// Canonical device order used everywhere features are concatenated.
    pub const ALL: [Device; 4] = [Device::Glass, Device::Watch, Device::Band, Device::Phone];

    pub fn name(self) -> &'static str {
        match self {
            Device::Glass => "Glass",
            Device::Watch => "Watch",
            Device::Band => "Band",
            Device::Phone => "Phone",
        }
    }

    pub fn spec(self) -> DeviceSpec {
        use SensorKind::*;
        const FULL: &[SensorKind] = &[Accelerometer, LinearAcceleration, Gyroscope, Gravity, Compass];
        const BAND: &[SensorKind] = &[Accelerometer, Gyroscope];
        match self {
            Device::Glass => DeviceSpec {
                device: self,
                body_location: BodyLocation::Head,
                sensors: FULL,
                max_rate_hz: 100.0,
            },
            Device::Watch => DeviceSpec {
                device: self,
                body_location: BodyLocation::LeftHand,
                sensors: FULL,
                max_rate_hz: 200.0,
            },
            Device::Band => DeviceSpec {
                device: self,
                body_location: BodyLocation::RightHand,
                sensors: BAND,
                max_rate_hz: 62.0,
            },
            Device::Phone => DeviceSpec {
                device: self,
                body_location: BodyLocation::Rump,
                sensors: FULL,
                max_rate_hz: 180.0,
            },
        }
    }
}

impl fmt::Display for Device {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Device {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Device::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownDevice(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BodyLocation {
    Head,
    LeftHand,
    RightHand,
    Rump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SensorKind {
    Accelerometer,
    LinearAcceleration,
    Gyroscope,
    Gravity,
    Compass,
}

impl SensorKind {
    pub const ALL: [SensorKind; 5] = [
        SensorKind::Accelerometer,
        SensorKind::LinearAcceleration,
        SensorKind::Gyroscope,
        SensorKind::Gravity,
        SensorKind::Compass,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SensorKind::Accelerometer => "Accelerometer",
            SensorKind::LinearAcceleration => "LinearAcceleration",
            SensorKind::Gyroscope => "Gyroscope",
            SensorKind::Gravity => "Gravity",
            SensorKind::Compass => "Compass",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            SensorKind::Accelerometer | SensorKind::LinearAcceleration | SensorKind::Gravity => "m/s^2",
            SensorKind::Gyroscope => "rad/s",
            SensorKind::Compass => "uT",
        }
    }
}

impl fmt::Display for SensorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SensorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SensorKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownSensor(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceSpec {
    pub device: Device,
    pub body_location: BodyLocation,
    pub sensors: &'static [SensorKind],
    pub max_rate_hz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t_ns: i64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Sample {
    pub fn new(t_ns: i64, x: f64, y: f64, z: f64) -> Self {
        Self { t_ns, x, y, z }
    }

    pub fn t_seconds(&self) -> f64 {
        self.t_ns as f64 * 1e-9
    }
}

/// One sensor's samples for one device in one session.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorStream {
    device: Device,
    sensor: SensorKind,
    samples: Vec<Sample>,
}

impl SensorStream {
    pub fn new(device: Device, sensor: SensorKind, samples: Vec<Sample>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::EmptyStream {
                device: device.to_string(),
                sensor: sensor.to_string(),
            });
        }
        for w in samples.windows(2) {
            if w[1].t_ns <= w[0].t_ns {
                return Err(Error::NonMonotonicTime {
                    device: device.to_string(),
                    sensor: sensor.to_string(),
                    t_ns: w[1].t_ns,
                });
            }
        }
        if samples
            .iter()
            .any(|s| !(s.x.is_finite() && s.y.is_finite() && s.z.is_finite()))
        {
            return Err(Error::NonFiniteInput);
        }
        Ok(Self {
            device,
            sensor,
            samples,
        })
    }

    pub fn device(&self) -> Device {
        self.device
    }

    pub fn sensor(&self) -> SensorKind {
        self.sensor
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Session {
    Before,
    After,
}

impl Session {
    pub fn name(self) -> &'static str {
        match self {
            Session::Before => "before",
            Session::After => "after",
        }
    }
}

impl FromStr for Session {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "before" => Ok(Session::Before),
            "after" => Ok(Session::After),
            other => Err(Error::malformed(2, format!("unknown session '{other}'"))),
        }
    }
}

/// All streams of one subject in one session.
#[derive(Debug, Clone, PartialEq)]
pub struct GaitRecording {
    subject_id: String,
    session: Session,
    streams: Vec<SensorStream>,
}

impl GaitRecording {
    pub fn new(subject_id: impl Into<String>, session: Session, streams: Vec<SensorStream>) -> Result<Self> {
        let subject_id = subject_id.into();
        if subject_id.is_empty() || subject_id.contains(',') {
            return Err(Error::InvalidRecording(format!("bad subject id '{subject_id}'")));
        }
        let mut seen = BTreeSet::new();
        for s in &streams {
            if !s.device.spec().sensors.contains(&s.sensor) {
                return Err(Error::InvalidRecording(format!(
                    "device {} has no {} sensor",
                    s.device, s.sensor
                )));
            }
            if !seen.insert((s.device, s.sensor)) {
                return Err(Error::InvalidRecording(format!(
                    "stream {}/{} appears twice",
                    s.device, s.sensor
                )));
            }
        }
        Ok(Self {
            subject_id,
            session,
            streams,
        })
    }

    pub fn subject_id(&self) -> &str {
        &self.subject_id
    }

    pub fn session(&self) -> Session {
        self.session
    }

    pub fn streams(&self) -> &[SensorStream] {
        &self.streams
    }

    pub fn stream(&self, device: Device, sensor: SensorKind) -> Option<&SensorStream> {
        self.streams
            .iter()
            .find(|s| s.device == device && s.sensor == sensor)
    }

    pub fn devices(&self) -> BTreeSet<Device> {
        self.streams.iter().map(|s| s.device).collect()
    }

    pub fn has_phone(&self) -> bool {
        self.streams.iter().any(|s| s.device == Device::Phone)
    }

    fn stream_keys(&self) -> BTreeSet<(Device, SensorKind)> {
        self.streams.iter().map(|s| (s.device, s.sensor)).collect()
    }
}

/// A subject's before/after recordings with their breathalyzer label.
#[derive(Debug, Clone, PartialEq)]
pub struct SubjectPair {
    before: GaitRecording,
    after: GaitRecording,
    brac: f64,
}

impl SubjectPair {
    pub fn new(before: GaitRecording, after: GaitRecording, brac: f64) -> Result<Self> {
        if before.session != Session::Before || after.session != Session::After {
            return Err(Error::InvalidRecording("sessions must be (before, after)".into()));
        }
        if before.subject_id != after.subject_id {
            return Err(Error::InvalidRecording(format!(
                "subject mismatch: '{}' vs '{}'",
                before.subject_id, after.subject_id
            )));
        }
        if before.stream_keys() != after.stream_keys() {
            return Err(Error::InvalidRecording(format!(
                "subject '{}': before and after expose different streams",
                before.subject_id
            )));
        }
        if !(brac >= 0.0 && brac.is_finite()) {
            return Err(Error::NegativeBrac {
                subject: before.subject_id.clone(),
                brac,
            });
        }
        Ok(Self { before, after, brac })
    }

    pub fn subject_id(&self) -> &str {
        &self.before.subject_id
    }

    pub fn before(&self) -> &GaitRecording {
        &self.before
    }

    pub fn after(&self) -> &GaitRecording {
        &self.after
    }

    pub fn brac(&self) -> f64 {
        self.brac
    }

    pub fn has_phone(&self) -> bool {
        self.before.has_phone()
    }
}

/// Legal BrAC limits in µg alcohol per litre of breath.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BracThreshold(u16);

impl BracThreshold {
    pub const ALL: [BracThreshold; 4] = [
        BracThreshold(220),
        BracThreshold(240),
        BracThreshold(250),
        BracThreshold(350),
    ];

    pub fn new(value: f64) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| f64::from(t.0) == value)
            .ok_or(Error::InvalidThreshold(value))
    }

    pub fn value(self) -> f64 {
        f64::from(self.0)
    }
}

impl fmt::Display for BracThreshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for BracThreshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v: f64 = s.trim().parse().map_err(|_| Error::InvalidThreshold(f64::NAN))?;
        Self::new(v)
    }
}

/// Ordered so that `Sober < Drunk`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Class {
    Sober,
    Drunk,
}

/// Equality with the threshold counts as drunk.
pub fn label_class(brac: f64, threshold: BracThreshold) -> Class {
    if brac >= threshold.value() {
        Class::Drunk
    } else {
        Class::Sober
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn parse_recording(path: impl AsRef<Path>) -> Result<GaitRecording> {
    parse_recording_str(&read_file(path.as_ref())?)
}

pub fn parse_recording_str(text: &str) -> Result<GaitRecording> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, h)) if h.trim_end() == RECORDING_HEADER => {}
        Some((n, h)) => return Err(Error::malformed(n, format!("expected header '{RECORDING_HEADER}', got '{h}'"))),
        None => return Err(Error::malformed(1, "empty file")),
    }
    let (subject_id, session) = match lines.next() {
        Some((n, l)) => {
            let cols: Vec<&str> = l.trim_end().split(',').collect();
            if cols.len() != 2 || cols[0].is_empty() {
                return Err(Error::malformed(n, "expected '<subject_id>,<session>'"));
            }
            let session: Session = cols[1]
                .parse()
                .map_err(|_| Error::malformed(n, format!("unknown session '{}'", cols[1])))?;
            (cols[0].to_string(), session)
        }
        None => return Err(Error::malformed(2, "missing subject row")),
    };

    let mut streams = Vec::new();
    let mut current: Option<(Device, SensorKind, Vec<Sample>)> = None;
    for (n, raw) in lines {
        let line = raw.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix(STREAM_MARKER) {
            if let Some((d, k, s)) = current.take() {
                streams.push(SensorStream::new(d, k, s)?);
            }
            let cols: Vec<&str> = rest.trim_start_matches(',').split(',').collect();
            if !rest.starts_with(',') || cols.len() != 2 {
                return Err(Error::malformed(n, "expected '#stream,<device>,<sensor>'"));
            }
            let device: Device = cols[0].parse()?;
            let sensor: SensorKind = cols[1].parse()?;
            current = Some((device, sensor, Vec::new()));
            continue;
        }
        let Some((_, _, samples)) = current.as_mut() else {
            return Err(Error::malformed(n, "data row before any #stream section"));
        };
        samples.push(parse_sample(n, line)?);
    }
    if let Some((d, k, s)) = current.take() {
        streams.push(SensorStream::new(d, k, s)?);
    }
    if streams.is_empty() {
        return Err(Error::malformed(2, "no streams"));
    }
    GaitRecording::new(subject_id, session, streams)
}

fn parse_sample(line: usize, row: &str) -> Result<Sample> {
    let mut it = row.split(',');
    let mut next = |what: &str| {
        it.next()
            .ok_or_else(|| Error::malformed(line, format!("missing {what}")))
    };
    let t_ns: i64 = next("t_ns")?
        .trim()
        .parse()
        .map_err(|_| Error::malformed(line, "t_ns is not an integer"))?;
    let mut vals = [0.0f64; 3];
    for (v, name) in vals.iter_mut().zip(["x", "y", "z"]) {
        *v = next(name)?
            .trim()
            .parse()
            .map_err(|_| Error::malformed(line, format!("{name} is not a number")))?;
    }
    if it.next().is_some() {
        return Err(Error::malformed(line, "too many columns"));
    }
    Ok(Sample::new(t_ns, vals[0], vals[1], vals[2]))
}

/// Writes values with the shortest representation that parses back to the
/// same bits, so `parse(serialize(r)) == r`.
pub fn serialize_recording(rec: &GaitRecording) -> String {
    let rows: usize = rec.streams.iter().map(|s| s.samples.len()).sum();
    let mut out = String::with_capacity(rows * 48 + 64);
    out.push_str(RECORDING_HEADER);
    out.push('\n');
    let _ = writeln!(out, "{},{}", rec.subject_id, rec.session.name());
    for s in &rec.streams {
        let _ = writeln!(out, "{STREAM_MARKER},{},{}", s.device, s.sensor);
        for p in &s.samples {
            let _ = writeln!(out, "{},{},{},{}", p.t_ns, p.x, p.y, p.z);
        }
    }
    out
}

pub fn write_recording(path: impl AsRef<Path>, rec: &GaitRecording) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, serialize_recording(rec)).map_err(|e| Error::io(path, e))
}

pub fn parse_labels(path: impl AsRef<Path>) -> Result<BTreeMap<String, f64>> {
    parse_labels_str(&read_file(path.as_ref())?)
}

pub fn parse_labels_str(text: &str) -> Result<BTreeMap<String, f64>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, h)) if h.trim_end() == LABELS_HEADER => {}
        Some((n, h)) => return Err(Error::malformed(n, format!("expected header '{LABELS_HEADER}', got '{h}'"))),
        None => return Err(Error::malformed(1, "empty file")),
    }
    let mut labels = BTreeMap::new();
    for (n, raw) in lines {
        let line = raw.trim_end();
        if line.is_empty() {
            continue;
        }
        let (subject, brac) = line
            .split_once(',')
            .ok_or_else(|| Error::malformed(n, "expected '<subject_id>,<brac>'"))?;
        if subject.is_empty() {
            return Err(Error::malformed(n, "empty subject id"));
        }
        let brac: f64 = brac
            .trim()
            .parse()
            .map_err(|_| Error::malformed(n, format!("brac '{brac}' is not a number")))?;
        if !brac.is_finite() {
            return Err(Error::malformed(n, "non-finite brac"));
        }
        if brac < 0.0 {
            return Err(Error::NegativeBrac {
                subject: subject.to_string(),
                brac,
            });
        }
        if labels.insert(subject.to_string(), brac).is_some() {
            return Err(Error::DuplicateSubject(subject.to_string()));
        }
    }
    Ok(labels)
}

pub fn serialize_labels(labels: &BTreeMap<String, f64>) -> String {
    let mut out = String::from(LABELS_HEADER);
    out.push('\n');
    for (s, b) in labels {
        let _ = writeln!(out, "{s},{b}");
    }
    out
}

/// Reads every `*.csv` recording under `dir` and pairs the sessions of each
/// subject with its label. Subjects are returned in id order.
pub fn load_dataset(dir: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<Vec<SubjectPair>> {
    let dir = dir.as_ref();
    let labels = parse_labels(labels_path)?;
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .map(|e| e.map(|e| e.path()).map_err(|err| Error::io(dir, err)))
        .collect::<Result<_>>()?;
    files.retain(|p| p.extension().is_some_and(|x| x == "csv"));
    files.sort();
    if files.is_empty() {
        return Err(Error::MissingSession {
            subject: "*".into(),
            session: Session::Before.name().into(),
            hint: format!(": no recordings found in {}", dir.display()),
        });
    }
    let parsed = crate::par_map(&files, |p| {
        parse_recording(p).map_err(|e| match e {
            Error::MalformedFile { line, reason } => Error::MalformedFile {
                line,
                reason: format!("{}: {reason}", p.display()),
            },
            other => other,
        })
    });
    let mut sessions: BTreeMap<String, (Option<GaitRecording>, Option<GaitRecording>)> = BTreeMap::new();
    for rec in parsed {
        let rec = rec?;
        let slot = sessions.entry(rec.subject_id().to_string()).or_default();
        let target = match rec.session() {
            Session::Before => &mut slot.0,
            Session::After => &mut slot.1,
        };
        if target.is_some() {
            return Err(Error::InvalidRecording(format!(
                "subject '{}' has two {} recordings",
                rec.subject_id(),
                rec.session().name()
            )));
        }
        *target = Some(rec);
    }
    let mut pairs = Vec::with_capacity(sessions.len());
    for (subject, (before, after)) in sessions {
        let missing = |session: Session| Error::MissingSession {
            subject: subject.clone(),
            session: session.name().into(),
            hint: String::new(),
        };
        let before = before.ok_or_else(|| missing(Session::Before))?;
        let after = after.ok_or_else(|| missing(Session::After))?;
        let brac = *labels.get(&subject).ok_or_else(|| Error::MissingLabel(subject.clone()))?;
        pairs.push(SubjectPair::new(before, after, brac)?);
    }
    Ok(pairs)
}
