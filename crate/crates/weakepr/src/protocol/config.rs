//! Experiment configuration and the flat `key = value` config format.
//!
//! Angles are carried in degrees here (the human-facing unit) and converted
//! to radians at the point of use.

use crate::measurement::PointerConfig;
use crate::spinalg::Orientation;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::ProtocolError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    SingleParticle,
    EprPair,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::SingleParticle => "single",
            ExperimentKind::EprPair => "epr",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "single" => Some(ExperimentKind::SingleParticle),
            "epr" => Some(ExperimentKind::EprPair),
            _ => None,
        }
    }
}

/// An evening orientation: fixed in advance, or freely chosen at the last
/// moment from a seeded choice stream that never reads ledger state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EveningChoice {
    FixedDeg(f64),
    Free,
}

impl EveningChoice {
    fn flat_value(&self) -> String {
        match self {
            EveningChoice::FixedDeg(d) => format!("{d}"),
            EveningChoice::Free => "free".to_string(),
        }
    }

    fn parse(value: &str) -> Result<Self, String> {
        if value == "free" {
            Ok(EveningChoice::Free)
        } else {
            value
                .parse::<f64>()
                .map(EveningChoice::FixedDeg)
                .map_err(|e| format!("bad angle '{value}': {e}"))
        }
    }
}

/// Full description of one run. `n_particles` doubles as the pointer
/// ensemble size, so the coupling is `lambda / n^exponent`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n_particles: u64,
    pub alpha_deg: f64,
    pub beta_deg: f64,
    pub gamma_deg: f64,
    pub lambda: f64,
    pub delta: f64,
    pub coupling_exponent: f64,
    pub seed: u64,
    /// Single-particle experiment only.
    pub bob_morning_deg: Option<f64>,
    /// Single-particle experiment only.
    pub bob_evening: Option<EveningChoice>,
    /// EPR experiment only.
    pub bob_evening_right: Option<EveningChoice>,
    /// EPR experiment only.
    pub bob_evening_left: Option<EveningChoice>,
    pub threads: usize,
}

impl ExperimentConfig {
    /// Validate all invariants. Returns advisory warnings (currently only
    /// the weakness-regime flag); hard violations are errors.
    pub fn validate(&self) -> Result<Vec<String>, ProtocolError> {
        let fail = |msg: String| Err(ProtocolError::Config(msg));
        if self.n_particles < 2 || !self.n_particles.is_multiple_of(2) {
            return fail(format!(
                "n must be even and at least 2, got {}",
                self.n_particles
            ));
        }
        let a = Orientation::from_degrees(self.alpha_deg);
        let b = Orientation::from_degrees(self.beta_deg);
        let g = Orientation::from_degrees(self.gamma_deg);
        let close = |x: Orientation, y: Orientation| (x.radians() - y.radians()).abs() < 1e-9;
        if close(a, b) || close(b, g) || close(a, g) {
            return fail("alpha, beta and gamma must be pairwise distinct angles".into());
        }
        let pointer = self.pointer()?;
        match self.kind {
            ExperimentKind::SingleParticle => {
                if self.bob_morning_deg.is_none() || self.bob_evening.is_none() {
                    return fail(
                        "single-particle runs need bob_morning_deg and bob_evening".into(),
                    );
                }
            }
            ExperimentKind::EprPair => {
                if self.bob_evening_right.is_none() || self.bob_evening_left.is_none() {
                    return fail("EPR runs need bob_right and bob_left evening choices".into());
                }
            }
        }
        if self.threads == 0 {
            return fail("threads must be at least 1".into());
        }
        let mut warnings = Vec::new();
        if !pointer.is_weak() {
            warnings.push(format!(
                "pointer regime is not weak: delta = {} < 10 g = {}",
                pointer.delta(),
                10.0 * pointer.coupling()
            ));
        }
        Ok(warnings)
    }

    pub fn pointer(&self) -> Result<PointerConfig, ProtocolError> {
        PointerConfig::new(
            self.lambda,
            self.delta,
            self.n_particles,
            self.coupling_exponent,
        )
        .map_err(|e| ProtocolError::Config(e.to_string()))
    }

    pub fn alpha(&self) -> Orientation {
        Orientation::from_degrees(self.alpha_deg)
    }

    pub fn beta(&self) -> Orientation {
        Orientation::from_degrees(self.beta_deg)
    }

    pub fn gamma(&self) -> Orientation {
        Orientation::from_degrees(self.gamma_deg)
    }

    /// Row orientations in schedule order: alpha, beta, gamma repeated.
    pub fn row_orientation_deg(&self, row: u8) -> f64 {
        match (row - 1) % 3 {
            0 => self.alpha_deg,
            1 => self.beta_deg,
            _ => self.gamma_deg,
        }
    }

    /// Serialize as flat `key = value` text.
    pub fn to_flat_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("experiment", self.kind.name().to_string());
        put("n", self.n_particles.to_string());
        put("alpha_deg", format!("{}", self.alpha_deg));
        put("beta_deg", format!("{}", self.beta_deg));
        put("gamma_deg", format!("{}", self.gamma_deg));
        put("lambda", format!("{}", self.lambda));
        put("delta", format!("{}", self.delta));
        put("coupling_exponent", format!("{}", self.coupling_exponent));
        put("seed", self.seed.to_string());
        put("threads", self.threads.to_string());
        if let Some(m) = self.bob_morning_deg {
            put("bob_morning_deg", format!("{m}"));
        }
        if let Some(e) = &self.bob_evening {
            put("bob_evening", e.flat_value());
        }
        if let Some(e) = &self.bob_evening_right {
            put("bob_right", e.flat_value());
        }
        if let Some(e) = &self.bob_evening_left {
            put("bob_left", e.flat_value());
        }
        out
    }

    /// Parse the flat `key = value` format; errors name the offending line.
    pub fn from_flat_text(text: &str) -> Result<Self, ProtocolError> {
        let map = parse_flat_map(text)?;
        Self::from_flat_map(&map)
    }

    fn from_flat_map(map: &BTreeMap<String, String>) -> Result<Self, ProtocolError> {
        let get = |key: &str| -> Result<&String, ProtocolError> {
            map.get(key)
                .ok_or_else(|| ProtocolError::Config(format!("missing config key '{key}'")))
        };
        let parse_f64 = |key: &str| -> Result<f64, ProtocolError> {
            get(key)?
                .parse::<f64>()
                .map_err(|e| ProtocolError::Config(format!("bad value for '{key}': {e}")))
        };
        let parse_u64 = |key: &str| -> Result<u64, ProtocolError> {
            get(key)?
                .parse::<u64>()
                .map_err(|e| ProtocolError::Config(format!("bad value for '{key}': {e}")))
        };
        let kind = ExperimentKind::from_name(get("experiment")?).ok_or_else(|| {
            ProtocolError::Config("experiment must be 'single' or 'epr'".to_string())
        })?;
        let choice = |key: &str| -> Result<Option<EveningChoice>, ProtocolError> {
            match map.get(key) {
                None => Ok(None),
                Some(v) => EveningChoice::parse(v)
                    .map(Some)
                    .map_err(ProtocolError::Config),
            }
        };
        let cfg = ExperimentConfig {
            kind,
            n_particles: parse_u64("n")?,
            alpha_deg: parse_f64("alpha_deg")?,
            beta_deg: parse_f64("beta_deg")?,
            gamma_deg: parse_f64("gamma_deg")?,
            lambda: parse_f64("lambda")?,
            delta: parse_f64("delta")?,
            coupling_exponent: map
                .get("coupling_exponent")
                .map(|v| v.parse::<f64>())
                .transpose()
                .map_err(|e| ProtocolError::Config(format!("bad coupling_exponent: {e}")))?
                .unwrap_or(0.5),
            seed: parse_u64("seed")?,
            bob_morning_deg: map
                .get("bob_morning_deg")
                .map(|v| v.parse::<f64>())
                .transpose()
                .map_err(|e| ProtocolError::Config(format!("bad bob_morning_deg: {e}")))?,
            bob_evening: choice("bob_evening")?,
            bob_evening_right: choice("bob_right")?,
            bob_evening_left: choice("bob_left")?,
            threads: map
                .get("threads")
                .map(|v| v.parse::<usize>())
                .transpose()
                .map_err(|e| ProtocolError::Config(format!("bad threads: {e}")))?
                .unwrap_or(1),
        };
        Ok(cfg)
    }
}

/// Parse `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_flat_map(text: &str) -> Result<BTreeMap<String, String>, ProtocolError> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ProtocolError::Malformed {
                line: idx + 1,
                message: format!("expected 'key = value', got '{raw}'"),
            });
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}
