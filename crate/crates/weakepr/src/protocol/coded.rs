//! Bob's coded outcome lists and the sealed coding key.
//!
//! Strong outcomes are published as (serial, coded orientation symbol,
//! above/below) triples. The key, a permutation of the protocol
//! orientations onto the symbols x, y, z plus one sign convention, stays
//! sealed: it can only be read back after an analysis has registered its
//! decoded guess, which is enforced with a call-order flag. The key is
//! derived from the run seed, so unsealing regenerates it instead of
//! persisting it alongside the coded list.

use crate::measurement::StrongOutcome;
use crate::rng::RandomStream;
use crate::spinalg::Spin;
use std::io::{BufRead, Write};

use super::ledger::RecordSide;
use super::ProtocolError;

/// Which strong list a coded file represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ListRole {
    Morning,
    Evening,
    EveningRight,
    EveningLeft,
}

impl ListRole {
    pub fn name(self) -> &'static str {
        match self {
            ListRole::Morning => "morning",
            ListRole::Evening => "evening",
            ListRole::EveningRight => "right",
            ListRole::EveningLeft => "left",
        }
    }

    /// Ledger side whose rows this list slices.
    pub fn ledger_side(self) -> RecordSide {
        match self {
            ListRole::Morning | ListRole::Evening => RecordSide::Single,
            ListRole::EveningRight => RecordSide::Right,
            ListRole::EveningLeft => RecordSide::Left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodedValue {
    Above,
    Below,
}

impl CodedValue {
    pub fn word(self) -> &'static str {
        match self {
            CodedValue::Above => "above",
            CodedValue::Below => "below",
        }
    }

    pub fn from_word(w: &str) -> Option<Self> {
        match w {
            "above" => Some(CodedValue::Above),
            "below" => Some(CodedValue::Below),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodedRecord {
    pub serial: u64,
    pub symbol: char,
    pub value: CodedValue,
}

/// The hidden coding: which orientation each symbol stands for, and
/// whether "above" means spin up.
#[derive(Debug, Clone, PartialEq)]
pub struct CodingKey {
    /// (symbol, orientation in degrees) for x, y, z in symbol order.
    pub symbol_to_deg: Vec<(char, f64)>,
    pub above_is_up: bool,
}

impl CodingKey {
    /// Draw a fresh key from a run-level stream: a random permutation of
    /// the three protocol orientations onto x/y/z plus a random sign
    /// convention.
    pub fn generate(protocol_deg: [f64; 3], rng: &mut RandomStream) -> Self {
        let mut slots = [0usize, 1, 2];
        rng.shuffle(&mut slots);
        let symbols = ['x', 'y', 'z'];
        let mut symbol_to_deg: Vec<(char, f64)> = slots
            .iter()
            .enumerate()
            .map(|(i, &slot)| (symbols[slot], protocol_deg[i]))
            .collect();
        symbol_to_deg.sort_unstable_by_key(|(c, _)| *c);
        CodingKey {
            symbol_to_deg,
            above_is_up: rng.bernoulli(0.5),
        }
    }

    /// Symbol for an orientation, when it is one of the protocol angles.
    pub fn symbol_for_deg(&self, deg: f64) -> Option<char> {
        let target = crate::spinalg::Orientation::from_degrees(deg).radians();
        self.symbol_to_deg
            .iter()
            .find(|(_, d)| {
                (crate::spinalg::Orientation::from_degrees(*d).radians() - target).abs() < 1e-9
            })
            .map(|(c, _)| *c)
    }

    /// First symbol (x before y before z) not claimed by `used`. Off-protocol
    /// evening angles are masked with such a spare symbol; the key still
    /// records only the protocol permutation.
    pub fn spare_symbol(used: &[char]) -> char {
        for c in ['x', 'y', 'z'] {
            if !used.contains(&c) {
                return c;
            }
        }
        'x'
    }

    pub fn to_flat_text(&self) -> String {
        let mut out = String::new();
        for (c, d) in &self.symbol_to_deg {
            out.push_str(&format!("{c}_deg = {d}\n"));
        }
        out.push_str(&format!(
            "above = {}\n",
            if self.above_is_up { "up" } else { "down" }
        ));
        out
    }
}

/// A decoded hypothesis: symbol-to-orientation assignments plus the sign
/// convention guess.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedMapping {
    pub symbol_to_deg: Vec<(char, f64)>,
    pub above_is_up: bool,
}

impl DecodedMapping {
    /// The permutation matches when every symbol maps to the same
    /// direction as in the key.
    pub fn permutation_matches(&self, key: &CodingKey) -> bool {
        if self.symbol_to_deg.len() != key.symbol_to_deg.len() {
            return false;
        }
        self.symbol_to_deg
            .iter()
            .all(|(c, d)| key.symbol_for_deg(*d) == Some(*c))
    }

    pub fn sign_matches(&self, key: &CodingKey) -> bool {
        self.above_is_up == key.above_is_up
    }

    /// 1.0 for an exact permutation match, else 0.0. A random guess scores
    /// 1/6 in expectation over the 3! equiprobable permutations.
    pub fn score(&self, key: &CodingKey) -> f64 {
        if self.permutation_matches(key) {
            1.0
        } else {
            0.0
        }
    }
}

pub const CODED_HEADER: &str = "serial,coded_orientation,coded_value";

/// One coded strong-outcome list with its sealed key.
#[derive(Debug, Clone)]
pub struct CodedList {
    pub role: ListRole,
    records: Vec<CodedRecord>,
    key: Option<CodingKey>,
    guess_registered: bool,
}

impl CodedList {
    /// Code a strong-outcome list under a key. `symbol` is the mask the
    /// list is published under.
    pub fn encode(
        role: ListRole,
        symbol: char,
        outcomes: &[StrongOutcome],
        key: &CodingKey,
    ) -> Self {
        let records = outcomes
            .iter()
            .map(|o| {
                let up_coded = if key.above_is_up {
                    CodedValue::Above
                } else {
                    CodedValue::Below
                };
                let value = match o.spin {
                    Spin::Up => up_coded,
                    Spin::Down => match up_coded {
                        CodedValue::Above => CodedValue::Below,
                        CodedValue::Below => CodedValue::Above,
                    },
                };
                CodedRecord {
                    serial: o.serial,
                    symbol,
                    value,
                }
            })
            .collect();
        CodedList {
            role,
            records,
            key: Some(key.clone()),
            guess_registered: false,
        }
    }

    pub fn records(&self) -> &[CodedRecord] {
        &self.records
    }

    pub fn serials(&self) -> impl Iterator<Item = u64> + '_ {
        self.records.iter().map(|r| r.serial)
    }

    /// The published symbol. Lists are single-orientation, so all records
    /// share it.
    pub fn symbol(&self) -> Option<char> {
        self.records.first().map(|r| r.symbol)
    }

    /// Declare the decoded guess; only after this may the key be unsealed.
    pub fn register_guess(&mut self, _guess: &DecodedMapping) {
        self.guess_registered = true;
    }

    /// Reveal the key for scoring. Errors if no guess has been registered
    /// (protocol order) or if this list was parsed from a file and carries
    /// no key material.
    pub fn unseal(&self) -> Result<&CodingKey, ProtocolError> {
        if !self.guess_registered {
            return Err(ProtocolError::OrderViolation(
                "unseal called before a decoded guess was registered".to_string(),
            ));
        }
        self.key
            .as_ref()
            .ok_or_else(|| ProtocolError::OrderViolation("list carries no sealed key".to_string()))
    }

    /// Attach a regenerated key to a list parsed from disk.
    pub fn reseal(&mut self, key: CodingKey) {
        self.key = Some(key);
        self.guess_registered = false;
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{CODED_HEADER}")?;
        for r in &self.records {
            writeln!(w, "{},{},{}", r.serial, r.symbol, r.value.word())?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is ASCII")
    }

    /// Parse a coded list CSV; the key is not in the file and must be
    /// resealed from the run seed before unsealing.
    pub fn read_csv<R: BufRead>(role: ListRole, reader: R) -> Result<Self, ProtocolError> {
        let mut records = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if idx == 0 {
                if trimmed != CODED_HEADER {
                    return Err(ProtocolError::Malformed {
                        line: 1,
                        message: format!("expected header '{CODED_HEADER}'"),
                    });
                }
                continue;
            }
            let fields: Vec<&str> = trimmed.split(',').collect();
            let fail = |message: String| ProtocolError::Malformed {
                line: idx + 1,
                message,
            };
            if fields.len() != 3 {
                return Err(fail(format!("expected 3 fields, got {}", fields.len())));
            }
            let serial = fields[0]
                .parse::<u64>()
                .map_err(|e| fail(format!("bad serial '{}': {e}", fields[0])))?;
            let symbol = fields[1]
                .chars()
                .next()
                .filter(|c| fields[1].len() == 1 && ['x', 'y', 'z'].contains(c))
                .ok_or_else(|| fail(format!("bad coded_orientation '{}'", fields[1])))?;
            let value = CodedValue::from_word(fields[2])
                .ok_or_else(|| fail(format!("bad coded_value '{}'", fields[2])))?;
            records.push(CodedRecord {
                serial,
                symbol,
                value,
            });
        }
        Ok(CodedList {
            role,
            records,
            key: None,
            guess_registered: false,
        })
    }

    pub fn from_csv_str(role: ListRole, text: &str) -> Result<Self, ProtocolError> {
        Self::read_csv(role, text.as_bytes())
    }
}
