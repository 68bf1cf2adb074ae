//! The stone ledger: an append-only record of every weak reading.
//!
//! Entries are keyed by (serial, side, row) and are never mutated or
//! deleted once written. The wire format is CSV with columns
//! `serial,side,row,orientation_deg,reading,binarized` where side is one of
//! L, R, S and binarized is U or D. Readings are written with Rust's
//! shortest round-trip float formatting, so parsing recovers them exactly.

use crate::spinalg::Spin;
use std::io::{BufRead, Write};

use super::ProtocolError;

/// Which record stream an entry belongs to: Left/Right of an EPR pair, or
/// the Single stream of the one-particle experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RecordSide {
    Left,
    Right,
    Single,
}

impl RecordSide {
    pub fn letter(self) -> char {
        match self {
            RecordSide::Left => 'L',
            RecordSide::Right => 'R',
            RecordSide::Single => 'S',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'L' => Some(RecordSide::Left),
            'R' => Some(RecordSide::Right),
            'S' => Some(RecordSide::Single),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LedgerEntry {
    pub serial: u64,
    pub side: RecordSide,
    pub row: u8,
    pub orientation_deg: f64,
    pub reading: f64,
    pub binarized: Spin,
}

pub const LEDGER_HEADER: &str = "serial,side,row,orientation_deg,reading,binarized";

/// Append-only store of weak readings plus the seed it was generated from.
#[derive(Debug, Clone)]
pub struct StoneLedger {
    entries: Vec<LedgerEntry>,
    seed: u64,
}

impl StoneLedger {
    pub(crate) fn new(seed: u64) -> Self {
        Self {
            entries: Vec::new(),
            seed,
        }
    }

    pub(crate) fn append(&mut self, entry: LedgerEntry) {
        self.entries.push(entry);
    }

    pub(crate) fn extend(&mut self, entries: impl IntoIterator<Item = LedgerEntry>) {
        self.entries.extend(entries);
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All readings of one (side, row), sorted by serial.
    pub fn row_readings(&self, side: RecordSide, row: u8) -> Vec<(u64, f64)> {
        let mut out: Vec<(u64, f64)> = self
            .entries
            .iter()
            .filter(|e| e.side == side && e.row == row)
            .map(|e| (e.serial, e.reading))
            .collect();
        out.sort_unstable_by_key(|(serial, _)| *serial);
        out
    }

    /// Binarized readings of one (side, row), sorted by serial.
    pub fn row_binarized(&self, side: RecordSide, row: u8) -> Vec<(u64, Spin)> {
        let mut out: Vec<(u64, Spin)> = self
            .entries
            .iter()
            .filter(|e| e.side == side && e.row == row)
            .map(|e| (e.serial, e.binarized))
            .collect();
        out.sort_unstable_by_key(|(serial, _)| *serial);
        out
    }

    /// Orientation label of one (side, row), if present.
    pub fn row_orientation_deg(&self, side: RecordSide, row: u8) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.side == side && e.row == row)
            .map(|e| e.orientation_deg)
    }

    /// Distinct rows present for a side, ascending.
    pub fn rows_for_side(&self, side: RecordSide) -> Vec<u8> {
        let mut rows: Vec<u8> = self
            .entries
            .iter()
            .filter(|e| e.side == side)
            .map(|e| e.row)
            .collect();
        rows.sort_unstable();
        rows.dedup();
        rows
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{LEDGER_HEADER}")?;
        for e in &self.entries {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                e.serial,
                e.side.letter(),
                e.row,
                e.orientation_deg,
                e.reading,
                e.binarized.letter()
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is ASCII")
    }

    /// Parse a ledger CSV. Malformed rows are reported with their 1-based
    /// line number. The seed is not stored in the CSV; it lives in the run
    /// manifest, so a parsed ledger carries seed 0 unless told otherwise.
    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self, ProtocolError> {
        let mut ledger = StoneLedger::new(0);
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if idx == 0 {
                if trimmed != LEDGER_HEADER {
                    return Err(ProtocolError::Malformed {
                        line: 1,
                        message: format!("expected header '{LEDGER_HEADER}'"),
                    });
                }
                continue;
            }
            let entry = parse_entry(trimmed).map_err(|message| ProtocolError::Malformed {
                line: idx + 1,
                message,
            })?;
            ledger.append(entry);
        }
        Ok(ledger)
    }

    pub fn from_csv_str(text: &str) -> Result<Self, ProtocolError> {
        Self::read_csv(text.as_bytes())
    }
}

fn parse_entry(line: &str) -> Result<LedgerEntry, String> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 6 {
        return Err(format!("expected 6 fields, got {}", fields.len()));
    }
    let serial = fields[0]
        .parse::<u64>()
        .map_err(|e| format!("bad serial '{}': {e}", fields[0]))?;
    let side_char = fields[1]
        .chars()
        .next()
        .filter(|_| fields[1].len() == 1)
        .ok_or_else(|| format!("bad side '{}'", fields[1]))?;
    let side =
        RecordSide::from_letter(side_char).ok_or_else(|| format!("bad side '{}'", fields[1]))?;
    let row = fields[2]
        .parse::<u8>()
        .map_err(|e| format!("bad row '{}': {e}", fields[2]))?;
    if !(1..=9).contains(&row) {
        return Err(format!("row must be 1..=9, got {row}"));
    }
    let orientation_deg = fields[3]
        .parse::<f64>()
        .map_err(|e| format!("bad orientation '{}': {e}", fields[3]))?;
    let reading = fields[4]
        .parse::<f64>()
        .map_err(|e| format!("bad reading '{}': {e}", fields[4]))?;
    let bin_char = fields[5]
        .chars()
        .next()
        .filter(|_| fields[5].len() == 1)
        .ok_or_else(|| format!("bad binarized '{}'", fields[5]))?;
    let binarized =
        Spin::from_letter(bin_char).ok_or_else(|| format!("bad binarized '{}'", fields[5]))?;
    Ok(LedgerEntry {
        serial,
        side,
        row,
        orientation_deg,
        reading,
        binarized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(serial: u64, row: u8, reading: f64) -> LedgerEntry {
        LedgerEntry {
            serial,
            side: RecordSide::Single,
            row,
            orientation_deg: 60.0,
            reading,
            binarized: if reading >= 0.0 { Spin::Up } else { Spin::Down },
        }
    }

    #[test]
    fn csv_round_trips_exactly() {
        let mut ledger = StoneLedger::new(7);
        ledger.append(entry(1, 1, 0.123_456_789_012_345_67));
        ledger.append(entry(1, 2, -3.5e-12));
        ledger.append(entry(2, 1, f64::MIN_POSITIVE));
        let text = ledger.to_csv_string();
        let back = StoneLedger::from_csv_str(&text).unwrap();
        assert_eq!(ledger.entries(), back.entries());
    }

    #[test]
    fn malformed_rows_name_their_line() {
        let text = format!("{LEDGER_HEADER}\n1,S,1,60,0.5,U\n1,S,banana,60,0.5,U\n");
        match StoneLedger::from_csv_str(&text) {
            Err(ProtocolError::Malformed { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("row"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_header_is_rejected() {
        assert!(StoneLedger::from_csv_str("serial,side\n").is_err());
    }

    #[test]
    fn row_queries_sort_by_serial() {
        let mut ledger = StoneLedger::new(0);
        ledger.append(entry(2, 1, 1.0));
        ledger.append(entry(1, 1, -1.0));
        ledger.append(entry(1, 2, 0.5));
        let row1 = ledger.row_readings(RecordSide::Single, 1);
        assert_eq!(row1, vec![(1, -1.0), (2, 1.0)]);
        let bins = ledger.row_binarized(RecordSide::Single, 1);
        assert_eq!(bins, vec![(1, Spin::Down), (2, Spin::Up)]);
        assert_eq!(ledger.rows_for_side(RecordSide::Single), vec![1, 2]);
    }
}
