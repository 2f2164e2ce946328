//! Plain-text Q-table snapshots.
//!
//! ```text
//! # wirehead q-table v1
//! # key = danger_left | danger_ahead<<1 | danger_right<<2 | seed_bearing<<3 | drug_bearing<<6 | facing<<9
//! # key q_left q_straight q_right
//! 17 1.0000000000000000e1 0.0000000000000000e0 -2.5000000000000000e-1
//! ```
//!
//! One record per stored observation, ascending by key. Values carry 17
//! significant digits, which round-trips every finite `f64` exactly.
//! Lines starting with `#` and blank lines are ignored when parsing.

use std::fmt::Write as _;
use std::path::Path;

use super::{ActionValues, QTable};
use crate::error::{Error, Result};
use crate::snake::{Observation, RelativeAction};

pub const SNAPSHOT_HEADER: &str = "# wirehead q-table v1";

pub fn write_snapshot(table: &QTable) -> String {
    let mut out = String::new();
    out.push_str(SNAPSHOT_HEADER);
    out.push('\n');
    out.push_str(
        "# key = danger_left | danger_ahead<<1 | danger_right<<2 | seed_bearing<<3 | drug_bearing<<6 | facing<<9\n",
    );
    out.push_str("# key q_left q_straight q_right\n");
    for (obs, row) in table.iter() {
        write!(out, "{}", obs.key()).unwrap();
        for v in row {
            write!(out, " {v:.16e}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn parse_snapshot(text: &str) -> Result<QTable> {
    let parse_err = |line: usize, detail: String| Error::Parse {
        what: "q-table snapshot".into(),
        detail: format!("line {line}: {detail}"),
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first.trim() == SNAPSHOT_HEADER => {}
        _ => return Err(parse_err(1, format!("expected header `{SNAPSHOT_HEADER}`"))),
    }
    let mut table = QTable::new();
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_ascii_whitespace().collect();
        if fields.len() != 1 + RelativeAction::COUNT {
            return Err(parse_err(i + 1, format!("expected 4 fields, found {}", fields.len())));
        }
        let key: u16 = fields[0]
            .parse()
            .map_err(|e| parse_err(i + 1, format!("bad key `{}`: {e}", fields[0])))?;
        let obs = Observation::from_key(key).ok_or_else(|| parse_err(i + 1, format!("key {key} out of range")))?;
        if table.contains(&obs) {
            return Err(parse_err(i + 1, format!("duplicate key {key}")));
        }
        let mut row: ActionValues = [0.0; RelativeAction::COUNT];
        for (slot, field) in row.iter_mut().zip(&fields[1..]) {
            let v: f64 = field
                .parse()
                .map_err(|e| parse_err(i + 1, format!("bad value `{field}`: {e}")))?;
            if !v.is_finite() {
                return Err(parse_err(i + 1, format!("non-finite value `{field}`")));
            }
            *slot = v;
        }
        table.set_values(&obs, row);
    }
    Ok(table)
}

pub fn save_snapshot(table: &QTable, path: &Path) -> Result<()> {
    std::fs::write(path, write_snapshot(table)).map_err(|e| Error::io(path, e))
}

pub fn load_snapshot(path: &Path) -> Result<QTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_snapshot(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn format_is_stable() {
        let mut t = QTable::new();
        t.set_values(&Observation::from_key(17).unwrap(), [10.0, 0.0, -0.25]);
        let text = write_snapshot(&t);
        let last = text.lines().last().unwrap();
        assert_eq!(last, "17 1.0000000000000000e1 0.0000000000000000e0 -2.5000000000000000e-1");
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_snapshot("nope").is_err());
        assert!(parse_snapshot(&format!("{SNAPSHOT_HEADER}\n1 2 3\n")).is_err());
        assert!(parse_snapshot(&format!("{SNAPSHOT_HEADER}\n99999 1 2 3\n")).is_err());
        assert!(parse_snapshot(&format!("{SNAPSHOT_HEADER}\n1 1 2 NaN\n")).is_err());
        assert!(parse_snapshot(&format!("{SNAPSHOT_HEADER}\n1 1 2 3\n1 1 2 3\n")).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_is_lossless(
            rows in proptest::collection::btree_map(0u16..2048, proptest::array::uniform3(-1e300f64..1e300), 0..64)
        ) {
            let mut t = QTable::new();
            for (k, v) in &rows {
                t.set_values(&Observation::from_key(*k).unwrap(), *v);
            }
            let back = parse_snapshot(&write_snapshot(&t)).unwrap();
            prop_assert_eq!(back, t);
        }
    }
}
