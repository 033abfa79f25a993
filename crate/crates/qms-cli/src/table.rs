//! JSON coefficient tables: a single file format for half-integral weight,
//! Siegel and quaternionic coefficient tables.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use qms::arith::Q;
use qms::coset::{GramTriple, IndexPair, Mat2Z};
use qms::lifts::{HalfIntegralTable, QuatTable, SiegelTable};
use qms::quadspace::GaussRational;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Which kind of coefficient table a file holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Halfintegral,
    Siegel,
    Quaternionic,
}

/// An entry key: an integer `n`, a triple `[a, b, c]` or a pair of 2x2
/// integer matrices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Key {
    Int(i64),
    Triple([i64; 3]),
    Pair([Mat2Z; 2]),
}

/// One coefficient with its real and imaginary parts as rational strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub key: Key,
    pub re: String,
    pub im: String,
}

/// The on-disk table format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableFile {
    pub kind: Kind,
    pub weight: i64,
    /// Only meaningful for Siegel tables; absent means cuspidal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cuspidal: Option<bool>,
    pub entries: Vec<Entry>,
}

/// A parsed table of any kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Table {
    HalfIntegral(HalfIntegralTable),
    Siegel(SiegelTable),
    Quaternionic(QuatTable),
}

fn entry(key: Key, v: &GaussRational) -> Entry {
    Entry { key, re: v.re.to_string(), im: v.im.to_string() }
}

fn rational(s: &str) -> Result<Q, CliError> {
    Q::from_str(s.trim()).map_err(|_| CliError::Data(format!("{s:?} is not a rational number p/q")))
}

fn value(e: &Entry) -> Result<GaussRational, CliError> {
    Ok(GaussRational::new(rational(&e.re)?, rational(&e.im)?))
}

fn wrong_key(kind: Kind, key: &Key) -> CliError {
    CliError::Data(format!("key {key:?} does not match table kind {kind:?}"))
}

fn duplicate(key: &Key) -> CliError {
    CliError::Data(format!("duplicate key {key:?}"))
}

impl TableFile {
    /// Converts to a typed table, validating keys and support rules.
    pub fn to_table(&self) -> Result<Table, CliError> {
        let data = |e: qms::Error| CliError::Data(e.to_string());
        match self.kind {
            Kind::Halfintegral => {
                let mut t = HalfIntegralTable::new(self.weight);
                for e in &self.entries {
                    let Key::Int(n) = e.key else { return Err(wrong_key(self.kind, &e.key)) };
                    if t.entries.contains_key(&n) {
                        return Err(duplicate(&e.key));
                    }
                    t.insert(n, value(e)?).map_err(data)?;
                }
                Ok(Table::HalfIntegral(t))
            }
            Kind::Siegel => {
                let mut t = SiegelTable::new(self.weight, self.cuspidal.unwrap_or(true));
                for e in &self.entries {
                    let Key::Triple([a, b, c]) = e.key else { return Err(wrong_key(self.kind, &e.key)) };
                    let k = GramTriple::new(a, b, c);
                    if t.entries.contains_key(&k.reduce().map_err(data)?) {
                        return Err(duplicate(&e.key));
                    }
                    t.insert(&k, value(e)?).map_err(data)?;
                }
                Ok(Table::Siegel(t))
            }
            Kind::Quaternionic => {
                let mut t = QuatTable::new(self.weight);
                for e in &self.entries {
                    let Key::Pair([t1, t2]) = e.key else { return Err(wrong_key(self.kind, &e.key)) };
                    let k = IndexPair::new(t1, t2);
                    if t.entries.contains_key(&k) {
                        return Err(duplicate(&e.key));
                    }
                    t.insert(k, value(e)?).map_err(data)?;
                }
                Ok(Table::Quaternionic(t))
            }
        }
    }

    /// Serializes a typed table; entries come out in key order.
    pub fn from_table(t: &Table) -> TableFile {
        match t {
            Table::HalfIntegral(t) => TableFile {
                kind: Kind::Halfintegral,
                weight: t.weight,
                cuspidal: None,
                entries: t.entries.iter().map(|(n, v)| entry(Key::Int(*n), v)).collect(),
            },
            Table::Siegel(t) => TableFile {
                kind: Kind::Siegel,
                weight: t.weight,
                cuspidal: (!t.cuspidal).then_some(false),
                entries: t.entries.iter().map(|(k, v)| entry(Key::Triple([k.a, k.b, k.c]), v)).collect(),
            },
            Table::Quaternionic(t) => TableFile {
                kind: Kind::Quaternionic,
                weight: t.weight,
                cuspidal: None,
                entries: t.entries.iter().map(|(k, v)| entry(Key::Pair([k.t1, k.t2]), v)).collect(),
            },
        }
    }

    pub fn from_json(text: &str) -> Result<TableFile, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Data(format!("malformed table: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tables serialize")
    }
}

/// Reads and validates a table file.
pub fn read_table(path: &Path) -> Result<Table, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    TableFile::from_json(&text)
        .and_then(|f| f.to_table())
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Writes a table file.
pub fn write_table(path: &Path, t: &Table) -> Result<(), CliError> {
    fs::write(path, TableFile::from_table(t).to_json() + "\n")
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use qms::verify;

    #[test]
    fn keys_parse_in_all_three_shapes() {
        let k: Key = serde_json::from_str("7").unwrap();
        assert_eq!(k, Key::Int(7));
        let k: Key = serde_json::from_str("[1, 0, 2]").unwrap();
        assert_eq!(k, Key::Triple([1, 0, 2]));
        let k: Key = serde_json::from_str("[[[1, 0], [0, 1]], [[0, -1], [2, 0]]]").unwrap();
        assert_eq!(k, Key::Pair([[[1, 0], [0, 1]], [[0, -1], [2, 0]]]));
    }

    #[test]
    fn rationals_parse_exactly() {
        let f = TableFile::from_json(r#"{"kind":"halfintegral","weight":9,"entries":[{"key":3,"re":"-2/6","im":"5"}]}"#)
            .unwrap();
        let Table::HalfIntegral(t) = f.to_table().unwrap() else { panic!() };
        assert_eq!(t.entries[&3], GaussRational::new(qms::arith::qf(-1, 3), qms::arith::q(5)));
    }

    #[test]
    fn floats_are_rejected() {
        let f = TableFile::from_json(r#"{"kind":"halfintegral","weight":9,"entries":[{"key":3,"re":"0.5","im":"0"}]}"#)
            .unwrap();
        assert!(matches!(f.to_table(), Err(CliError::Data(_))));
        assert!(TableFile::from_json(r#"{"kind":"halfintegral","weight":9,"entries":[{"key":3,"re":0.5,"im":"0"}]}"#)
            .is_err());
    }

    #[test]
    fn support_and_kind_rules_are_enforced() {
        let bad_support = r#"{"kind":"halfintegral","weight":9,"entries":[{"key":1,"re":"1","im":"0"}]}"#;
        assert!(TableFile::from_json(bad_support).unwrap().to_table().is_err());
        let bad_kind = r#"{"kind":"siegel","weight":10,"entries":[{"key":4,"re":"1","im":"0"}]}"#;
        assert!(TableFile::from_json(bad_kind).unwrap().to_table().is_err());
        let not_pos = r#"{"kind":"quaternionic","weight":4,"entries":[{"key":[[[1,0],[0,0]],[[0,0],[0,0]]],"re":"1","im":"0"}]}"#;
        assert!(TableFile::from_json(not_pos).unwrap().to_table().is_err());
    }

    #[test]
    fn siegel_keys_are_reduced_and_duplicates_rejected() {
        let f = TableFile::from_json(
            r#"{"kind":"siegel","weight":10,"entries":[{"key":[2,2,1],"re":"1","im":"0"}]}"#,
        )
        .unwrap();
        let Table::Siegel(t) = f.to_table().unwrap() else { panic!() };
        assert_eq!(t.entries.keys().next(), Some(&GramTriple::new(1, 0, 1)));
        let dup = r#"{"kind":"siegel","weight":10,"entries":[{"key":[1,0,1],"re":"1","im":"0"},{"key":[2,2,1],"re":"1","im":"0"}]}"#;
        assert!(TableFile::from_json(dup).unwrap().to_table().is_err());
    }

    #[test]
    fn round_trip_for_every_kind() {
        let tables = [
            Table::HalfIntegral(verify::synth_halfintegral(1, 9, 40)),
            Table::Siegel(verify::synth_siegel(2, 10, 40)),
            Table::Quaternionic(verify::synth_quaternionic(3, 6, 12).unwrap()),
        ];
        for t in tables {
            let json = TableFile::from_table(&t).to_json();
            assert_eq!(TableFile::from_json(&json).unwrap().to_table().unwrap(), t);
        }
    }
}
