//! JSON report output.
//!
//! Floats are written in shortest round-trip form. Infinite values (a norm
//! of a signal outside the scale) are written as the strings `"inf"` and
//! `"-inf"`; NaN is rejected.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::{Error, Result};

fn check<E: serde::ser::Error>(v: f64) -> std::result::Result<(), E> {
    if v.is_nan() {
        return Err(E::custom("NaN in report"));
    }
    Ok(())
}

fn put<S: serde::Serializer>(v: f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    check::<S::Error>(v)?;
    if v.is_infinite() {
        s.serialize_str(if v > 0.0 { "inf" } else { "-inf" })
    } else {
        s.serialize_f64(v)
    }
}

#[derive(serde::Deserialize)]
#[serde(untagged)]
enum RealRepr {
    Num(f64),
    Str(String),
}

fn take<E: serde::de::Error>(r: RealRepr) -> std::result::Result<f64, E> {
    match r {
        RealRepr::Num(v) => Ok(v),
        RealRepr::Str(s) if s == "inf" => Ok(f64::INFINITY),
        RealRepr::Str(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
        RealRepr::Str(s) => Err(E::custom(format!("expected a number, got {s:?}"))),
    }
}

/// `#[serde(with = "real")]` for `f64` fields.
pub mod real {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        super::put(*v, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        super::take(super::RealRepr::deserialize(d)?)
    }
}

/// `#[serde(with = "real_opt")]` for `Option<f64>` fields.
pub mod real_opt {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => super::put(*v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Option::<super::RealRepr>::deserialize(d)?.map(super::take).transpose()
    }
}

/// `#[serde(with = "real_vec")]` for `Vec<f64>` fields.
pub mod real_vec {
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    struct Item(f64);

    impl serde::Serialize for Item {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            super::put(self.0, s)
        }
    }

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for &x in v {
            seq.serialize_element(&Item(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<super::RealRepr>::deserialize(d)?.into_iter().map(super::take).collect()
    }
}

pub fn to_json<T: Serialize>(report: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report).map_err(|e| Error::Serialize(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Serializes `report` and writes it to `path`; nothing is written if
/// serialization fails.
pub fn write_report<T: Serialize>(report: &T, path: &Path) -> Result<()> {
    let text = to_json(report)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct Sample {
        name: String,
        #[serde(with = "real")]
        value: f64,
        #[serde(with = "real_opt")]
        maybe: Option<f64>,
        #[serde(with = "real_vec")]
        series: Vec<f64>,
    }

    fn sample(value: f64) -> Sample {
        Sample { name: "x".into(), value, maybe: Some(f64::INFINITY), series: vec![0.1, 1e-300, -2.5] }
    }

    #[test]
    fn roundtrip_is_value_identical() {
        let s = sample(0.1 + 0.2);
        let text = to_json(&s).unwrap();
        assert!(text.contains("0.30000000000000004"));
        assert!(text.contains("\"inf\""));
        let back: Sample = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn keys_keep_declaration_order() {
        let text = to_json(&sample(1.0)).unwrap();
        let pos: Vec<usize> = ["name", "value", "maybe", "series"].iter().map(|k| text.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn nan_is_rejected_before_write() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        assert!(write_report(&sample(f64::NAN), &path).is_err());
        assert!(!path.exists());
    }

    #[test]
    fn write_is_idempotent_and_names_bad_paths() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        write_report(&sample(2.0), &path).unwrap();
        let first = fs::read(&path).unwrap();
        write_report(&sample(2.0), &path).unwrap();
        assert_eq!(first, fs::read(&path).unwrap());
        let bad = dir.path().join("missing").join("r.json");
        let err = write_report(&sample(2.0), &bad).unwrap_err().to_string();
        assert!(err.contains("missing"));
    }
}
