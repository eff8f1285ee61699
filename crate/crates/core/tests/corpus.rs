//! Replays the fuzz corpus seeds through the same round-trip checks the
//! fuzz targets make, so the seeds stay meaningful on stable toolchains.

use std::path::PathBuf;

use pfml::logic::{parse_concept, parse_formula};
use pfml::model::RawModel;
use pfml::rational::{format_rational, parse_rational};
use pfml::Model;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.display().to_string(), std::fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn concept_seeds_round_trip() {
    for (name, bytes) in seeds("parse_concept") {
        let c = parse_concept(std::str::from_utf8(&bytes).unwrap()).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(parse_concept(&c.to_string()).unwrap(), c, "{name}");
    }
}

#[test]
fn formula_seeds_round_trip() {
    for (name, bytes) in seeds("parse_formula") {
        let phi = parse_formula(std::str::from_utf8(&bytes).unwrap()).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(parse_formula(&phi.to_string()).unwrap(), phi, "{name}");
    }
}

#[test]
fn rational_seeds_round_trip() {
    let mut accepted = 0;
    for (_, bytes) in seeds("parse_rational") {
        if let Ok(q) = parse_rational(std::str::from_utf8(&bytes).unwrap()) {
            assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q);
            accepted += 1;
        }
    }
    assert!(accepted > 0);
}

#[test]
fn model_seeds_round_trip() {
    let mut valid = 0;
    for (name, bytes) in seeds("model_json") {
        let raw = RawModel::from_json_slice(&bytes).unwrap_or_else(|e| panic!("{name}: {e}"));
        if let Ok(m) = raw.validate() {
            let text = m.to_json_string();
            assert_eq!(Model::from_json_str(&text).unwrap().to_json_string(), text, "{name}");
            valid += 1;
        }
    }
    assert!(valid > 0);
}
