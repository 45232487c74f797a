//! Runs the fuzz targets' round-trip checks over the checked-in seeds.

use std::fs;
use std::path::Path;

use fairshare::parse_instance;
use fairshare::rational::{fmt_rational, parse_rational};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn instance_seeds_round_trip() {
    let mut parsed = 0;
    for (name, text) in seeds("parse_instance") {
        if let Ok(inst) = parse_instance(&text) {
            parsed += 1;
            let again = parse_instance(&inst.to_json().to_string()).unwrap();
            assert_eq!(inst, again, "{name}");
        }
    }
    assert_eq!(parsed, 3);
}

#[test]
fn rational_seeds_round_trip() {
    let mut parsed = 0;
    for (name, text) in seeds("parse_rational") {
        if let Ok(r) = parse_rational(&text) {
            parsed += 1;
            assert_eq!(parse_rational(&fmt_rational(&r)).unwrap(), r, "{name}");
        }
    }
    assert_eq!(parsed, 7);
}
