//! Replays the checked-in fuzz corpus through the same checks the fuzz
//! targets make, so regressions show up without a fuzzing toolchain.

use std::fs;
use std::path::PathBuf;

use spans_core::paths::{LatticePath, PiecewiseLinearPath};
use spans_core::spans::{span_lattice, span_pl_1d, IntervalSet, SpanSet};

fn inputs(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<String> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .filter_map(|entry| String::from_utf8(fs::read(entry.unwrap().path()).unwrap()).ok())
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn interval_set_json() {
    let mut parsed = 0;
    for s in inputs("interval_set_json") {
        if let Ok(set) = IntervalSet::from_json(&s) {
            assert_eq!(IntervalSet::from_json(&set.to_json()).unwrap(), set);
            parsed += 1;
        }
    }
    assert!(parsed > 0);
}

#[test]
fn interval_set_notation() {
    for s in inputs("interval_set_notation") {
        let set: IntervalSet = s.parse().unwrap_or_else(|e| panic!("{s}: {e}"));
        assert_eq!(set.to_string().parse::<IntervalSet>().unwrap(), set);
    }
}

#[test]
fn span_set_json() {
    for s in inputs("span_set_json") {
        if let Ok(spans) = SpanSet::from_json(&s) {
            assert!(spans.contains(0));
            assert_eq!(SpanSet::from_json(&spans.to_json()).unwrap(), spans);
        }
    }
    assert!(SpanSet::from_json(r#"{"lags":[2,4]}"#).is_err());
}

#[test]
fn pl_path() {
    for s in inputs("pl_path") {
        let path: PiecewiseLinearPath = s.parse().unwrap_or_else(|e| panic!("{s}: {e}"));
        let spans = span_pl_1d(&path);
        assert!(spans.contains(0.0) && spans.max().unwrap() <= path.horizon());
    }
}

#[test]
fn walk_json() {
    for s in inputs("walk_json") {
        let walk = LatticePath::from_json(&s).unwrap_or_else(|e| panic!("{s}: {e}"));
        assert!(span_lattice(&walk).contains(0));
    }
}
