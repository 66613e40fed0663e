#![no_main]
use libfuzzer_sys::fuzz_target;
use spans_core::paths::LatticePath;
use spans_core::spans::span_lattice;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(walk) = LatticePath::from_json(s) {
        if walk.len() <= 4096 {
            assert!(span_lattice(&walk).contains(0));
        }
    }
});
