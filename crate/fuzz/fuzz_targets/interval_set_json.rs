#![no_main]
use libfuzzer_sys::fuzz_target;
use spans_core::spans::IntervalSet;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(set) = IntervalSet::from_json(s) {
        // Serialized numbers round-trip exactly.
        assert_eq!(IntervalSet::from_json(&set.to_json()).unwrap(), set);
    }
});
