#![no_main]
use libfuzzer_sys::fuzz_target;
use spans_core::spans::IntervalSet;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(set) = s.parse::<IntervalSet>() {
        let _ = set.measure();
        let _ = set.to_string().parse::<IntervalSet>();
    }
});
