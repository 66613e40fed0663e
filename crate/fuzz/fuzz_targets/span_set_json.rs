#![no_main]
use libfuzzer_sys::fuzz_target;
use spans_core::spans::SpanSet;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(spans) = SpanSet::from_json(s) {
        assert!(spans.contains(0));
        assert_eq!(SpanSet::from_json(&spans.to_json()).unwrap(), spans);
    }
});
