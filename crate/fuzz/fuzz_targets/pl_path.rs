#![no_main]
use libfuzzer_sys::fuzz_target;
use spans_core::paths::PiecewiseLinearPath;
use spans_core::spans::span_pl_1d;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(path) = s.parse::<PiecewiseLinearPath>() {
        if path.n_pieces() <= 256 {
            let spans = span_pl_1d(&path);
            assert!(spans.contains(0.0));
            assert!(spans.max().unwrap() <= path.horizon());
        }
    }
});
