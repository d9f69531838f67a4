#![no_main]

use contextium::sim::FlipGrid;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(grid) = text.parse::<FlipGrid>() {
        let values = grid.values();
        assert!(!values.is_empty());
        for v in values {
            assert!(v.is_finite() && (0.0..=0.5).contains(&v));
        }
    }
});
