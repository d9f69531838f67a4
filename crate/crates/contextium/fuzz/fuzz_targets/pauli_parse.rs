#![no_main]

use contextium::PauliString;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(p) = text.parse::<PauliString>() {
        // accepted strings must round-trip exactly
        let rendered = p.to_string();
        assert_eq!(rendered.parse::<PauliString>().unwrap(), p);
        assert_eq!(rendered.len(), p.n());
    }
});
