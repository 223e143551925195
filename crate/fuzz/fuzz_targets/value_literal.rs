#![no_main]

use gmms_core::Value;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(v) = Value::parse_literal(text) {
        let back: Value = v.to_ratio_string().parse().expect("ratio form parses");
        assert_eq!(back, v);
        let _ = v.to_decimal(6);
    }
});
