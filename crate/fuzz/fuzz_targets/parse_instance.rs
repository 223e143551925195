#![no_main]

use gmms_core::{parse_instance, serialize_instance};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(inst) = parse_instance(data) {
        let text = serialize_instance(&inst);
        let back = parse_instance(&text).expect("canonical form parses");
        assert_eq!(back, inst);
        assert_eq!(serialize_instance(&back), text);
    }
});
