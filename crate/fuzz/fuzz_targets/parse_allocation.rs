#![no_main]

use gmms_core::{parse_allocation, serialize_allocation};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(a) = parse_allocation(data) {
        let back = parse_allocation(&serialize_allocation(&a)).expect("canonical form parses");
        assert_eq!(back, a);
    }
});
