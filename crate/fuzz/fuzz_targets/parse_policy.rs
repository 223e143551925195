#![no_main]

use gmms_core::doc::{parse_policy, serialize_policy};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(p) = parse_policy(data) {
        let back = parse_policy(&serialize_policy(&p)).expect("canonical form parses");
        assert_eq!(back, p);
    }
});
