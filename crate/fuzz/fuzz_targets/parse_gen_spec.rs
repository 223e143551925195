#![no_main]

use gmms_core::generator::{generate, parse_gen_spec, serialize_gen_spec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(spec) = parse_gen_spec(data) {
        let back = parse_gen_spec(&serialize_gen_spec(&spec)).expect("canonical form parses");
        assert_eq!(back, spec);
        if spec.num_agents * spec.num_goods <= 64 {
            let inst = generate(&spec).expect("valid spec generates");
            assert_eq!(inst, generate(&spec).unwrap());
        }
    }
});
