#![no_main]

use fairshare::parse_instance;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    // Anything that parses must survive a round trip unchanged.
    if let Ok(inst) = parse_instance(data) {
        let text = inst.to_json().to_string();
        let again = parse_instance(&text).expect("serialized instance reparses");
        assert_eq!(inst, again);
    }
});
