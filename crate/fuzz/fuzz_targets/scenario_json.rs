#![no_main]

use libfuzzer_sys::fuzz_target;
use rforce::Scenario;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = Scenario::from_json(text) {
        let again = Scenario::from_json(&s.to_json()).expect("re-parse of emitted scenario");
        assert_eq!(again, s);
    }
});
