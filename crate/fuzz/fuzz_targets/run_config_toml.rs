#![no_main]

use libfuzzer_sys::fuzz_target;
use rforce::harness::RunConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = RunConfig::from_toml(text) {
        let _ = cfg.validate();
        let text = cfg.to_toml().expect("parsed configs hold only TOML-sized integers");
        let again = RunConfig::from_toml(&text).expect("re-parse of emitted config");
        assert_eq!(again.to_toml().unwrap(), text);
    }
});
