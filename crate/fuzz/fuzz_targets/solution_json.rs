#![no_main]

use libfuzzer_sys::fuzz_target;
use rforce::ClusterSolution;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(sol) = ClusterSolution::from_json(text) {
        let again = ClusterSolution::from_json(&sol.to_json()).expect("re-parse of emitted solution");
        assert_eq!(again, sol);
        // Queries must not panic on any accepted document.
        let _ = sol.outage();
        let _ = sol.served_count();
        let _ = sol.member_counts();
    }
});
