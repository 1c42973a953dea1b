#![no_main]

use hteo::expr::parse_tau;
use hteo::localfield::LocalField;
use hteo::strata::classify;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let field: LocalField = "Qp(3;u=2;pi^4=p;N=8)".parse().unwrap();
    if let Ok(point) = parse_tau(&field, s) {
        // classification may fail on precision, never panic
        let _ = classify(&point);
    }
});
