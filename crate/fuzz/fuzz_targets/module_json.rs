#![no_main]

use hteo::dieudonne::DieudonneModP;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(d) = DieudonneModP::from_json(s) {
        let text = serde_json::to_string(&d.to_json()).unwrap();
        let again = DieudonneModP::from_json(&text).expect("serialized module reparses");
        assert_eq!(again.to_json(), d.to_json());
    }
});
