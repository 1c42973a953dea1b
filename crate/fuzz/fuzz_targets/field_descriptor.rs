#![no_main]

use hteo::localfield::{parse_descriptor, LocalField};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(f) = s.parse::<LocalField>() {
        let text = f.to_string();
        let again: LocalField = text.parse().expect("display output reparses");
        assert_eq!(again.to_string(), text);
    }
    let _ = parse_descriptor(s, 3, None);
});
