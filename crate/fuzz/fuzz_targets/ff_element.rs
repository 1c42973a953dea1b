#![no_main]

use hteo::resfield::ff_make;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let k = ff_make(3, 2, 0).unwrap();
    if let Ok(x) = k.parse_element(s) {
        assert_eq!(k.parse_element(&x.to_string()).unwrap(), x);
    }
});
