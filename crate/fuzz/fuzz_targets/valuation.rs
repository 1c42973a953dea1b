#![no_main]

use hteo::rational::parse_q;
use hteo::Val;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(v) = s.parse::<Val>() {
        assert_eq!(v.to_string().parse::<Val>().unwrap(), v);
    }
    let _ = parse_q(s);
});
