#![no_main]

use hteo::resfield::ff_make;
use hteo::tilt::PuiseuxSeries;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let k = ff_make(3, 2, 0).unwrap();
    if let Ok(x) = PuiseuxSeries::parse(&k, s) {
        let again = PuiseuxSeries::parse(&k, &x.to_string()).expect("display output reparses");
        assert!(again.agrees_with(&x));
        let text = again.to_string();
        assert_eq!(PuiseuxSeries::parse(&k, &text).unwrap().to_string(), text);
    }
});
