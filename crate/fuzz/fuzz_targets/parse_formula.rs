#![no_main]

use libfuzzer_sys::fuzz_target;
use pfml::logic::parse_formula;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(phi) = parse_formula(text) {
        let printed = phi.to_string();
        let again = parse_formula(&printed).expect("printed formula reparses");
        assert_eq!(phi, again, "{printed}");
    }
});
