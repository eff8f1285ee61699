#![no_main]

use libfuzzer_sys::fuzz_target;
use pfml::logic::parse_concept;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = parse_concept(text) {
        let printed = c.to_string();
        let again = parse_concept(&printed).expect("printed concept reparses");
        assert_eq!(c, again, "{printed}");
    }
});
