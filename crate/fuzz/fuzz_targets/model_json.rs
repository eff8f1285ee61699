#![no_main]

use libfuzzer_sys::fuzz_target;
use pfml::model::RawModel;
use pfml::Model;

fuzz_target!(|data: &[u8]| {
    let Ok(raw) = RawModel::from_json_slice(data) else { return };
    if let Ok(m) = raw.validate() {
        let text = m.to_json_string();
        let again = Model::from_json_str(&text).expect("serialized model reloads");
        assert_eq!(text, again.to_json_string());
    }
});
