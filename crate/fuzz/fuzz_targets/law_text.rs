#![no_main]

use drw_core::witt::UniversalWittLaws;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(laws) = UniversalWittLaws::from_text(src) {
        let again = UniversalWittLaws::from_text(&laws.to_text()).expect("serialized laws reparse");
        assert_eq!(laws.to_text(), again.to_text());
    }
});
