#![no_main]

use drw_core::crystal::CrystalFile;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(file) = CrystalFile::from_json(src) else {
        return;
    };
    if let Ok(d) = file.to_data() {
        let _ = d.validate();
    }
});
