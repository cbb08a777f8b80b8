#![no_main]

use drw_core::derham::{parse_form, parse_polynomial};
use drw_core::exactalg::{Ring, Variable};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    let ring = Ring::integers(vec![Variable::polynomial("x"), Variable::laurent("y")]);
    if let Ok(w) = parse_form(&ring, src) {
        // printing then reparsing must give the same form
        let again = parse_form(&ring, &w.to_string()).expect("printed form reparses");
        assert_eq!(w, again);
    }
    let _ = parse_polynomial(&ring, src);
});
