#![no_main]

use drw_core::witt::eval_witt_expr;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // long inputs only spend time in big-integer arithmetic
    if data.len() > 256 {
        return;
    }
    if let Ok(src) = std::str::from_utf8(data) {
        let _ = eval_witt_expr(src, 2, 2);
        let _ = eval_witt_expr(src, 3, 2);
    }
});
