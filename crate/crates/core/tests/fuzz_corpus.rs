//! Replays the checked-in fuzz corpus through the same properties the fuzz
//! targets assert, so the seeds stay meaningful without a nightly toolchain.

use std::path::PathBuf;

use drw_core::crystal::CrystalFile;
use drw_core::derham::{parse_form, parse_polynomial};
use drw_core::exactalg::{Ring, Variable};
use drw_core::witt::{eval_witt_expr, UniversalWittLaws};

fn corpus(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let path = e.unwrap().path();
            (path.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "empty corpus for {target}");
    out
}

#[test]
fn parse_form_seeds() {
    let ring = Ring::integers(vec![Variable::polynomial("x"), Variable::laurent("y")]);
    let mut parsed = 0;
    for (name, src) in corpus("parse_form") {
        if let Ok(w) = parse_form(&ring, &src) {
            assert_eq!(parse_form(&ring, &w.to_string()).unwrap(), w, "{name}");
            parsed += 1;
        }
        let _ = parse_polynomial(&ring, &src);
    }
    assert!(parsed >= 4);
}

#[test]
fn crystal_json_seeds() {
    let mut valid = 0;
    for (_, src) in corpus("crystal_json") {
        if let Ok(d) = CrystalFile::from_json(&src).and_then(|f| f.to_data()) {
            valid += d.validate().is_ok() as usize;
        }
    }
    assert!(valid >= 3);
}

#[test]
fn witt_expr_seeds() {
    let mut ok = 0;
    for (_, src) in corpus("witt_expr") {
        ok += eval_witt_expr(&src, 2, 2).is_ok() as usize;
        let _ = eval_witt_expr(&src, 3, 2);
    }
    assert!(ok >= 3);
}

#[test]
fn law_text_seeds() {
    for (name, src) in corpus("law_text") {
        let laws = UniversalWittLaws::from_text(&src).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(UniversalWittLaws::from_text(&laws.to_text()).unwrap().to_text(), laws.to_text());
        assert_eq!(laws.to_text(), UniversalWittLaws::generate(laws.p(), laws.r()).to_text(), "{name} is stale");
    }
}
