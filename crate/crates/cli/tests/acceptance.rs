//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints its own PASS/FAIL line; exits nonzero if any fails.

use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::Instant;

use drw_core::crystal::{builtin, localize, times_affine_line, UnitRootCrystalData, Window};
use drw_core::dieudonne::{tower_axioms_check, Tower, TrueWeight};
use drw_core::drw::{self, suites, DrwParams, DrwTower, Fault};
use drw_core::Error;

type Outcome = Result<String, String>;

fn err(e: Error) -> String {
    e.to_string()
}

fn tower(data: &UnitRootCrystalData, r: u32, lo: i64, hi: i64) -> Result<DrwTower, String> {
    let c = data.clone().validate().map_err(err)?;
    DrwTower::build(&c, DrwParams::new(r, Window::new(lo, hi).map_err(err)?)).map_err(err)
}

fn pp(p: u32) -> i64 {
    (p as i64).pow(2)
}

fn v_p(mut n: i64, p: u32) -> Option<u32> {
    if n == 0 {
        return None;
    }
    let mut v = 0;
    while n % p as i64 == 0 {
        n /= p as i64;
        v += 1;
    }
    Some(v)
}

/// Nontrivial divisors of `Z/p^e`.
fn cyclic(p: u32, e: u32) -> Vec<String> {
    if e == 0 {
        vec![]
    } else {
        vec![(p as u64).pow(e).to_string()]
    }
}

fn block(t: &Tower, r: u32, i: usize, u: &TrueWeight) -> Vec<String> {
    t.slot(r, i, u).divisors().iter().filter(|d| d.to_string() != "1").map(|d| d.to_string()).collect()
}

fn crit1() -> Outcome {
    let mut n = 0;
    for p in [2, 3] {
        for r in 1..=4 {
            n += suites::witt_suite(p, r, 200, 11 + r as u64, None).map_err(err)?.checked;
        }
    }
    Ok(format!("{n} triples"))
}

fn crit2() -> Outcome {
    let mut n = 0;
    for p in [2, 3] {
        for r in 2..=3 {
            n += suites::pd_suite(p, r, 100, 50, 7 * r as u64).map_err(err)?.checked;
        }
    }
    Ok(format!("{n} elements and lifts"))
}

fn crit3() -> Outcome {
    let mut n = 0;
    for p in [2, 3] {
        n += suites::dieudonne_suite(p, 200, 5).map_err(err)?.checked;
        for name in ["a1-trivial", "gm-trivial", "gm-kummer:c=1", "gm-kummer:c=-1", "gm-kummer:c=2", "gm-kummer:c=-2", "a1-rank2-sum", "gm-kummer-sum"] {
            let c = builtin(name, p).and_then(|d| d.validate()).map_err(err)?;
            let lo = if c.ring().vars()[0].laurent { -pp(p) } else { 0 };
            n += suites::crystal_identities(&c, Window::new(lo, pp(p)).map_err(err)?).map_err(|e| format!("{name}: {e}"))?.checked;
        }
    }
    Ok(format!("{n} identities"))
}

fn crit4() -> Outcome {
    let mut n = 0;
    for p in [2, 3] {
        for r in 1..=3 {
            let t = tower(&builtin("fp", p).map_err(err)?, r, 0, 0)?;
            for s in 1..=r {
                let got = block(t.tower(), s, 0, &TrueWeight::integral(&[]));
                if got != cyclic(p, s) {
                    return Err(format!("point, p={p}, r={s}: got {got:?}"));
                }
            }
            let t = tower(&builtin("a1-trivial", p).map_err(err)?, r, 0, pp(p))?;
            for s in 1..=r {
                n += drw::witt_ground_truth(&t, s).map_err(|e| format!("A^1, p={p}, r={s}: {e}"))?.checked;
            }
        }
    }
    Ok(format!("point and {n} blocks of W_r(F_p[x])"))
}

fn crit5() -> Outcome {
    let mut n = 0;
    for p in [2, 3] {
        for (name, lo) in [("a1-trivial", 0), ("gm-trivial", -pp(p))] {
            let t = tower(&builtin(name, p).map_err(err)?, 1, lo, pp(p))?;
            for u in t.tower().weights() {
                for i in 0..=1 {
                    let want = match (u.is_integral(), i) {
                        (false, _) => vec![],
                        (true, 0) => cyclic(p, 1),
                        // x^{n-1} dx on the line, x^n dlog x on G_m
                        (true, _) => cyclic(p, (lo < 0 || u.total(p).0 >= 1) as u32),
                    };
                    let got = block(t.tower(), 1, i, u);
                    if got != want {
                        return Err(format!("{name}, p={p}, degree {i}, weight {}: got {got:?}, want {want:?}", u.format(p)));
                    }
                    n += 1;
                }
            }
        }
    }
    Ok(format!("{n} blocks"))
}

/// The criterion-6 towers as (name, p, r_max, tower), p in {2, 3}, r <= 2.
fn quasi_iso_towers() -> Result<Vec<(String, u32, u32, DrwTower)>, String> {
    let mut out = Vec::new();
    for p in [2, 3] {
        for r in 1..=2 {
            for name in ["a1-trivial", "gm-trivial", "gm-kummer:c=1", "gm-kummer:c=-1"] {
                let lo = if name.starts_with("a1") { 0 } else { -pp(p) };
                out.push((name.to_string(), p, r, tower(&builtin(name, p).map_err(err)?, r, lo, pp(p))?));
            }
        }
    }
    Ok(out)
}

fn crit6(towers: &[(String, u32, u32, DrwTower)]) -> Outcome {
    let mut n = 0;
    for (name, p, r_max, t) in towers {
        let p = *p;
        let c: i64 = name.strip_prefix("gm-kummer:c=").map_or(0, |c| c.parse().unwrap());
        for r in 1..=*r_max {
            drw::rho_check(t, r).map_err(|e| format!("{name}, p={p}, r={r}: {e}"))?;
            for e in drw::cohomology_table(t, r).map_err(err)? {
                if e.degree != 1 {
                    continue;
                }
                let want = if !e.weight.is_integral() {
                    vec![]
                } else {
                    // the block of weight m holds x^n e with n = m - c
                    let n = e.weight.total(p).0 - c;
                    if name.starts_with("a1") && n == 0 {
                        vec![]
                    } else {
                        cyclic(p, v_p(n + c, p).map_or(r, |v| v.min(r)))
                    }
                };
                if e.divisors != want {
                    return Err(format!("{name}, p={p}, r={r}, weight {}: H^1 = {:?}, want {want:?}", e.weight.format(p), e.divisors));
                }
                n += 1;
            }
        }
    }
    Ok(format!("{n} H^1 blocks"))
}

fn crit7(towers: &[(String, u32, u32, DrwTower)]) -> Outcome {
    let mut n = 0;
    let mut all: Vec<(String, DrwTower)> = Vec::new();
    for p in [2, 3] {
        for r in 1..=3 {
            all.push((format!("A^1 p={p} r={r}"), tower(&builtin("a1-trivial", p).map_err(err)?, r, 0, pp(p))?));
        }
        all.push((format!("point p={p}"), tower(&builtin("fp", p).map_err(err)?, 3, 0, 0)?));
    }
    let named = towers.iter().map(|(name, p, r, t)| (format!("{name} p={p} r={r}"), t));
    for (name, t) in all.iter().map(|(n, t)| (n.clone(), t)).chain(named) {
        for tw in [t.tower(), t.trivial_tower()] {
            n += tower_axioms_check(tw).map_err(|e| format!("{name}: {e}"))?.total_checked();
        }
    }
    Ok(format!("{n} block checks"))
}

fn crit8(towers: &[(String, u32, u32, DrwTower)]) -> Outcome {
    let mut n = 0;
    for (name, p, r_max, t) in towers {
        for r in 1..=*r_max {
            n += drw::alpha_f_check(t, r).map_err(|e| format!("{name}, p={p}, r={r}: {e}"))?.checked;
        }
    }
    Ok(format!("{n} comparisons"))
}

fn crit9() -> Outcome {
    let mut n = 0;
    for p in [2, 3] {
        for r in 1..=2 {
            let a1 = builtin("a1-trivial", p).map_err(err)?;
            let base = tower(&a1, r, -pp(p), pp(p))?;
            let loc = tower(&localize(&a1, 0).map_err(err)?, r, -pp(p), pp(p))?;
            n += drw::localization_check(&base, &loc, 0, r).map_err(|e| format!("trivial, p={p}, r={r}: {e}"))?.checked;
            for c in [1, -1] {
                let k = times_affine_line(&UnitRootCrystalData::kummer(p, c), "s").map_err(err)?;
                let base = tower(&k, r, -3, 3)?;
                let loc = tower(&localize(&k, 1).map_err(err)?, r, -3, 3)?;
                n += drw::localization_check(&base, &loc, 1, r).map_err(|e| format!("Kummer({c}), p={p}, r={r}: {e}"))?.checked;
            }
        }
    }
    Ok(format!("{n} blocks"))
}

fn drw_bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drw")).args(args).output().expect("run drw")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn crit10() -> Outcome {
    // Θ = dx, Φ = 1 is integrable but not horizontal.
    let path = data("non_horizontal.json");
    let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    let file = drw_core::crystal::CrystalFile::from_json(&text).map_err(err)?;
    match file.to_data().and_then(|d| d.validate()) {
        Err(Error::NotHorizontal { .. }) => {}
        other => return Err(format!("non-horizontal crystal: {:?}", other.map(|_| ()))),
    }
    let out = drw_bin(&["compute", "--p", "3", "--crystal", &path]);
    if out.status.code() != Some(3) || !String::from_utf8_lossy(&out.stderr).contains("NotHorizontal") {
        return Err(format!("drw on the non-horizontal crystal exited {:?}", out.status.code()));
    }

    for f in Fault::ALL {
        let check = f.target_check();
        let args = ["verify", "--p", "2", "--r", "2", "--crystal", "gm-kummer:c=1", "--checks", check];
        let clean = drw_bin(&args);
        if clean.status.code() != Some(0) {
            return Err(format!("{check} fails without a fault: {}", String::from_utf8_lossy(&clean.stderr)));
        }
        let bad = drw_bin(&[&args[..], &["--corrupt", f.name()]].concat());
        let stderr = String::from_utf8_lossy(&bad.stderr);
        if bad.status.code() != Some(1) || !stderr.contains(&format!("FAIL {check}")) {
            return Err(format!("--corrupt {f}: exit {:?}, stderr {stderr}", bad.status.code()));
        }
    }

    let mut params = DrwParams::new(2, Window::new(0, 4).map_err(err)?);
    params.k_max = 0;
    let c = builtin("a1-trivial", 2).and_then(|d| d.validate()).map_err(err)?;
    if !matches!(DrwTower::build(&c, params), Err(Error::NotStabilized { .. })) {
        return Err("K_max = 0 stabilized".into());
    }
    let out = drw_bin(&["compute", "--p", "2", "--r", "2", "--kmax", "0"]);
    if out.status.code() != Some(2) {
        return Err(format!("drw with K_max = 0 exited {:?}", out.status.code()));
    }
    Ok("non-horizontal rejected, 3 faults caught, K_max = 0 unstable".into())
}

fn main() {
    let start = Instant::now();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut run = |n: u32, what: &'static str, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let res = f();
        let line = match &res {
            Ok(s) => format!("criterion {n:>2} PASS {what}: {s} ({:.1?})", t.elapsed()),
            Err(s) => format!("criterion {n:>2} FAIL {what}: {s}"),
        };
        println!("{line}");
        results.push((n, what, res));
    };
    run(1, "Witt vector identities", &crit1);
    run(2, "divided powers", &crit2);
    run(3, "Dieudonne identities", &crit3);
    run(4, "saturation ground truth", &crit4);
    run(5, "classical collapse at r = 1", &crit5);
    match quasi_iso_towers() {
        Ok(towers) => {
            run(6, "rho_r quasi-isomorphism", &|| crit6(&towers));
            run(7, "tower axioms", &|| crit7(&towers));
            run(8, "alpha_F comparison", &|| crit8(&towers));
        }
        Err(e) => {
            for (n, what) in [(6, "rho_r quasi-isomorphism"), (7, "tower axioms"), (8, "alpha_F comparison")] {
                run(n, what, &|| Err(format!("building towers: {e}")));
            }
        }
    }
    run(9, "localization", &crit9);
    run(10, "negative controls", &crit10);
    let failed: Vec<u32> = results.iter().filter(|r| r.2.is_err()).map(|r| r.0).collect();
    println!("acceptance: {} of {} criteria passed in {:.1?}", results.len() - failed.len(), results.len(), start.elapsed());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
