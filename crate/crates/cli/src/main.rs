//! `drw`: build saturated de Rham-Witt towers with coefficients, run the
//! verification suites, and evaluate Witt-vector expressions.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0    | success, every selected check passed |
//! | 1    | a check failed |
//! | 2    | a block did not stabilize within `--kmax` |
//! | 3    | invalid input: parse or validation failure |
//! | 4    | weight-window overflow or incoherent window |
//! | 5    | I/O failure |
//! | 64   | usage error |
//! | 70   | internal error |

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use drw_core::crystal::{builtin, localize, times_affine_line, CrystalFile, UnitRootCrystalData, Window};
use drw_core::dieudonne::tower_axioms_check;
use drw_core::drw::{self, suites, CheckReport, CheckStats, DrwParams, DrwTower, Fault};
use drw_core::witt::eval_witt_expr;
use drw_core::Error;

#[derive(Parser)]
#[command(name = "drw", version, about = "Saturated de Rham-Witt complexes with unit-root coefficients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the tower and write its JSON (or CSV) export.
    Compute {
        #[command(flatten)]
        job: JobArgs,
        /// Include the cohomology of every level.
        #[arg(long)]
        cohomology: bool,
        /// Write the flat rank table instead of JSON.
        #[arg(long)]
        csv: bool,
    },
    /// Build the tower and run checks; exit 1 if any fails.
    Verify {
        #[command(flatten)]
        job: JobArgs,
        /// Comma-separated checks, or `all`.
        #[arg(long, default_value = "all")]
        checks: String,
        /// Inject a fault (test only): flip-frobenius, drop-lambda, bad-witt-carry.
        #[arg(long)]
        corrupt: Option<String>,
    },
    /// Evaluate a Witt-vector expression over F_p[vars].
    Witt {
        expr: String,
        #[arg(long, default_value_t = 2)]
        p: u32,
        #[arg(long, default_value_t = 2)]
        r: usize,
    },
}

#[derive(Args)]
struct JobArgs {
    #[arg(long, default_value_t = 2)]
    p: u32,
    /// Highest level r_max.
    #[arg(long, default_value_t = 1)]
    r: u32,
    /// Lower window bound (per variable); defaults to 0, or -p² with invertible variables.
    #[arg(long, allow_hyphen_values = true)]
    wmin: Option<i64>,
    /// Upper window bound (per variable); defaults to p².
    #[arg(long, allow_hyphen_values = true)]
    wmax: Option<i64>,
    /// Stage cap K_max; defaults to r + 4.
    #[arg(long)]
    kmax: Option<usize>,
    /// Consecutive isomorphisms required for stability.
    #[arg(long, default_value_t = 2)]
    confirm: usize,
    /// Crystal JSON file or builtin name.
    #[arg(long, default_value = "a1-trivial")]
    crystal: String,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Treat operator images leaving the window as errors.
    #[arg(long)]
    strict_window: bool,
}

fn exit_code(e: &Error) -> u8 {
    use Error::*;
    match e {
        AxiomViolation { .. } | QuasiIsoFailure { .. } | Mismatch { .. } | BaseChangeMismatch { .. } | RelationViolated { .. } => 1,
        NotStabilized { .. } => 2,
        NotAFrobeniusLift { .. }
        | TorsionCoefficients { .. }
        | MismatchedRing(_)
        | MismatchedParameters(_)
        | NonGradedLift(_)
        | NotIntegrable { .. }
        | NotHorizontal { .. }
        | NotUnitRoot { .. }
        | MismatchedBase(_)
        | NonHomogeneousCrystal(_)
        | InvalidCrystal(_)
        | NotDieudonne(_)
        | Parse { .. } => 3,
        WindowOverflow { .. } | WindowIncoherent(_) | ActionOverflow { .. } => 4,
        Io(_) => 5,
        InvalidJob(_) => 64,
        NotSublattice { .. } | NotDivisible { .. } | Dimension(_) | NoSolution | NotCharP { .. } | NotInVImage | DworkDivisionFailure { .. } | ImageOutsideEta { .. } => 70,
    }
}

fn kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
}

fn fail(e: &Error) -> ExitCode {
    let code = exit_code(e);
    eprintln!("{}", json!({ "error": kind(e), "message": e.to_string(), "exit": code }));
    ExitCode::from(code)
}

fn load_crystal(source: &str, p: u32) -> Result<UnitRootCrystalData, Error> {
    let path = std::path::Path::new(source);
    if source.ends_with(".json") || path.exists() {
        let text = std::fs::read_to_string(path)?;
        let file = CrystalFile::from_json(&text)?;
        if file.p != p {
            return Err(Error::InvalidJob(format!("crystal file is for p = {}, job has p = {p}", file.p)));
        }
        return file.to_data();
    }
    builtin(source, p)
}

/// Prints to stdout; a closed pipe (as with `| head`) is not an error.
fn stdout(text: &str) -> Result<(), Error> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}").and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

struct Job {
    data: UnitRootCrystalData,
    params: DrwParams,
}

impl JobArgs {
    fn job(&self) -> Result<Job, Error> {
        if !drw_core::exactalg::is_prime(self.p) {
            return Err(Error::InvalidJob(format!("{} is not prime", self.p)));
        }
        if self.r == 0 {
            return Err(Error::InvalidJob("r must be at least 1".into()));
        }
        let data = load_crystal(&self.crystal, self.p)?;
        let pp = (self.p as i64).pow(2);
        let laurent = data.ring().vars().iter().any(|v| v.laurent);
        let window = Window::new(self.wmin.unwrap_or(if laurent { -pp } else { 0 }), self.wmax.unwrap_or(pp))?;
        let mut params = DrwParams::new(self.r, window);
        if let Some(k) = self.kmax {
            params.k_max = k;
        }
        params.confirm = self.confirm;
        params.strict = self.strict_window;
        Ok(Job { data, params })
    }

    fn write(&self, text: &str) -> Result<(), Error> {
        match &self.out {
            Some(path) => std::fs::write(path, text).map_err(Error::from),
            None => stdout(text),
        }
    }
}

fn compute(job: &JobArgs, cohomology: bool, csv: bool) -> Result<(), Error> {
    let Job { data, params } = job.job()?;
    let crystal = data.validate()?;
    let tower = DrwTower::build(&crystal, params)?;
    if csv {
        return job.write(drw::to_csv(&tower).trim_end());
    }
    let table = if cohomology {
        let mut all = Vec::new();
        for r in 1..=params.r_max {
            all.extend(drw::cohomology_table(&tower, r)?);
        }
        Some(all)
    } else {
        None
    };
    let out = drw::to_json(&tower, table.as_deref(), &[]);
    job.write(&serde_json::to_string_pretty(&out).expect("JSON values serialize"))
}

const TOWER_CHECKS: [&str; 7] = ["axioms", "rho", "lambda", "alpha_F", "module", "localization", "ground-truth"];
const SUITES: [&str; 3] = ["witt-identities", "pd", "derham"];

fn selected(list: &str) -> Result<Vec<String>, Error> {
    if list == "all" {
        return Ok(TOWER_CHECKS.iter().chain(&SUITES).map(|s| s.to_string()).collect());
    }
    let names: Vec<String> = list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    for n in &names {
        if !TOWER_CHECKS.contains(&n.as_str()) && !SUITES.contains(&n.as_str()) {
            return Err(Error::InvalidJob(format!("unknown check `{n}` (known: {}, {})", TOWER_CHECKS.join(", "), SUITES.join(", "))));
        }
    }
    Ok(names)
}

/// Base and localized towers for the localization check; bases without a
/// polynomial variable are first multiplied by an affine line.
fn localization(data: &UnitRootCrystalData, params: DrwParams, r: u32) -> Result<CheckStats, Error> {
    let base = match data.ring().vars().iter().position(|v| !v.laurent) {
        Some(_) => data.clone(),
        None => times_affine_line(data, "s")?,
    };
    let var = base.ring().vars().iter().rposition(|v| !v.laurent).expect("a polynomial variable");
    let loc = localize(&base, var)?;
    let mut params = params;
    params.window = Window::new(params.window.min.min(-params.window.max), params.window.max)?;
    if base.ring().nvars() > data.ring().nvars() {
        // keep the product small
        let m = params.window.max.min(3);
        params.window = Window::new(-m, m)?;
    }
    let bt = DrwTower::build(&base.validate()?, params)?;
    let lt = DrwTower::build(&loc.validate()?, params)?;
    drw::localization_check(&bt, &lt, var, r)
}

fn verify(job: &JobArgs, checks: &str, corrupt: Option<&str>) -> Result<bool, Error> {
    let names = selected(checks)?;
    let fault = corrupt.map(Fault::from_str).transpose()?;
    let Job { data, params } = job.job()?;
    let p = data.p();
    let crystal = data.clone().validate()?;
    let needs_tower = names.iter().any(|n| TOWER_CHECKS.contains(&n.as_str()));
    let tower = if needs_tower { Some(DrwTower::build(&crystal, params)?.with_fault(fault)) } else { None };
    let trivial = crystal.is_trivial() && crystal.rank() == 1;
    let mut reports: Vec<CheckReport> = Vec::new();
    for name in &names {
        let levels = 1..=params.r_max;
        let res: Option<Result<CheckStats, Error>> = match name.as_str() {
            "axioms" => {
                let t = tower.as_ref().expect("built");
                Some(tower_axioms_check(t.tower()).map(|a| CheckStats { checked: a.total_checked(), skipped: a.skipped.values().sum() }))
            }
            "rho" | "lambda" | "alpha_F" | "module" | "ground-truth" => {
                if name == "ground-truth" && !trivial {
                    None
                } else {
                    let t = tower.as_ref().expect("built");
                    Some(levels.into_iter().try_fold(CheckStats::default(), |mut acc, r| {
                        let s = match name.as_str() {
                            "rho" => drw::rho_check(t, r),
                            "lambda" => drw::lambda_check(t, r),
                            "alpha_F" => drw::alpha_f_check(t, r),
                            "module" => drw::module_check(t, r, 64),
                            _ => drw::witt_ground_truth(t, r),
                        }?;
                        acc.checked += s.checked;
                        acc.skipped += s.skipped;
                        Ok(acc)
                    }))
                }
            }
            "localization" => {
                if data.ring().nvars() == 0 || params.r_max > 2 && data.ring().nvars() > 1 {
                    None
                } else {
                    Some(levels.into_iter().try_fold(CheckStats::default(), |mut acc, r| {
                        let s = localization(&data, params, r)?;
                        acc.checked += s.checked;
                        acc.skipped += s.skipped;
                        Ok(acc)
                    }))
                }
            }
            "witt-identities" => Some(suites::witt_suite(p, params.r_max.clamp(1, 4) as usize, 200, 1, fault)),
            "pd" => Some(suites::pd_suite(p, params.r_max.clamp(2, 3) as usize, 100, 50, 2)),
            "derham" => Some(suites::dieudonne_suite(p, 200, 3).and_then(|mut s| {
                let c = suites::crystal_identities(&crystal, params.window)?;
                s.checked += c.checked;
                Ok(s)
            })),
            _ => unreachable!("names are validated"),
        };
        let Some(res) = res else {
            eprintln!("SKIP {name} (not applicable)");
            continue;
        };
        // a failure other than a check failure is an error of the run itself
        if let Err(e) = &res {
            if exit_code(e) != 1 {
                return Err(e.clone());
            }
        }
        let rep = CheckReport::from_result(name, res);
        match &rep.witness {
            None => eprintln!("PASS {name} (checked {}, skipped {})", rep.checked, rep.skipped),
            Some(w) => eprintln!("FAIL {name}: {w}"),
        }
        reports.push(rep);
    }
    let ok = reports.iter().all(|r| r.passed);
    let out = match &tower {
        Some(t) => drw::to_json(t, None, &reports),
        None => json!({ "schema": "drw/1", "p": p, "checks": reports }),
    };
    job.write(&serde_json::to_string_pretty(&out).expect("JSON values serialize"))?;
    Ok(ok)
}

fn witt(expr: &str, p: u32, r: usize) -> Result<(), Error> {
    let w = eval_witt_expr(expr, p, r)?;
    let mut text = format!("coordinates: {w}");
    // ghost components of any integral lift, w_n mod p^{n+1}
    let z = w.ring().with_modulus(None);
    let lift = drw_core::witt::WittVector::new(p, w.coords().iter().map(|c| c.in_ring(&z)).collect())?;
    let ghost = lift.to_ghost()?;
    for (n, g) in ghost.components.iter().enumerate() {
        let m = drw_core::exactalg::pow_big(p, n as u32 + 1);
        text += &format!("\nghost w_{n} ≡ {} (mod {m})", g.reduce(Some(&m)));
    }
    stdout(&text)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let res = match &cli.command {
        Command::Compute { job, cohomology, csv } => compute(job, *cohomology, *csv).map(|_| true),
        Command::Verify { job, checks, corrupt } => verify(job, checks, corrupt.as_deref()),
        Command::Witt { expr, p, r } => witt(expr, *p, *r).map(|_| true),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => fail(&e),
    }
}
