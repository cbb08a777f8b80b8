use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Deliberate defects for exercising the checks. Each one has a designated
/// failing check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fault {
    /// The coefficient side of the α_F comparison uses the divided Frobenius;
    /// `alpha_F` fails with `Mismatch`.
    FlipFrobenius,
    /// `λ_r` is the zero map; `rho` fails with `QuasiIsoFailure`.
    DropLambda,
    /// Witt addition drops its carries; `witt-identities` fails.
    BadWittCarry,
}

impl Fault {
    pub const ALL: [Fault; 3] = [Fault::FlipFrobenius, Fault::DropLambda, Fault::BadWittCarry];

    pub fn name(self) -> &'static str {
        match self {
            Fault::FlipFrobenius => "flip-frobenius",
            Fault::DropLambda => "drop-lambda",
            Fault::BadWittCarry => "bad-witt-carry",
        }
    }

    /// Name of the check expected to fail.
    pub fn target_check(self) -> &'static str {
        match self {
            Fault::FlipFrobenius => "alpha_F",
            Fault::DropLambda => "rho",
            Fault::BadWittCarry => "witt-identities",
        }
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Fault {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Fault::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidJob(format!("unknown fault `{s}` (expected flip-frobenius, drop-lambda or bad-witt-carry)")))
    }
}
