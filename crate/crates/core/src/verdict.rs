use std::fmt;

/// Outcome of a decision procedure.
///
/// `W` is the witness carried on SAT: the values chosen for the outermost
/// existential quantifier block (empty when the prefix starts with `forall`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<W> {
    Sat { witness: W },
    Unsat,
    /// The instance exceeds a configured budget; no search was attempted.
    ResourceExceeded { reason: String },
}

impl<W> Verdict<W> {
    pub fn status(&self) -> Status {
        match self {
            Verdict::Sat { .. } => Status::Sat,
            Verdict::Unsat => Status::Unsat,
            Verdict::ResourceExceeded { .. } => Status::ResourceExceeded,
        }
    }

    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat { .. })
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Sat { witness } => Some(witness),
            _ => None,
        }
    }
}

/// Witness-free verdict, used for comparisons and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Sat,
    Unsat,
    ResourceExceeded,
}

impl Status {
    pub fn from_bool(sat: bool) -> Self {
        if sat {
            Status::Sat
        } else {
            Status::Unsat
        }
    }

    pub fn is_decided(self) -> bool {
        !matches!(self, Status::ResourceExceeded)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Sat => "sat",
            Status::Unsat => "unsat",
            Status::ResourceExceeded => "resource-exceeded",
        })
    }
}
