use std::fmt;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;
use wait_timeout::ChildExt;

use super::EmittedScript;

/// How to run an external solver: `program args... <script.smt2>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    pub program: PathBuf,
    pub args: Vec<String>,
    pub timeout: Duration,
}

impl SolverConfig {
    pub fn new(program: impl Into<PathBuf>) -> Self {
        Self { program: program.into(), args: Vec::new(), timeout: Duration::from_secs(10) }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExternalStatus {
    Sat,
    Unsat,
    Unknown,
    Error,
}

impl fmt::Display for ExternalStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExternalStatus::Sat => "sat",
            ExternalStatus::Unsat => "unsat",
            ExternalStatus::Unknown => "unknown",
            ExternalStatus::Error => "error",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalVerdict {
    pub status: ExternalStatus,
    /// Program that produced the verdict.
    pub solver: String,
    pub wall_time: Duration,
    /// Why the status is `unknown` or `error`.
    pub detail: Option<String>,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("cannot start solver `{program}`: {source}")]
    Spawn { program: String, source: io::Error },
    #[error("cannot write script file: {0}")]
    Script(io::Error),
    #[error("solver process: {0}")]
    Process(io::Error),
}

/// Reads the status from the first line of solver output. Only the exact
/// words `sat`, `unsat` and `unknown` count; anything else is an error.
pub fn parse_status_line(stdout: &str) -> Result<ExternalStatus, String> {
    let first = stdout.lines().next().unwrap_or("").trim_end();
    match first {
        "sat" => Ok(ExternalStatus::Sat),
        "unsat" => Ok(ExternalStatus::Unsat),
        "unknown" => Ok(ExternalStatus::Unknown),
        "" => Err("solver printed no status line".into()),
        other => Err(format!("unexpected solver output `{other}`")),
    }
}

fn drain(mut r: impl Read + Send + 'static) -> thread::JoinHandle<String> {
    thread::spawn(move || {
        let mut s = String::new();
        let _ = r.read_to_string(&mut s);
        s
    })
}

/// Writes the script to a temporary `.smt2` file and runs the solver on it.
///
/// A run that exceeds the timeout is killed and reported as `unknown`.
/// Output that does not start with a status line is reported as `error`.
pub fn run_external_solver(script: &EmittedScript, cfg: &SolverConfig) -> Result<ExternalVerdict, SolverError> {
    let mut file = tempfile::Builder::new()
        .prefix("so2bv-")
        .suffix(".smt2")
        .tempfile()
        .map_err(SolverError::Script)?;
    file.write_all(script.text.as_bytes()).map_err(SolverError::Script)?;
    file.flush().map_err(SolverError::Script)?;

    let solver = cfg.program.display().to_string();
    let start = Instant::now();
    let mut child = Command::new(&cfg.program)
        .args(&cfg.args)
        .arg(file.path())
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|source| SolverError::Spawn { program: solver.clone(), source })?;
    let out = drain(child.stdout.take().expect("piped"));
    let err = drain(child.stderr.take().expect("piped"));

    let exit = child.wait_timeout(cfg.timeout).map_err(SolverError::Process)?;
    let verdict = |status, detail| ExternalVerdict { status, solver: solver.clone(), wall_time: start.elapsed(), detail };
    let Some(exit) = exit else {
        let _ = child.kill();
        let _ = child.wait();
        return Ok(verdict(
            ExternalStatus::Unknown,
            Some(format!("timed out after {} ms", cfg.timeout.as_millis())),
        ));
    };
    let stdout = out.join().unwrap_or_default();
    let stderr = err.join().unwrap_or_default();
    Ok(match parse_status_line(&stdout) {
        Ok(ExternalStatus::Unknown) => verdict(ExternalStatus::Unknown, Some("solver answered unknown".into())),
        Ok(status) => verdict(status, None),
        Err(msg) => {
            let mut detail = format!("{msg} (exit {exit})");
            if let Some(line) = stderr.lines().find(|l| !l.trim().is_empty()) {
                detail.push_str(&format!("; stderr: {}", line.trim()));
            }
            verdict(ExternalStatus::Error, Some(detail))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_line_is_strict() {
        assert_eq!(parse_status_line("sat\n"), Ok(ExternalStatus::Sat));
        assert_eq!(parse_status_line("unsat\r\n(model)"), Ok(ExternalStatus::Unsat));
        assert_eq!(parse_status_line("unknown"), Ok(ExternalStatus::Unknown));
        assert!(parse_status_line(" sat").is_err());
        assert!(parse_status_line("SAT").is_err());
        assert!(parse_status_line("(error \"line 1\")\nsat").is_err());
        assert!(parse_status_line("").is_err());
    }

    #[test]
    fn missing_program_is_a_spawn_error() {
        let script = EmittedScript {
            text: "(check-sat)\n".into(),
            logic: super::super::LOGIC,
            declarations: Vec::new(),
            binders: Vec::new(),
        };
        let cfg = SolverConfig::new("/nonexistent/solver-binary");
        let err = run_external_solver(&script, &cfg).unwrap_err();
        assert!(matches!(err, SolverError::Spawn { .. }));
        assert!(err.to_string().contains("/nonexistent/solver-binary"));
    }

    #[cfg(unix)]
    #[test]
    fn shell_stand_ins() {
        let script = EmittedScript {
            text: "(check-sat)\n".into(),
            logic: super::super::LOGIC,
            declarations: Vec::new(),
            binders: Vec::new(),
        };
        let sh = |body: &str| SolverConfig {
            program: "/bin/sh".into(),
            args: vec!["-c".into(), body.into(), "solver".into()],
            timeout: Duration::from_secs(5),
        };
        let v = run_external_solver(&script, &sh("grep -q check-sat \"$1\" && echo unsat")).unwrap();
        assert_eq!(v.status, ExternalStatus::Unsat);
        let v = run_external_solver(&script, &sh("echo 'sat?'")).unwrap();
        assert_eq!(v.status, ExternalStatus::Error);
        let v = run_external_solver(&script, &sh("sleep 5").with_timeout(Duration::from_millis(1))).unwrap();
        assert_eq!(v.status, ExternalStatus::Unknown);
        assert!(v.wall_time < Duration::from_secs(4));
    }
}
