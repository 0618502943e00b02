//! Runs an external WCNF solver as a child process.

use std::io::Read;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use super::{SolveResult, SolveStats, Status};
use crate::encode::wcnf::{parse_model, to_wcnf};
use crate::encode::CnfInstance;
use crate::error::{Error, Result};

/// Environment variable that overrides the solver command.
pub const SOLVER_ENV: &str = "DOMAINMINER_SOLVER";

/// Writes `inst` to a temporary WCNF file, runs `solver_cmd <file>` and
/// parses its `s`/`o`/`v` lines. The process is killed when `timeout`
/// elapses. Returned models are checked against every hard clause.
pub fn solve_external(inst: &CnfInstance, solver_cmd: &str, timeout: Option<Duration>) -> Result<SolveResult> {
    let start = Instant::now();
    let cmd = std::env::var(SOLVER_ENV).ok().filter(|s| !s.trim().is_empty()).unwrap_or_else(|| solver_cmd.to_string());
    let mut argv = cmd.split_whitespace();
    let program = argv.next().ok_or_else(|| Error::Solver("empty solver command".into()))?;

    let mut file = tempfile::Builder::new()
        .suffix(".wcnf")
        .tempfile()
        .map_err(|e| Error::io(std::env::temp_dir(), e))?;
    std::io::Write::write_all(&mut file, to_wcnf(inst).as_bytes()).map_err(|e| Error::io(file.path(), e))?;

    let mut command = Command::new(program);
    #[cfg(unix)]
    std::os::unix::process::CommandExt::process_group(&mut command, 0);
    let mut child = command
        .args(argv)
        .arg(file.path())
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| Error::Solver(format!("cannot start {program:?}: {e}")))?;

    let mut stdout = child.stdout.take().expect("piped stdout");
    let reader = std::thread::spawn(move || {
        let mut out = String::new();
        let _ = stdout.read_to_string(&mut out);
        out
    });

    let deadline = timeout.map(|t| start + t);
    let exit = loop {
        if let Some(status) = child.try_wait().map_err(|e| Error::Solver(e.to_string()))? {
            break Some(status);
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            kill_tree(&mut child);
            break None;
        }
        std::thread::sleep(Duration::from_millis(5));
    };
    let stats = || SolveStats { seconds: start.elapsed().as_secs_f64(), ..SolveStats::default() };
    let Some(exit) = exit else {
        // grandchildren may still hold the pipe; leave the reader detached
        return Ok(SolveResult { status: Status::Timeout, objective: None, assignment: None, best_known: None, stats: stats() });
    };
    let output = reader.join().unwrap_or_default();
    let stats = stats();
    let status_line = output.lines().filter_map(|l| l.trim().strip_prefix("s ")).next_back().map(str::trim);
    match status_line {
        None if !exit.success() => Err(Error::Solver(format!("{program} exited with {exit} and no status line"))),
        None => Err(Error::Solver(format!("{program} printed no status line"))),
        Some("UNSATISFIABLE") => Ok(SolveResult::infeasible(stats)),
        Some("OPTIMUM FOUND") => {
            let assignment = parse_model(&output, inst.var_count())?;
            if let Some(c) = inst.violated_hard(&assignment) {
                return Err(Error::Integrity(format!("solver model falsifies hard clause #{c}: {:?}", inst.hard[c])));
            }
            let objective = inst.soft_satisfied(&assignment);
            let cost = inst.soft.len() - objective;
            let reported = output.lines().filter_map(|l| l.trim().strip_prefix("o ")).next_back();
            if let Some(o) = reported {
                let o: usize = o.trim().parse().map_err(|_| Error::Solver(format!("bad cost line {o:?}")))?;
                if o != cost {
                    return Err(Error::Integrity(format!("solver reports cost {o} but its model costs {cost}")));
                }
            }
            Ok(SolveResult {
                status: Status::Optimal,
                objective: Some(objective),
                assignment: Some(assignment),
                best_known: Some(objective),
                stats,
            })
        }
        Some(other) => Err(Error::Solver(format!("unexpected status {other:?}"))),
    }
}

/// Kills the child and, on unix, the process group it leads.
fn kill_tree(child: &mut std::process::Child) {
    #[cfg(unix)]
    if let Ok(pid) = i32::try_from(child.id()) {
        // SAFETY: plain syscall on a group id we created
        unsafe {
            libc::kill(-pid, libc::SIGKILL);
        }
    }
    let _ = child.kill();
    let _ = child.wait();
}
