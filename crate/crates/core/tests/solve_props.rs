mod common;

use std::os::unix::fs::PermissionsExt;
use std::time::{Duration, Instant};

use domainminer::encode::{encode, Encoding, EncodingConfig};
use domainminer::oracle;
use domainminer::solve::{maxsat, mine, solve_builtin, solve_external, Backend, Status};
use domainminer::{Cell, Error, PartialMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn builtin_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let enc: Encoding = "BE+NF+MD+LI".parse().unwrap();
    for _ in 0..200 {
        let n = rng.gen_range(1..=6);
        let k = rng.gen_range(1..=2);
        let psm = common::random_psm(&mut rng, n, k, 6);
        let best = oracle::dbpm_optimum(&psm).unwrap();
        let got = mine(&psm, enc, None, &Backend::Builtin, None).unwrap();
        assert_eq!(got.domain_count(), best, "{psm:?}");
        assert!(got.policy.enforces(&got.instantiation).unwrap());
        for (i, &c) in psm.cells().iter().enumerate() {
            let (u, a, v) = psm.triple(i);
            match c {
                Cell::One => assert!(got.instantiation.has_edge(u, a, v)),
                Cell::Zero => assert!(!got.instantiation.has_edge(u, a, v)),
                Cell::Star => {}
            }
        }
    }
}

#[test]
fn more_stars_never_hurt() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let enc: Encoding = "BE+NF+MD+LI".parse().unwrap();
    for _ in 0..15 {
        let n = rng.gen_range(3..=7);
        let g = common::random_digraph(&mut rng, n, 1, 0.5);
        let mut psm = PartialMatrix::from_digraph(&g);
        let order = rand::seq::index::sample(&mut rng, n * n, n * n / 2);
        let mut last = usize::MAX;
        for (step, cell) in order.into_iter().enumerate() {
            let (u, a, v) = psm.triple(cell);
            psm.set(u, a, v, Cell::Star);
            if step % 3 != 0 {
                continue;
            }
            let got = mine(&psm, enc, Some(n), &Backend::Builtin, None).unwrap().domain_count();
            assert!(got <= last);
            last = got;
        }
    }
}

#[test]
fn inequivalent_pair_needs_two_classes() {
    let mut psm = PartialMatrix::new(3, 1).unwrap();
    psm.set(0, 0, 2, Cell::One);
    psm.set(1, 0, 2, Cell::Zero);
    let inst = encode(&psm, EncodingConfig::new(Encoding::BE, 1).unwrap()).unwrap();
    assert_eq!(solve_builtin(&inst, None).status, Status::Infeasible);
    let inst = encode(&psm, EncodingConfig::new(Encoding::BE, 2).unwrap()).unwrap();
    assert_eq!(solve_builtin(&inst, None).objective, Some(0));
}

#[test]
fn star_merges_rows() {
    // rows 0 and 1 differ only where row 1 has a star
    let mut psm = PartialMatrix::filled(3, 1, Cell::Zero).unwrap();
    psm.set(0, 0, 2, Cell::One);
    psm.set(1, 0, 2, Cell::Star);
    psm.set(2, 0, 0, Cell::One);
    psm.set(2, 0, 1, Cell::One);
    assert_eq!(oracle::dbpm_optimum(&psm).unwrap(), 2);
    for enc in Encoding::benchmark_set() {
        assert_eq!(mine(&psm, enc, Some(3), &Backend::Builtin, None).unwrap().domain_count(), 2);
    }
}

#[test]
fn forced_soft_violation() {
    let r = maxsat(1, &[vec![1]], &[vec![-1]], None);
    assert_eq!((r.status, r.objective), (Status::Optimal, Some(0)));
}

#[test]
fn timeout_is_reported() {
    // pigeonhole-hard bound proof without symmetry breaking
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let g = common::random_digraph(&mut rng, 9, 1, 0.5);
    let psm = PartialMatrix::from_digraph(&g);
    let start = Instant::now();
    let res = mine(&psm, Encoding::BE, Some(18), &Backend::Builtin, Some(Duration::from_millis(300)));
    assert!(matches!(res, Err(Error::Timeout { .. })), "{res:?}");
    assert!(start.elapsed() < Duration::from_secs(5));
}

fn script(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, format!("#!/bin/sh\n{body}\n")).unwrap();
    std::fs::set_permissions(&path, std::fs::Permissions::from_mode(0o755)).unwrap();
    path.display().to_string()
}

fn one_star() -> domainminer::CnfInstance {
    encode(&PartialMatrix::new(1, 1).unwrap(), EncodingConfig::new(Encoding::BE, 1).unwrap()).unwrap()
}

#[test]
fn external_protocol() {
    let dir = tempfile::tempdir().unwrap();
    let inst = one_star();

    let unsat = script(&dir, "unsat.sh", "echo 's UNSATISFIABLE'");
    assert_eq!(solve_external(&inst, &unsat, None).unwrap().status, Status::Infeasible);

    // vars: x=1 y=2 z=3 r=4; the only models set y, r and x = z
    let good = script(&dir, "good.sh", "test -f \"$1\" || exit 9\necho 'o 1'\necho 's OPTIMUM FOUND'\necho 'v 1 2 3 4 0'");
    let r = solve_external(&inst, &good, None).unwrap();
    assert_eq!((r.status, r.objective), (Status::Optimal, Some(0)));

    let wrong_cost = script(&dir, "cost.sh", "echo 'o 0'\necho 's OPTIMUM FOUND'\necho 'v 1 2 3 4 0'");
    assert!(matches!(solve_external(&inst, &wrong_cost, None), Err(Error::Integrity(_))));

    let bad_model = script(&dir, "bad.sh", "echo 's OPTIMUM FOUND'\necho 'v 1 -2 3 4 0'");
    assert!(matches!(solve_external(&inst, &bad_model, None), Err(Error::Integrity(_))));

    let crash = script(&dir, "crash.sh", "echo oops\nexit 4");
    assert!(matches!(solve_external(&inst, &crash, None), Err(Error::Solver(_))));

    let slow = script(&dir, "slow.sh", "sleep 5\necho 's UNSATISFIABLE'");
    let start = Instant::now();
    let r = solve_external(&inst, &slow, Some(Duration::from_millis(200))).unwrap();
    assert_eq!(r.status, Status::Timeout);
    assert!(r.assignment.is_none());
    assert!(start.elapsed() < Duration::from_secs(3));

    assert!(matches!(
        solve_external(&inst, "/nonexistent/solver", None),
        Err(Error::Solver(_))
    ));
}
