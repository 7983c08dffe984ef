use mina_core::lp::{self, Sense, SimplexConfig, Status};
use mina_core::{LinearProgram, SimplexSolver};
use mina_testkit::corpus::random_lp;
use mina_testkit::oracle::lp_by_vertex_enumeration;

fn agree(lp: &LinearProgram, got: &mina_core::LpSolution, label: &str) {
    match lp_by_vertex_enumeration(lp) {
        None => assert_eq!(got.status, Status::Infeasible, "{label}\n{}", lp.to_text()),
        Some(opt) => {
            assert_eq!(got.status, Status::Optimal, "{label}\n{}", lp.to_text());
            assert!(
                (got.objective - opt).abs() <= 1e-6,
                "{label}: simplex {} vs enumeration {opt}\n{}",
                got.objective,
                lp.to_text()
            );
            assert!(lp.max_violation(&got.values) <= 1e-7, "{label}");
        }
    }
}

#[test]
fn simplex_matches_vertex_enumeration() {
    for i in 0..2000 {
        let lp = random_lp(i, 6);
        let sol = lp::solve(&lp).unwrap();
        agree(&lp, &sol, &format!("lp {i}"));
    }
}

#[test]
fn warm_started_rows_match_cold_solves() {
    for i in 0..400 {
        let full = random_lp(i, 5);
        let rows = full.constraints().to_vec();
        let mut base = LinearProgram::new();
        for j in 0..full.num_vars() {
            let (lo, hi) = full.bounds(j);
            base.add_var(lo, hi);
        }
        for &(j, c) in full.objective() {
            base.set_objective(j, c);
        }
        let mut solver = SimplexSolver::new(base.clone(), SimplexConfig::default()).unwrap();
        let mut sol = solver.solve().unwrap();
        let mut prev = sol.objective;
        for (r, row) in rows.into_iter().enumerate() {
            base.add_constraint(row.coeffs.clone(), row.sense, row.rhs);
            sol = solver.add_constraint(row.coeffs, row.sense, row.rhs).unwrap();
            agree(&base, &sol, &format!("lp {i} after row {r}"));
            if sol.status != Status::Optimal {
                break;
            }
            assert!(sol.objective >= prev - 1e-9);
            prev = sol.objective;
        }
    }
}

#[test]
fn degenerate_program_terminates() {
    // Many redundant rows through one vertex.
    let mut lp = LinearProgram::new();
    let v: Vec<usize> = (0..4).map(|_| lp.add_var(0.0, 1.0)).collect();
    for &x in &v {
        lp.set_objective(x, -1.0);
    }
    for a in 0..4 {
        for b in 0..4 {
            if a != b {
                lp.add_constraint(vec![(v[a], 1.0), (v[b], 1.0)], Sense::Le, 1.0);
            }
        }
    }
    let sol = lp::solve(&lp).unwrap();
    agree(&lp, &sol, "degenerate");
}
