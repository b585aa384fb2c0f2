//! Solves a semidefinite program given in SDPA-sparse format and writes a
//! plain-text report with both objective values, the termination status, and
//! the block variable values.
//!
//! The file encodes: maximize F0 . Y subject to Fk . Y = ck over a product
//! of PSD and nonnegative-diagonal blocks. Internally this becomes the conic
//! problem min -F0 . Y with the trace equalities in a zero cone and Y
//! constrained by PSD-triangle and nonnegative cones.

use clap::Parser;
use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};
use esdp_core::sdpgen::sdpa::parse_sdpa_sparse;
use esdp_core::sosmodel::BlockKind;
use std::io::Write;

#[derive(Parser)]
#[command(about = "SDPA-sparse front end for the Clarabel conic solver")]
struct Args {
    /// problem file (.dat-s)
    input: std::path::PathBuf,
    /// report file to write
    output: std::path::PathBuf,
    /// solver absolute/relative tolerance
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 400)]
    max_iter: u32,
    /// print solver progress
    #[arg(long, default_value_t = false)]
    verbose: bool,
}

fn main() {
    let args = Args::parse();
    let text = match std::fs::read_to_string(&args.input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {}", args.input.display(), e);
            std::process::exit(1);
        }
    };
    let problem = match parse_sdpa_sparse(&text, 64) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("cannot parse {}: {}", args.input.display(), e);
            std::process::exit(1);
        }
    };

    // variable layout: concatenated block storage, PSD blocks in scaled
    // svec order (column-major upper triangle, off-diagonals times sqrt 2)
    let nblocks = problem.blocks.len();
    let mut offsets = Vec::with_capacity(nblocks);
    let mut nvar = 0usize;
    for (_, size, kind) in &problem.blocks {
        offsets.push(nvar);
        nvar += match kind {
            BlockKind::Psd => size * (size + 1) / 2,
            BlockKind::Diagonal => *size,
        };
    }
    let sqrt2 = 2f64.sqrt();
    // index and trace-coefficient of a stored (block, i, j) entry
    let locate = |block: usize, i: usize, j: usize| -> (usize, f64) {
        match problem.blocks[block].2 {
            BlockKind::Psd => {
                let idx = offsets[block] + j * (j + 1) / 2 + i;
                let coef = if i == j { 1.0 } else { sqrt2 };
                (idx, coef)
            }
            BlockKind::Diagonal => {
                assert_eq!(i, j, "off-diagonal entry in diagonal block");
                (offsets[block] + i, 1.0)
            }
        }
    };

    let m = problem.rows.len();
    let mut q = vec![0f64; nvar];
    for (v, c) in &problem.objective {
        let (idx, coef) = locate(v.block, v.i, v.j);
        q[idx] -= coef * c.to_f64();
    }
    // rows: equalities first, then -I for the cone membership
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    for (k, row) in problem.rows.iter().enumerate() {
        for (v, c) in &row.entries {
            let (idx, coef) = locate(v.block, v.i, v.j);
            triplets.push((k, idx, coef * c.to_f64()));
        }
    }
    for idx in 0..nvar {
        triplets.push((m + idx, idx, -1.0));
    }
    let a = csc_from_triplets(m + nvar, nvar, triplets);
    let mut b = vec![0f64; m + nvar];
    for (k, row) in problem.rows.iter().enumerate() {
        b[k] = row.rhs.to_f64();
    }
    let mut cones: Vec<SupportedConeT<f64>> = vec![SupportedConeT::ZeroConeT(m)];
    for (_, size, kind) in &problem.blocks {
        cones.push(match kind {
            BlockKind::Psd => SupportedConeT::PSDTriangleConeT(*size),
            BlockKind::Diagonal => SupportedConeT::NonnegativeConeT(*size),
        });
    }
    let p = CscMatrix::<f64>::zeros((nvar, nvar));
    let settings = DefaultSettingsBuilder::default()
        .verbose(args.verbose)
        .max_iter(args.max_iter)
        .tol_gap_abs(args.tol)
        .tol_gap_rel(args.tol)
        .tol_feas(args.tol)
        .build()
        .expect("settings");
    let mut solver = match DefaultSolver::new(&p, &q, &a, &b, &cones, settings) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("solver setup failed: {:?}", e);
            std::process::exit(1);
        }
    };
    solver.solve();
    let sol = &solver.solution;
    let status = match sol.status {
        SolverStatus::Solved => "OPTIMAL",
        SolverStatus::AlmostSolved => "OPTIMAL_INACCURATE",
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => "INFEASIBLE",
        SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => "UNBOUNDED",
        SolverStatus::MaxIterations => "MAX_ITERATIONS",
        SolverStatus::MaxTime => "MAX_TIME",
        SolverStatus::NumericalError => "NUMERICAL_ERROR",
        SolverStatus::InsufficientProgress => "INSUFFICIENT_PROGRESS",
        SolverStatus::Unsolved => "UNSOLVED",
        SolverStatus::CallbackTerminated => "CALLBACK_TERMINATED",
    };
    let mut out = String::new();
    out.push_str(&format!("status = {}\n", status));
    // Clarabel minimizes -F0.Y; our side (block variables) is its primal
    out.push_str(&format!("objective_primal = {:.16e}\n", -sol.obj_val_dual));
    out.push_str(&format!("objective_dual = {:.16e}\n", -sol.obj_val));
    out.push_str(&format!("iterations = {}\n", solver.info.iterations));
    // block variable values (stored upper triangle, unscaled)
    for (bi, (_, size, kind)) in problem.blocks.iter().enumerate() {
        match kind {
            BlockKind::Psd => {
                for j in 0..*size {
                    for i in 0..=j {
                        let idx = offsets[bi] + j * (j + 1) / 2 + i;
                        let v = if i == j { sol.x[idx] } else { sol.x[idx] / sqrt2 };
                        out.push_str(&format!("y {} {} {} {:.16e}\n", bi + 1, i + 1, j + 1, v));
                    }
                }
            }
            BlockKind::Diagonal => {
                for i in 0..*size {
                    let v = sol.x[offsets[bi] + i];
                    out.push_str(&format!("y {} {} {} {:.16e}\n", bi + 1, i + 1, i + 1, v));
                }
            }
        }
    }
    let mut f = std::fs::File::create(&args.output).expect("cannot create output file");
    f.write_all(out.as_bytes()).expect("cannot write output");
    println!("status = {}", status);
    println!("objective_dual = {:.16e}", -sol.obj_val);
}

fn csc_from_triplets(rows: usize, cols: usize, mut trip: Vec<(usize, usize, f64)>) -> CscMatrix<f64> {
    trip.sort_by_key(|&(r, c, _)| (c, r));
    let mut colptr = vec![0usize; cols + 1];
    let mut rowval = Vec::with_capacity(trip.len());
    let mut nzval = Vec::with_capacity(trip.len());
    let mut last: Option<(usize, usize)> = None;
    for (r, c, v) in trip {
        if last == Some((c, r)) {
            let n = nzval.len();
            nzval[n - 1] += v;
            continue;
        }
        colptr[c + 1] += 1;
        rowval.push(r);
        nzval.push(v);
        last = Some((c, r));
    }
    for c in 0..cols {
        colptr[c + 1] += colptr[c];
    }
    CscMatrix::new(rows, cols, colptr, rowval, nzval)
}
