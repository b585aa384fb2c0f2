//! Constraint pruning: exact duplicate removal at full precision, then a
//! rank filter on a machine-precision shadow of the constraint matrix.
//!
//! The rank filter is a pivoted Cholesky factorization of the Gram matrix of
//! the normalized rows, which selects the same maximal independent row set a
//! column-pivoted QR of the transposed constraint matrix would, at a
//! fraction of the cost. Symmetrized assemblies produce exactly dependent
//! rows whose residual pivots drop to rounding noise; the threshold sits
//! well above that noise and well below any structurally independent pivot.

use super::{SdpGenError, SdpProblem};
use crate::sosmodel::VarId;
use std::collections::HashMap;

/// Relative pivot threshold for the rank filter on unit-normalized rows.
const PIVOT_TOL: f64 = 1e-13;

/// Removes duplicate rows (erroring when duplicates disagree on the
/// constant), then filters the remainder to a maximal linearly independent
/// set, preserving original row order.
pub fn prune_constraints(problem: &SdpProblem) -> Result<SdpProblem, SdpGenError> {
    let kept = dedup_rows(problem)?;
    let kept = rank_filter(problem, kept);
    Ok(SdpProblem {
        prec: problem.prec,
        blocks: problem.blocks.clone(),
        rows: kept.iter().map(|&k| problem.rows[k].clone()).collect(),
        objective: problem.objective.clone(),
    })
}

fn dedup_rows(problem: &SdpProblem) -> Result<Vec<usize>, SdpGenError> {
    let mut seen: HashMap<Vec<(VarId, String)>, usize> = HashMap::new();
    let mut kept = Vec::new();
    for (k, row) in problem.rows.iter().enumerate() {
        let key: Vec<(VarId, String)> = row
            .entries
            .iter()
            .map(|(v, c)| (*v, c.to_sci_string(50)))
            .collect();
        match seen.get(&key) {
            None => {
                seen.insert(key, k);
                kept.push(k);
            }
            Some(&first) => {
                let prev = &problem.rows[first].rhs;
                if (prev - &row.rhs).abs() > crate::poly::drop_tolerance(problem.prec) {
                    return Err(SdpGenError::InconsistentDuplicates(
                        prev.to_f64(),
                        row.rhs.to_f64(),
                    ));
                }
            }
        }
    }
    Ok(kept)
}

fn rank_filter(problem: &SdpProblem, candidates: Vec<usize>) -> Vec<usize> {
    let m = candidates.len();
    if m == 0 {
        return candidates;
    }
    // dense variable ids
    let mut var_ids: HashMap<VarId, usize> = HashMap::new();
    for &k in &candidates {
        for (v, _) in &problem.rows[k].entries {
            let next = var_ids.len();
            var_ids.entry(*v).or_insert(next);
        }
    }
    // unit-normalized f64 shadow rows
    let shadow: Vec<Vec<(usize, f64)>> = candidates
        .iter()
        .map(|&k| {
            let mut row: Vec<(usize, f64)> = problem.rows[k]
                .entries
                .iter()
                .map(|(v, c)| (var_ids[v], c.to_f64()))
                .collect();
            let norm = row.iter().map(|(_, x)| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                for (_, x) in row.iter_mut() {
                    *x /= norm;
                }
            }
            row.sort_by_key(|(j, _)| *j);
            row
        })
        .collect();
    // Gram matrix of shadow rows
    let mut gram = vec![vec![0f64; m]; m];
    for a in 0..m {
        for b in a..m {
            let mut s = 0.0;
            let (ra, rb) = (&shadow[a], &shadow[b]);
            let (mut ia, mut ib) = (0, 0);
            while ia < ra.len() && ib < rb.len() {
                match ra[ia].0.cmp(&rb[ib].0) {
                    std::cmp::Ordering::Less => ia += 1,
                    std::cmp::Ordering::Greater => ib += 1,
                    std::cmp::Ordering::Equal => {
                        s += ra[ia].1 * rb[ib].1;
                        ia += 1;
                        ib += 1;
                    }
                }
            }
            gram[a][b] = s;
            gram[b][a] = s;
        }
    }
    // pivoted Cholesky on the Gram matrix; kept pivots = independent rows
    let mut order: Vec<usize> = (0..m).collect();
    let mut l = vec![vec![0f64; m]; m];
    let mut diag: Vec<f64> = (0..m).map(|k| gram[k][k]).collect();
    let mut selected: Vec<usize> = Vec::new();
    for step in 0..m {
        let mut best = step;
        for j in (step + 1)..m {
            if diag[j] > diag[best] {
                best = j;
            }
        }
        order.swap(step, best);
        diag.swap(step, best);
        l.swap(step, best);
        if diag[step] <= PIVOT_TOL {
            break;
        }
        let dk = diag[step].sqrt();
        selected.push(order[step]);
        for irow in (step + 1)..m {
            let mut v = gram[order[irow]][order[step]];
            for t in 0..step {
                v -= l[irow][t] * l[step][t];
            }
            let lik = v / dk;
            diag[irow] -= lik * lik;
            l[irow][step] = lik;
        }
        l[step][step] = dk;
    }
    selected.sort_unstable();
    selected.into_iter().map(|s| candidates[s]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Scalar, DEFAULT_PRECISION as P};
    use crate::sosmodel::{BlockKind, Row};

    fn var(i: usize) -> VarId {
        VarId { block: 0, i, j: i }
    }

    fn row(entries: Vec<(usize, f64)>, rhs: f64) -> Row {
        Row {
            entries: entries
                .into_iter()
                .map(|(i, c)| (var(i), Scalar::from_f64(c, P)))
                .collect(),
            rhs: Scalar::from_f64(rhs, P),
        }
    }

    fn problem(rows: Vec<Row>) -> SdpProblem {
        SdpProblem {
            prec: P,
            blocks: vec![("d".into(), 8, BlockKind::Diagonal)],
            rows,
            objective: vec![],
        }
    }

    #[test]
    fn removes_duplicates() {
        let p = problem(vec![
            row(vec![(0, 1.0), (1, 2.0)], 3.0),
            row(vec![(0, 1.0), (1, 2.0)], 3.0),
            row(vec![(2, 1.0)], 1.0),
        ]);
        let q = prune_constraints(&p).unwrap();
        assert_eq!(q.rows.len(), 2);
    }

    #[test]
    fn inconsistent_duplicates_error() {
        let p = problem(vec![
            row(vec![(0, 1.0)], 1.0),
            row(vec![(0, 1.0)], 2.0),
        ]);
        assert!(matches!(
            prune_constraints(&p),
            Err(SdpGenError::InconsistentDuplicates(_, _))
        ));
    }

    #[test]
    fn removes_linear_combinations() {
        let p = problem(vec![
            row(vec![(0, 1.0), (1, 1.0)], 1.0),
            row(vec![(1, 1.0), (2, 1.0)], 2.0),
            // sum of the first two
            row(vec![(0, 1.0), (1, 2.0), (2, 1.0)], 3.0),
            row(vec![(3, 5.0)], 0.0),
        ]);
        let q = prune_constraints(&p).unwrap();
        assert_eq!(q.rows.len(), 3);
        // order preserved and the dependent row dropped
        assert_eq!(q.rows[0].entries.len(), 2);
        assert_eq!(q.rows[2].entries.len(), 1);
    }

    #[test]
    fn keeps_independent_rows() {
        let rows: Vec<Row> = (0..6).map(|k| row(vec![(k, 1.0)], k as f64)).collect();
        let p = problem(rows);
        let q = prune_constraints(&p).unwrap();
        assert_eq!(q.rows.len(), 6);
    }
}
