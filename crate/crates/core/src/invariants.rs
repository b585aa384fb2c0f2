//! Rewriting O(3)-invariant polynomials on products of spheres as
//! polynomials in the pairwise inner products, via regularized high-precision
//! least squares, plus symmetrization over the edge-automorphism action.
//!
//! Both sides of the linear system are put in sphere normal form first
//! (z_k^2 eliminated), which makes the rewrite an exact coefficient identity
//! rather than an on-sphere-only one, so a consistent least-squares solution
//! reproduces the polynomial to working precision.

use crate::groups::{edge_action_image, edge_list, monomials_up_to, PermGroup};
use crate::poly::{cast_tolerance, sphere_normal_form, Expo, SparsePoly};
use crate::sampling::{pair_inner_products, random_unit_point};
use crate::scalar::{CScalar, Scalar};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RewriteError {
    #[error("nonpositive pivot {0:e} at step {1}; matrix not SPD at working precision")]
    NotSpd(f64, usize),
    #[error("rewrite verification failed: sampled residual {0:e} (degree too small or input not invariant)")]
    VerificationFailed(f64),
    #[error("polynomial has {0} variables, expected {1}")]
    WrongVariableCount(usize, usize),
    #[error("expected a constant after normal form, found degree {0:?} terms")]
    NotConstant(Option<u32>),
}

/// Number of verification sample tuples for each rewrite.
const VERIFY_SAMPLES: usize = 50;
const VERIFY_SEED: u64 = 0x5eed_0001;

/// Cartesian expansion of a monomial in the edge variables: the product over
/// edges {a, b} of (x_a . x_b)^e, a polynomial in 3i variables.
pub fn expand_edge_monomial(i: usize, exponents: &Expo, prec: u32) -> SparsePoly {
    let edges = edge_list(i);
    assert_eq!(exponents.0.len(), edges.len());
    let nv = 3 * i;
    let mut acc = SparsePoly::one(nv, prec);
    for (j, &(a, b)) in edges.iter().enumerate() {
        if exponents.0[j] == 0 {
            continue;
        }
        let mut dot = SparsePoly::zero(nv, prec);
        for k in 0..3 {
            let xa = SparsePoly::var(3 * a + k, nv, prec);
            let xb = SparsePoly::var(3 * b + k, nv, prec);
            dot = dot.add(&xa.mul(&xb).unwrap()).unwrap();
        }
        for _ in 0..exponents.0[j] {
            acc = acc.mul(&dot).unwrap();
        }
    }
    acc
}

/// Pivoted dense Cholesky factorization of an SPD matrix at working
/// precision: P M P^T = L L^T with largest-remaining-diagonal pivoting.
pub struct SpdSolver {
    n: usize,
    prec: u32,
    /// permutation: pivot[k] = original index processed at step k
    pivot: Vec<usize>,
    /// lower-triangular factor, row-major lower storage
    l: Vec<Vec<Scalar>>,
}

impl SpdSolver {
    /// Factors a dense symmetric matrix given by a full square accessor.
    pub fn factor(m: &[Vec<Scalar>]) -> Result<SpdSolver, RewriteError> {
        let n = m.len();
        let prec = if n > 0 { m[0][0].prec() } else { 64 };
        let mut perm: Vec<usize> = (0..n).collect();
        // rows indexed by step position, full width
        let mut l: Vec<Vec<Scalar>> = vec![vec![Scalar::zero(prec); n]; n];
        // residual diagonal, indexed by step position
        let mut diag: Vec<Scalar> = (0..n).map(|j| m[j][j].clone()).collect();
        for k in 0..n {
            let mut best = k;
            for j in (k + 1)..n {
                if diag[j] > diag[best] {
                    best = j;
                }
            }
            perm.swap(k, best);
            diag.swap(k, best);
            l.swap(k, best);
            let d = diag[k].clone();
            if !(d > Scalar::zero(prec)) {
                return Err(RewriteError::NotSpd(d.to_f64(), k));
            }
            let dk = d.sqrt();
            let inv = dk.recip();
            l[k][k] = dk;
            for irow in (k + 1)..n {
                let mut v = m[perm[irow]][perm[k]].clone();
                for t in 0..k {
                    v -= &(&l[irow][t] * &l[k][t]);
                }
                let lik = &v * &inv;
                diag[irow] -= &(&lik * &lik);
                l[irow][k] = lik;
            }
        }
        Ok(SpdSolver { n, prec, pivot: perm, l })
    }

    pub fn solve(&self, rhs: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(rhs.len(), self.n);
        let prec = self.prec;
        // forward: L y = P rhs
        let mut y = vec![Scalar::zero(prec); self.n];
        for k in 0..self.n {
            let mut v = rhs[self.pivot[k]].clone();
            for t in 0..k {
                v -= &(&self.l[k][t] * &y[t]);
            }
            y[k] = &v / &self.l[k][k];
        }
        // backward: L^T z = y
        let mut z = vec![Scalar::zero(prec); self.n];
        for k in (0..self.n).rev() {
            let mut v = y[k].clone();
            for t in (k + 1)..self.n {
                v -= &(&self.l[t][k] * &z[t]);
            }
            z[k] = &v / &self.l[k][k];
        }
        // unpermute
        let mut x = vec![Scalar::zero(prec); self.n];
        for k in 0..self.n {
            x[self.pivot[k]] = z[k].clone();
        }
        x
    }
}

/// Convenience wrapper matching the one-shot solve contract.
pub fn pivoted_sparse_cholesky(m: &[Vec<Scalar>], rhs: &[Scalar]) -> Result<Vec<Scalar>, RewriteError> {
    Ok(SpdSolver::factor(m)?.solve(rhs))
}

/// The sparse least-squares system mapping inner-product monomials to
/// normal-form cartesian monomials, with its regularized normal equations
/// factored once and reused for every right-hand side at the same (i, d).
pub struct SparseLinearSystem {
    pub i: usize,
    pub d: u32,
    prec: u32,
    /// u-monomial exponents, graded-lex
    pub columns: Vec<Expo>,
    /// normal-form cartesian monomial -> list of (column, coefficient)
    rows: HashMap<Expo, Vec<(u32, Scalar)>>,
    /// Gram matrix A^T A (dense, symmetric)
    gram: Vec<Vec<Scalar>>,
    solver: SpdSolver,
}

impl SparseLinearSystem {
    /// Assembles columns, the row map, and the factored normal equations
    /// with Tikhonov shift `epsilon` (defaults to 2^(-prec/2) via
    /// [`RewriteContext::new`]).
    pub fn build(i: usize, d: u32, prec: u32, epsilon: &Scalar) -> Result<Self, RewriteError> {
        assert!((2..=4).contains(&i));
        let columns = monomials_up_to(edge_list(i).len(), d as usize);
        let ncols = columns.len();
        let mut rows: HashMap<Expo, Vec<(u32, Scalar)>> = HashMap::new();
        for (j, e) in columns.iter().enumerate() {
            let expanded = sphere_normal_form(&expand_edge_monomial(i, e, prec), i);
            for (re, c) in expanded.terms() {
                rows.entry(re.clone()).or_default().push((j as u32, c.re.clone()));
            }
        }
        let mut gram = vec![vec![Scalar::zero(prec); ncols]; ncols];
        for entries in rows.values() {
            for (a, (ja, ca)) in entries.iter().enumerate() {
                for (jb, cb) in entries.iter().skip(a) {
                    let v = ca * cb;
                    gram[*ja as usize][*jb as usize] += &v;
                    if ja != jb {
                        gram[*jb as usize][*ja as usize] += &v;
                    }
                }
            }
        }
        let mut shifted = gram.clone();
        for (k, row) in shifted.iter_mut().enumerate() {
            row[k] += epsilon;
        }
        let solver = SpdSolver::factor(&shifted)?;
        Ok(SparseLinearSystem { i, d, prec, columns, rows, gram, solver })
    }

    /// A^T applied to the (normal-form, real) polynomial's coefficient vector.
    fn project_rhs(&self, nf: &SparsePoly) -> Vec<Scalar> {
        let mut b = vec![Scalar::zero(self.prec); self.columns.len()];
        for (e, c) in nf.terms() {
            if let Some(entries) = self.rows.get(e) {
                for (j, col_c) in entries {
                    b[*j as usize] += &(col_c * &c.re);
                }
            }
        }
        b
    }

    fn gram_mul(&self, x: &[Scalar]) -> Vec<Scalar> {
        let n = self.columns.len();
        let mut y = vec![Scalar::zero(self.prec); n];
        for (r, row) in self.gram.iter().enumerate() {
            let mut s = Scalar::zero(self.prec);
            for (c, g) in row.iter().enumerate() {
                if !g.is_zero() {
                    s += &(g * &x[c]);
                }
            }
            y[r] = s;
        }
        y
    }

    /// Minimum-norm-style least squares solution with a few refinement
    /// rounds that use the regularized factorization as a preconditioner,
    /// driving the consistent-system residual to working precision.
    pub fn solve_least_squares(&self, nf: &SparsePoly) -> Vec<Scalar> {
        let b = self.project_rhs(nf);
        let mut x = self.solver.solve(&b);
        for _ in 0..6 {
            let gx = self.gram_mul(&x);
            let r: Vec<Scalar> = b.iter().zip(&gx).map(|(bi, gi)| bi - gi).collect();
            let dx = self.solver.solve(&r);
            for (xi, di) in x.iter_mut().zip(&dx) {
                *xi += di;
            }
        }
        x
    }
}

/// Rewrite driver for one particle count and truncation degree.
pub struct RewriteContext {
    pub system: SparseLinearSystem,
}

impl RewriteContext {
    pub fn new(i: usize, d: u32, prec: u32) -> Result<Self, RewriteError> {
        let epsilon = Scalar::exp2(-(prec as i32) / 2, prec);
        Ok(RewriteContext { system: SparseLinearSystem::build(i, d, prec, &epsilon)? })
    }

    /// Rewrites an O(3)-invariant polynomial in 3i cartesian variables as a
    /// polynomial of degree <= d in the C(i,2) pairwise inner products and
    /// verifies the identity at random sphere tuples.
    pub fn rewrite(&self, p: &SparsePoly) -> Result<SparsePoly, RewriteError> {
        let i = self.system.i;
        let prec = self.system.prec;
        if p.nvars() != 3 * i {
            return Err(RewriteError::WrongVariableCount(p.nvars(), 3 * i));
        }
        let nf = sphere_normal_form(p, i);
        let x = self.system.solve_least_squares(&nf);
        let nedges = edge_list(i).len();
        let mut q = SparsePoly::zero(nedges, prec);
        for (j, e) in self.system.columns.iter().enumerate() {
            q.add_term(e.clone(), CScalar::from_real(x[j].clone()));
        }
        // verification at random sphere tuples
        let mut rng = ChaCha8Rng::seed_from_u64(VERIFY_SEED ^ ((i as u64) << 32));
        let tol = cast_tolerance(prec);
        let mut worst = Scalar::zero(prec);
        for _ in 0..VERIFY_SAMPLES {
            let pts: Vec<[Scalar; 3]> = (0..i).map(|_| random_unit_point(&mut rng, prec)).collect();
            let flat: Vec<Scalar> = pts.iter().flat_map(|p| p.iter().cloned()).collect();
            let pv = p.eval(&flat).unwrap();
            let us = pair_inner_products(&pts);
            let qv = q.eval(&us).unwrap();
            worst = worst.max(&(&pv.re - &qv.re).abs());
        }
        if worst > tol {
            return Err(RewriteError::VerificationFailed(worst.to_f64()));
        }
        Ok(q)
    }
}

/// Constant extraction for the degenerate cardinalities 0 and 1: the input
/// must reduce to a constant in sphere normal form.
pub fn constant_rewrite(p: &SparsePoly, points: usize) -> Result<Scalar, RewriteError> {
    let nf = sphere_normal_form(p, points);
    if !nf.is_constant() {
        return Err(RewriteError::NotConstant(nf.degree()));
    }
    Ok(nf.constant_value().re)
}

/// The edge-automorphism image of the vertex symmetric group, re-exported
/// from the group machinery.
pub fn edge_group(i: usize) -> PermGroup {
    edge_action_image(i)
}

/// Group average of q over the edge action: invariant under phi_i(S_i),
/// idempotent, and preserves the on-sphere rewrite identity.
pub fn symmetrize_q(q: &SparsePoly, i: usize) -> SparsePoly {
    let group = edge_action_image(i);
    let prec = q.prec();
    let mut acc = SparsePoly::zero(q.nvars(), prec);
    for g in &group.elements {
        acc = acc.add(&g.point.act_poly(q)).unwrap();
    }
    let inv = Scalar::from_u64(group.order() as u64, prec).recip();
    acc.scale(&inv)
}
