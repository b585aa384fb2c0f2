//! Semialgebraic constraint systems for the 3- and 4-point independent-set
//! regions and their sum-of-squares models: Lukacs univariate branches for
//! the pair constraint and Putinar-style identities for the higher
//! cardinalities, optionally block diagonalized by the edge-permutation
//! symmetry of the generators.

use crate::groups::{
    all_permutations, edge_action_image, edge_list, modified_zonal, monomials_up_to,
    projection_basis, with_irreps, PermGroup,
};
use crate::poly::{drop_tolerance, Expo, SparsePoly};
use crate::scalar::{CScalar, Scalar};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SosError {
    #[error("particle count {0} outside supported range 3..=4")]
    BadCardinality(usize),
    #[error("threshold U = {0} outside (-1, 1)")]
    BadThreshold(f64),
    #[error("group error: {0}")]
    Group(#[from] crate::groups::GroupError),
}

/// Reference to one scalar SDP variable: entry (i, j), i <= j, of a block.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VarId {
    pub block: usize,
    pub i: usize,
    pub j: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BlockKind {
    Psd,
    Diagonal,
}

/// Registry of SDP blocks created during modeling.
#[derive(Default)]
pub struct Blocks {
    pub entries: Vec<(String, usize, BlockKind)>,
}

impl Blocks {
    pub fn add(&mut self, name: impl Into<String>, size: usize, kind: BlockKind) -> usize {
        self.entries.push((name.into(), size, kind));
        self.entries.len() - 1
    }

    pub fn size(&self, block: usize) -> usize {
        self.entries[block].1
    }
}

/// Affine form over SDP variables. Coefficients are the values of the
/// symmetric constraint matrices (off-diagonal entries are stored once and
/// implicitly doubled by the trace inner product).
#[derive(Clone)]
pub struct LinForm {
    pub constant: Scalar,
    pub terms: BTreeMap<VarId, Scalar>,
}

impl LinForm {
    pub fn zero(prec: u32) -> Self {
        LinForm { constant: Scalar::zero(prec), terms: BTreeMap::new() }
    }

    pub fn add_var(&mut self, var: VarId, c: &Scalar) {
        let tol = drop_tolerance(c.prec());
        let entry = self
            .terms
            .entry(var)
            .or_insert_with(|| Scalar::zero(c.prec()));
        *entry += c;
        if entry.abs() <= tol {
            self.terms.remove(&var);
        }
    }

    pub fn add_constant(&mut self, c: &Scalar) {
        self.constant += c;
    }

    pub fn add_scaled(&mut self, other: &LinForm, s: &Scalar) {
        self.constant += &(&other.constant * s);
        for (v, c) in &other.terms {
            self.add_var(*v, &(c * s));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.terms.is_empty()
    }
}

/// Polynomial whose coefficients are affine forms over SDP variables.
pub struct LinPoly {
    pub nvars: usize,
    pub prec: u32,
    pub map: BTreeMap<Expo, LinForm>,
}

impl LinPoly {
    pub fn zero(nvars: usize, prec: u32) -> Self {
        LinPoly { nvars, prec, map: BTreeMap::new() }
    }

    fn form_mut(&mut self, e: Expo) -> &mut LinForm {
        let prec = self.prec;
        self.map.entry(e).or_insert_with(|| LinForm::zero(prec))
    }

    /// Adds `poly * var` (used for kernel blocks: the polynomial is the
    /// rewritten A2 zonal entry attached to one matrix entry).
    pub fn add_poly_times_var(&mut self, poly: &SparsePoly, var: VarId) {
        assert_eq!(poly.nvars(), self.nvars);
        for (e, c) in poly.terms() {
            self.form_mut(e.clone()).add_var(var, &c.re);
        }
    }

    /// Adds a plain polynomial with constant coefficients.
    pub fn add_poly(&mut self, poly: &SparsePoly) {
        assert_eq!(poly.nvars(), self.nvars);
        for (e, c) in poly.terms() {
            self.form_mut(e.clone()).add_constant(&c.re);
        }
    }

    /// Adds `var` on the constant monomial (free scalars like a_i).
    pub fn add_scalar_var(&mut self, var: VarId, coeff: &Scalar) {
        self.form_mut(Expo::zeros(self.nvars)).add_var(var, coeff);
    }

    /// Adds g(u) * v_h(u)^T Q v_h(u) for a fresh PSD block Q over the
    /// monomial basis of degree <= h.
    pub fn add_sos_term(&mut self, g: Option<&SparsePoly>, block: usize, h: usize) {
        let monos = monomials_up_to(self.nvars, h);
        let one = Scalar::one(self.prec);
        for (bi, eb) in monos.iter().enumerate() {
            for (bj, ebp) in monos.iter().enumerate().skip(bi) {
                let var = VarId { block, i: bi, j: bj };
                let prod = eb.add(ebp);
                match g {
                    None => self.form_mut(prod).add_var(var, &one),
                    Some(gp) => {
                        for (ge, gc) in gp.terms() {
                            self.form_mut(prod.add(ge)).add_var(var, &gc.re);
                        }
                    }
                }
            }
        }
    }

    /// Adds sum over matrix entries of W[i][j] * G_{ij} for a symmetric
    /// matrix of polynomials W attached to the PSD block G.
    pub fn add_matrix_poly_term(&mut self, w: &[Vec<SparsePoly>], block: usize) {
        for (i, row) in w.iter().enumerate() {
            for (j, p) in row.iter().enumerate().skip(i) {
                let var = VarId { block, i, j };
                for (e, c) in p.terms() {
                    self.form_mut(e.clone()).add_var(var, &c.re);
                }
            }
        }
    }

    /// In-place multiplication by a constant polynomial.
    pub fn mul_poly(&self, g: &SparsePoly) -> LinPoly {
        let mut out = LinPoly::zero(self.nvars, self.prec);
        for (e, form) in &self.map {
            for (ge, gc) in g.terms() {
                out.form_mut(e.add(ge)).add_scaled(form, &gc.re);
            }
        }
        out
    }

    /// Univariate substitution u -> r(u) (for the w = sqrt(2-2u) rewrite).
    pub fn substitute_univariate(&self, r: &SparsePoly) -> LinPoly {
        assert_eq!(self.nvars, 1);
        let prec = self.prec;
        let max_pow = self.map.keys().map(|e| e.0[0]).max().unwrap_or(0) as usize;
        let mut powers: Vec<SparsePoly> = vec![SparsePoly::one(1, prec)];
        for k in 1..=max_pow {
            powers.push(powers[k - 1].mul(r).unwrap());
        }
        let mut out = LinPoly::zero(1, prec);
        for (e, form) in &self.map {
            for (pe, pc) in powers[e.0[0] as usize].terms() {
                out.form_mut(pe.clone()).add_scaled(form, &pc.re);
            }
        }
        out
    }

    /// Shift every monomial up by w^s (univariate).
    pub fn shift_degree(&self, s: u32) -> LinPoly {
        assert_eq!(self.nvars, 1);
        let mut out = LinPoly::zero(1, self.prec);
        for (e, form) in &self.map {
            let mut ne = e.clone();
            ne.0[0] += s as u16;
            out.map.insert(ne, form.clone());
        }
        out
    }

    pub fn add_assign(&mut self, other: &LinPoly) {
        assert_eq!(self.nvars, other.nvars);
        let one = Scalar::one(self.prec);
        for (e, form) in &other.map {
            self.form_mut(e.clone()).add_scaled(form, &one);
        }
    }
}

/// One linear equality row: sum of entries (as symmetric-matrix values)
/// equals `rhs`.
#[derive(Clone)]
pub struct Row {
    pub entries: Vec<(VarId, Scalar)>,
    pub rhs: Scalar,
}

/// One polynomial identity: the expression (target plus generator-weighted
/// quadratic forms minus the constant side) must vanish coefficientwise.
pub struct SosIdentity {
    pub expression: LinPoly,
}

/// Equates every monomial coefficient to zero: one row per monomial, in
/// graded-lex order.
pub fn assemble_identity_rows(identity: &SosIdentity) -> Vec<Row> {
    let mut rows = Vec::new();
    for form in identity.expression.map.values() {
        if form.is_zero() {
            continue;
        }
        rows.push(Row {
            entries: form.terms.iter().map(|(v, c)| (*v, c.clone())).collect(),
            rhs: form.constant.neg(),
        });
    }
    rows
}

/// Semialgebraic description of the i-point independent-set region in the
/// inner-product variables: edge bounds U - u_j, principal minors of the
/// Gram matrix E(u) of orders 2..min(i,3) as inequalities, and (for i = 4)
/// the determinant as an equality.
pub struct SemialgebraicSet {
    pub i: usize,
    pub threshold: Scalar,
    pub edge_bounds: Vec<SparsePoly>,
    pub minors2: Vec<SparsePoly>,
    pub minors3: Vec<SparsePoly>,
    pub det_equality: Option<SparsePoly>,
}

impl SemialgebraicSet {
    pub fn inequality_generators(&self) -> Vec<&SparsePoly> {
        self.edge_bounds
            .iter()
            .chain(self.minors2.iter())
            .chain(self.minors3.iter())
            .collect()
    }

    pub fn equality_generators(&self) -> Vec<&SparsePoly> {
        self.det_equality.iter().collect()
    }
}

/// Determinant of the principal submatrix of E(u) on the given vertex
/// subset, expanded over permutations.
pub fn principal_minor(i: usize, verts: &[usize], prec: u32) -> SparsePoly {
    let nedges = edge_list(i).len();
    let k = verts.len();
    let entry = |a: usize, b: usize| -> SparsePoly {
        if a == b {
            SparsePoly::one(nedges, prec)
        } else {
            SparsePoly::var(crate::groups::edge_index(i, verts[a], verts[b]), nedges, prec)
        }
    };
    let mut det = SparsePoly::zero(nedges, prec);
    for perm in all_permutations(k) {
        let mut prod = SparsePoly::one(nedges, prec);
        for a in 0..k {
            prod = prod.mul(&entry(a, perm.0[a])).unwrap();
        }
        // permutation sign from cycle structure
        let sign: i64 = perm
            .cycle_lengths()
            .iter()
            .map(|&c| if c % 2 == 0 { -1 } else { 1 })
            .product();
        if sign < 0 {
            prod = prod.neg();
        }
        det = det.add(&prod).unwrap();
    }
    det
}

/// Builds the semialgebraic description of P_i for i in {3, 4}.
pub fn build_p(i: usize, threshold: &Scalar) -> Result<SemialgebraicSet, SosError> {
    if !(3..=4).contains(&i) {
        return Err(SosError::BadCardinality(i));
    }
    let prec = threshold.prec();
    let uf = threshold.to_f64();
    if !(-1.0..1.0).contains(&uf) {
        return Err(SosError::BadThreshold(uf));
    }
    let nedges = edge_list(i).len();
    let edge_bounds = (0..nedges)
        .map(|j| {
            SparsePoly::constant(CScalar::from_real(threshold.clone()), nedges)
                .sub(&SparsePoly::var(j, nedges, prec))
                .unwrap()
        })
        .collect();
    let mut minors2 = Vec::new();
    let mut minors3 = Vec::new();
    for a in 0..i {
        for b in (a + 1)..i {
            minors2.push(principal_minor(i, &[a, b], prec));
        }
    }
    for a in 0..i {
        for b in (a + 1)..i {
            for c in (b + 1)..i {
                minors3.push(principal_minor(i, &[a, b, c], prec));
            }
        }
    }
    let det_equality = if i == 4 {
        Some(principal_minor(4, &[0, 1, 2, 3], prec))
    } else {
        None
    };
    Ok(SemialgebraicSet {
        i,
        threshold: threshold.clone(),
        edge_bounds,
        minors2,
        minors3,
        det_equality,
    })
}

/// Truncated-module SOS degree for a generator: h = floor((delta - deg g)/2),
/// or None when the generator cannot appear at this delta.
pub fn generator_sos_degree(delta: u32, deg_g: u32) -> Option<usize> {
    if delta < deg_g {
        None
    } else {
        Some(((delta - deg_g) / 2) as usize)
    }
}

/// The pair-constraint identity. For odd s the substitution w = sqrt(2-2u)
/// turns the constraint into an odd-degree interval nonnegativity on
/// [sqrt(2-2U), 2] with exact Lukacs degrees h1 = (2d+s-1)/2; for even s the
/// constraint stays in u on [-1, U] with the degree-matched parity branches.
/// The produced identity reads: transformed q2 plus the multiplier terms
/// equals the constant 1.
pub fn lukacs_pair_identity(
    s: u32,
    d: u32,
    threshold: &Scalar,
    q2: &LinPoly,
    blocks: &mut Blocks,
) -> SosIdentity {
    assert!(s >= 1);
    let prec = q2.prec;
    let one = Scalar::one(prec);
    let mut expr;
    if s % 2 == 1 {
        // odd s: work in w; q2(1 - w^2/2) * w^s
        let repl = {
            let w = SparsePoly::var(0, 1, prec);
            let half = Scalar::from_rational(&rug::Rational::from((1, 2)), prec);
            SparsePoly::one(1, prec)
                .sub(&w.mul(&w).unwrap().scale(&half))
                .unwrap()
        };
        expr = q2.substitute_univariate(&repl).shift_degree(s);
        let h1 = ((2 * d + s - 1) / 2) as usize;
        let q21 = blocks.add("Q2_1", h1 + 1, BlockKind::Psd);
        let q22 = blocks.add("Q2_2", h1 + 1, BlockKind::Psd);
        // (w - sqrt(2-2U)) and (2 - w)
        let w = SparsePoly::var(0, 1, prec);
        let wmin = (&(&one + &one) - &(threshold + threshold)).sqrt();
        let g1 = w
            .sub(&SparsePoly::constant(CScalar::from_real(wmin), 1))
            .unwrap();
        let g2 = SparsePoly::constant(CScalar::from_real(&one + &one), 1)
            .sub(&w)
            .unwrap();
        expr.add_sos_term(Some(&g1), q21, h1);
        expr.add_sos_term(Some(&g2), q22, h1);
    } else {
        // even s: (2-2u)^{s/2} q2(u)
        let u = SparsePoly::var(0, 1, prec);
        let two_minus_2u = SparsePoly::constant(CScalar::from_real(&one + &one), 1)
            .sub(&u.scale(&(&one + &one)))
            .unwrap();
        let mut factor = SparsePoly::one(1, prec);
        for _ in 0..(s / 2) {
            factor = factor.mul(&two_minus_2u).unwrap();
        }
        expr = q2.mul_poly(&factor);
        let bigd = s / 2 + d;
        let u_plus_1 = u
            .add(&SparsePoly::one(1, prec))
            .unwrap();
        let u_minus_thr = SparsePoly::constant(CScalar::from_real(threshold.clone()), 1)
            .sub(&u)
            .unwrap();
        if bigd % 2 == 0 {
            let h2 = (bigd / 2) as usize;
            let h3 = h2 - 1;
            let q21 = blocks.add("Q2_1", h2 + 1, BlockKind::Psd);
            let q22 = blocks.add("Q2_2", h3 + 1, BlockKind::Psd);
            expr.add_sos_term(None, q21, h2);
            let g = u_plus_1.mul(&u_minus_thr).unwrap();
            expr.add_sos_term(Some(&g), q22, h3);
        } else {
            let h4 = ((bigd - 1) / 2) as usize;
            let q21 = blocks.add("Q2_1", h4 + 1, BlockKind::Psd);
            let q22 = blocks.add("Q2_2", h4 + 1, BlockKind::Psd);
            expr.add_sos_term(Some(&u_plus_1), q21, h4);
            expr.add_sos_term(Some(&u_minus_thr), q22, h4);
        }
    }
    // ... = 1
    expr.form_mut(Expo::zeros(1)).add_constant(&Scalar::from_i64(-1, prec));
    SosIdentity { expression: expr }
}

/// Sign-split free coefficients attached to the determinant equality:
/// the created diagonal blocks hold the positive and negative parts.
pub struct DetMultiplier {
    pub monomials: Vec<Expo>,
    pub plus_block: usize,
    pub minus_block: usize,
}

/// Putinar-style identity q_i + sum_g g * sigma_g (+ det * free part) = 0.
/// With symmetry on, each generator orbit shares one family of per-irrep
/// blocks built from the stabilizer's symmetry-adapted monomial basis, and
/// the orbit's terms are the conjugated copies of the representative's.
pub fn putinar_identity(
    set: &SemialgebraicSet,
    q: &LinPoly,
    delta: u32,
    symmetry: bool,
    blocks: &mut Blocks,
) -> Result<(SosIdentity, Option<DetMultiplier>), SosError> {
    let i = set.i;
    let prec = q.prec;
    let nedges = edge_list(i).len();
    assert_eq!(q.nvars, nedges);
    let mut expr = LinPoly::zero(nedges, prec);
    expr.add_assign(q);

    let prefix = format!("Q{}", i);
    // generator families: (name, orbit of generators, degree)
    let one_poly = SparsePoly::one(nedges, prec);
    let families: Vec<(String, Vec<&SparsePoly>, u32)> = vec![
        (prefix.clone(), vec![&one_poly], 0),
        (format!("{}_edge", prefix), set.edge_bounds.iter().collect(), 1),
        (format!("{}_m2", prefix), set.minors2.iter().collect(), 2),
        (format!("{}_m3", prefix), set.minors3.iter().collect(), 3),
    ];

    let group = edge_action_image(i);
    for (name, gens, deg_g) in &families {
        let Some(h) = generator_sos_degree(delta, *deg_g) else {
            continue;
        };
        if !symmetry {
            for (gi, g) in gens.iter().enumerate() {
                let bname = if gens.len() == 1 {
                    name.clone()
                } else {
                    format!("{}_{}", name, gi)
                };
                let dim = monomials_up_to(nedges, h).len();
                let b = blocks.add(bname, dim, BlockKind::Psd);
                let gref = if g.is_constant() && g.constant_value().re == Scalar::one(prec) {
                    None
                } else {
                    Some(*g)
                };
                expr.add_sos_term(gref, b, h);
            }
        } else {
            // orbit sharing: one block family per orbit, stabilized basis
            let rep_gen = gens[0];
            // each family is a single orbit of the edge action
            let orbit = orbit_with_reps(&group, rep_gen);
            debug_assert_eq!(orbit.len(), gens.len(), "family {} not a single orbit", name);
            let stab = group.stabilizer(rep_gen);
            debug_assert_eq!(orbit.len() * stab.order(), group.order());
            let rep = with_irreps(stab, prec)?;
            let basis = projection_basis(&rep, h, prec)?;
            let zonal = modified_zonal(&basis);
            for (pi, z) in zonal.iter().enumerate() {
                let m = z.len();
                if m == 0 {
                    continue;
                }
                let b = blocks.add(format!("{}_pi{}", name, pi), m, BlockKind::Psd);
                // orbit sum of conjugated generator * zonal entries
                let mut w: Vec<Vec<SparsePoly>> = vec![vec![SparsePoly::zero(nedges, prec); m]; m];
                for (gamma, gpoly) in &orbit {
                    for (r, zrow) in z.iter().enumerate() {
                        for (c, zp) in zrow.iter().enumerate().skip(r) {
                            let term = gamma.act_poly(&gpoly.mul(zp).unwrap());
                            w[r][c] = w[r][c].add(&term).unwrap();
                        }
                    }
                }
                expr.add_matrix_poly_term(&w, b);
            }
        }
    }

    // determinant equality with sign-split free coefficients
    let mut det_mult = None;
    if let Some(det) = &set.det_equality {
        if delta >= 6 {
            let monos = monomials_up_to(nedges, (delta - 6) as usize);
            let n = monos.len();
            let plus = blocks.add(format!("{}_detp", prefix), n, BlockKind::Diagonal);
            let minus = blocks.add(format!("{}_detm", prefix), n, BlockKind::Diagonal);
            for (k, alpha) in monos.iter().enumerate() {
                let mut mono = SparsePoly::zero(nedges, prec);
                mono.add_term(alpha.clone(), CScalar::one(prec));
                let dm = det.mul(&mono).unwrap();
                for (e, c) in dm.terms() {
                    expr.form_mut(e.clone())
                        .add_var(VarId { block: plus, i: k, j: k }, &c.re);
                    expr.form_mut(e.clone())
                        .add_var(VarId { block: minus, i: k, j: k }, &c.re.neg());
                }
            }
            det_mult = Some(DetMultiplier { monomials: monos, plus_block: plus, minus_block: minus });
        }
    }
    Ok((SosIdentity { expression: expr }, det_mult))
}

/// The orbit of a generator under the group, with one coset representative
/// (first in element order) per distinct image. The generator's conjugated
/// copy for representative gamma is act(gamma, g).
fn orbit_with_reps<'a>(
    group: &'a PermGroup,
    g: &SparsePoly,
) -> Vec<(&'a crate::groups::Perm, SparsePoly)> {
    let mut images: Vec<SparsePoly> = Vec::new();
    let mut out: Vec<(&crate::groups::Perm, SparsePoly)> = Vec::new();
    for elem in &group.elements {
        let img = elem.point.act_poly(g);
        if !images.iter().any(|p| p.sub(&img).unwrap().is_zero()) {
            images.push(img);
            out.push((&elem.point, g.clone()));
        }
    }
    out
}
