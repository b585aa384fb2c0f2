//! Finite permutation groups acting on edge variables, their orthogonal
//! irreducible representations (Young's orthogonal form for symmetric
//! groups), Molien multiplicities, and the projection algorithm producing
//! symmetry-adapted monomial bases for SOS block diagonalization.

use crate::poly::{Expo, SparsePoly};
use crate::scalar::{CScalar, Scalar};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("unsupported group structure (order {0})")]
    Unsupported(usize),
    #[error("n = {0} outside supported range 1..=4")]
    DegreeOutOfRange(usize),
    #[error("Molien multiplicity not an integer: {0}")]
    NonIntegerMultiplicity(f64),
    #[error("projection rank {0} disagrees with Molien multiplicity {1}")]
    RankMismatch(usize, usize),
}

/// Permutation in image form: `images[v]` is where point `v` goes.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Perm(pub Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    pub fn compose(&self, then: &Perm) -> Perm {
        // apply self first, then `then`
        Perm(self.0.iter().map(|&v| then.0[v]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (v, &w) in self.0.iter().enumerate() {
            inv[w] = v;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(v, &w)| v == w)
    }

    pub fn cycle_lengths(&self) -> Vec<usize> {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut v = start;
            while !seen[v] {
                seen[v] = true;
                v = self.0[v];
                len += 1;
            }
            out.push(len);
        }
        out
    }

    /// Renames variable v to images[v] in the exponent vector.
    pub fn act_expo(&self, e: &Expo) -> Expo {
        let mut ne = vec![0u16; e.0.len()];
        for (v, &exp) in e.0.iter().enumerate() {
            ne[self.0[v]] = exp;
        }
        Expo(ne)
    }

    pub fn act_poly(&self, p: &SparsePoly) -> SparsePoly {
        let mut r = SparsePoly::zero(p.nvars(), p.prec());
        for (e, c) in p.terms() {
            r.add_term(self.act_expo(e), c.clone());
        }
        r
    }
}

/// All permutations of [n] in lexicographic order of image vectors.
pub fn all_permutations(n: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(Perm(cur.clone()));
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

/// One group element: the abstract vertex permutation and its action on the
/// variable points (edges, for the groups used here).
#[derive(Clone, Debug)]
pub struct GroupElement {
    pub vertex: Perm,
    pub point: Perm,
}

/// Finite permutation group on `degree` variable points.
#[derive(Clone)]
pub struct PermGroup {
    pub degree: usize,
    pub elements: Vec<GroupElement>,
}

impl PermGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Identity must be present and the element set closed; cheap sanity used
    /// in tests and at stabilizer construction.
    pub fn is_closed(&self) -> bool {
        let set: std::collections::HashSet<&Perm> =
            self.elements.iter().map(|e| &e.point).collect();
        if !self.elements.iter().any(|e| e.point.is_identity()) {
            return false;
        }
        for a in &self.elements {
            for b in &self.elements {
                if !set.contains(&a.point.compose(&b.point)) {
                    return false;
                }
            }
        }
        true
    }

    /// Subgroup whose point action fixes the polynomial coefficientwise.
    pub fn stabilizer(&self, poly: &SparsePoly) -> PermGroup {
        let elements = self
            .elements
            .iter()
            .filter(|g| g.point.act_poly(poly).sub(poly).unwrap().is_zero())
            .cloned()
            .collect();
        PermGroup { degree: self.degree, elements }
    }
}

/// Lexicographically ordered edges {a, b}, a < b, of the complete graph K_i.
pub fn edge_list(i: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..i {
        for b in (a + 1)..i {
            out.push((a, b));
        }
    }
    out
}

pub fn edge_index(i: usize, a: usize, b: usize) -> usize {
    let (a, b) = (a.min(b), a.max(b));
    edge_list(i).iter().position(|&e| e == (a, b)).unwrap()
}

/// The image of S_i inside the edge-automorphism group of K_i: every vertex
/// permutation together with its induced permutation of the edges.
pub fn edge_action_image(i: usize) -> PermGroup {
    assert!((2..=4).contains(&i));
    let edges = edge_list(i);
    let elements = all_permutations(i)
        .into_iter()
        .map(|vp| {
            let point = Perm(
                edges
                    .iter()
                    .map(|&(a, b)| edge_index(i, vp.0[a], vp.0[b]))
                    .collect(),
            );
            GroupElement { vertex: vp, point }
        })
        .collect();
    PermGroup { degree: edges.len(), elements }
}

/// Real orthogonal irreducible representation: one matrix per group element,
/// parallel to `PermGroup::elements`.
pub struct OrthoIrrep {
    pub dim: usize,
    /// mats[element][row][col]
    pub mats: Vec<Vec<Vec<Scalar>>>,
}

impl OrthoIrrep {
    pub fn trace(&self, elem: usize) -> Scalar {
        let prec = self.mats[elem][0][0].prec();
        let mut t = Scalar::zero(prec);
        for k in 0..self.dim {
            t += &self.mats[elem][k][k];
        }
        t
    }

    /// Exact integer character value.
    pub fn char_i64(&self, elem: usize) -> i64 {
        let t = self.trace(elem);
        let r = t.round_i64();
        assert!(
            (&t - &Scalar::from_i64(r, t.prec())).abs().to_f64() < 1e-6,
            "non-integer character"
        );
        r
    }
}

fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=max.min(n)).rev() {
            cur.push(k);
            rec(n - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

type Tableau = Vec<Vec<usize>>;

fn standard_tableaux(shape: &[usize]) -> Vec<Tableau> {
    let n: usize = shape.iter().sum();
    let mut out = Vec::new();
    let mut t: Tableau = shape.iter().map(|&r| Vec::with_capacity(r)).collect();
    fn rec(k: usize, n: usize, shape: &[usize], t: &mut Tableau, out: &mut Vec<Tableau>) {
        if k > n {
            out.push(t.clone());
            return;
        }
        for r in 0..shape.len() {
            if t[r].len() < shape[r] && (r == 0 || t[r - 1].len() > t[r].len()) {
                t[r].push(k);
                rec(k + 1, n, shape, t, out);
                t[r].pop();
            }
        }
    }
    rec(1, n, shape, &mut t, &mut out);
    out
}

fn tableau_position(t: &Tableau, v: usize) -> (usize, usize) {
    for (r, row) in t.iter().enumerate() {
        if let Some(c) = row.iter().position(|&x| x == v) {
            return (r, c);
        }
    }
    unreachable!()
}

/// Matrix of the adjacent transposition (k, k+1), 1-based k, in Young's
/// orthogonal form on the standard tableaux of the given shape.
fn yof_transposition(tabs: &[Tableau], k: usize, prec: u32) -> Vec<Vec<Scalar>> {
    let dim = tabs.len();
    let mut m = vec![vec![Scalar::zero(prec); dim]; dim];
    let index: HashMap<&Tableau, usize> = tabs.iter().zip(0..).collect();
    for (ti, t) in tabs.iter().enumerate() {
        let (r1, c1) = tableau_position(t, k);
        let (r2, c2) = tableau_position(t, k + 1);
        // signed axial distance from k to k+1
        let d = (c2 as i64 - r2 as i64) - (c1 as i64 - r1 as i64);
        let rho = Scalar::from_i64(d.signum(), prec)
            / Scalar::from_i64(d.abs(), prec);
        m[ti][ti] = rho.clone();
        if d.abs() > 1 {
            // swapping k and k+1 keeps the tableau standard
            let mut t2 = t.clone();
            t2[r1][c1] = k + 1;
            t2[r2][c2] = k;
            let tj = index[&t2];
            let off = (&Scalar::one(prec) - &(&rho * &rho)).sqrt();
            m[ti][tj] = off;
        }
    }
    m
}

fn mat_mul(a: &[Vec<Scalar>], b: &[Vec<Scalar>], prec: u32) -> Vec<Vec<Scalar>> {
    let n = a.len();
    let mut out = vec![vec![Scalar::zero(prec); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut s = Scalar::zero(prec);
            for k in 0..n {
                s += &(&a[i][k] * &b[k][j]);
            }
            out[i][j] = s;
        }
    }
    out
}

fn identity_mat(n: usize, prec: u32) -> Vec<Vec<Scalar>> {
    let mut m = vec![vec![Scalar::zero(prec); n]; n];
    for (k, row) in m.iter_mut().enumerate() {
        row[k] = Scalar::one(prec);
    }
    m
}

/// Decomposes a permutation into adjacent transpositions s_k = (k, k+1),
/// 1-based, such that composing them left to right gives the permutation.
fn adjacent_factorization(p: &Perm) -> Vec<usize> {
    let mut imgs = p.0.clone();
    let n = imgs.len();
    let mut word = Vec::new();
    // bubble sort: each swap of positions (k, k+1) multiplies by s_{k+1} on
    // the left of the remaining word; collecting in reverse order yields a
    // factorization of p itself.
    loop {
        let mut swapped = false;
        for k in 0..n.saturating_sub(1) {
            if imgs[k] > imgs[k + 1] {
                imgs.swap(k, k + 1);
                word.push(k + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    word.reverse();
    word
}

/// Complete list of inequivalent orthogonal irreps of S_n for n <= 4,
/// with matrices indexed parallel to the given element list (vertex perms
/// on a support relabeled to 0..n-1).
fn symmetric_group_irreps(
    vertex_perms: &[Perm],
    n: usize,
    prec: u32,
) -> Result<Vec<OrthoIrrep>, GroupError> {
    if n == 0 || n > 4 {
        return Err(GroupError::DegreeOutOfRange(n));
    }
    let mut irreps = Vec::new();
    for shape in partitions(n) {
        let tabs = standard_tableaux(&shape);
        let dim = tabs.len();
        let gens: Vec<Vec<Vec<Scalar>>> = (1..n)
            .map(|k| yof_transposition(&tabs, k, prec))
            .collect();
        let mats = vertex_perms
            .iter()
            .map(|p| {
                let mut m = identity_mat(dim, prec);
                for k in adjacent_factorization(p) {
                    m = mat_mul(&m, &gens[k - 1], prec);
                }
                m
            })
            .collect();
        irreps.push(OrthoIrrep { dim, mats });
    }
    Ok(irreps)
}

/// Young's orthogonal form irreps of S_n on its natural element list (all
/// n! permutations in lexicographic order).
pub fn young_irreps(n: usize, prec: u32) -> Result<Vec<OrthoIrrep>, GroupError> {
    symmetric_group_irreps(&all_permutations(n), n, prec)
}

/// A group together with a complete set of real orthogonal irreps.
pub struct RepGroup {
    pub group: PermGroup,
    pub irreps: Vec<OrthoIrrep>,
}

/// Constructs the irreps of the groups arising as generator stabilizers in
/// this pipeline: trivial, Z2, the Klein four group, and (relabeled copies
/// of) S_3 and S_4.
pub fn with_irreps(group: PermGroup, prec: u32) -> Result<RepGroup, GroupError> {
    let order = group.order();
    let irreps = match order {
        1 => vec![OrthoIrrep { dim: 1, mats: vec![vec![vec![Scalar::one(prec)]]] }],
        2 => {
            let mats = |vals: [i64; 2]| {
                group
                    .elements
                    .iter()
                    .map(|g| {
                        let v = if g.point.is_identity() { vals[0] } else { vals[1] };
                        vec![vec![Scalar::from_i64(v, prec)]]
                    })
                    .collect()
            };
            vec![
                OrthoIrrep { dim: 1, mats: mats([1, 1]) },
                OrthoIrrep { dim: 1, mats: mats([1, -1]) },
            ]
        }
        4 => klein_irreps(&group, prec)?,
        6 | 24 => relabeled_symmetric_irreps(&group, prec)?,
        _ => return Err(GroupError::Unsupported(order)),
    };
    Ok(RepGroup { group, irreps })
}

fn klein_irreps(group: &PermGroup, prec: u32) -> Result<Vec<OrthoIrrep>, GroupError> {
    // all non-identity elements must be involutions
    for g in &group.elements {
        if !g.point.compose(&g.point).is_identity() {
            return Err(GroupError::Unsupported(4));
        }
    }
    let nonid: Vec<usize> = (0..4)
        .filter(|&k| !group.elements[k].point.is_identity())
        .collect();
    if nonid.len() != 3 {
        return Err(GroupError::Unsupported(4));
    }
    let (a, b) = (nonid[0], nonid[1]);
    let ab = group.elements[a].point.compose(&group.elements[b].point);
    let mut irreps = Vec::new();
    for (s, t) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
        let mats = group
            .elements
            .iter()
            .map(|g| {
                let v = if g.point.is_identity() {
                    1
                } else if g.point == group.elements[a].point {
                    s
                } else if g.point == group.elements[b].point {
                    t
                } else {
                    debug_assert!(g.point == ab);
                    s * t
                };
                vec![vec![Scalar::from_i64(v, prec)]]
            })
            .collect();
        irreps.push(OrthoIrrep { dim: 1, mats });
    }
    Ok(irreps)
}

/// Irreps for subgroups that are symmetric groups on their moved points
/// (S_3 and S_4 copies inside vertex permutation groups).
fn relabeled_symmetric_irreps(
    group: &PermGroup,
    prec: u32,
) -> Result<Vec<OrthoIrrep>, GroupError> {
    let nverts = group.elements[0].vertex.0.len();
    let mut moved: Vec<usize> = (0..nverts)
        .filter(|&v| group.elements.iter().any(|g| g.vertex.0[v] != v))
        .collect();
    moved.sort_unstable();
    let n = moved.len();
    let expected = match group.order() {
        6 => 3,
        24 => 4,
        _ => return Err(GroupError::Unsupported(group.order())),
    };
    if n != expected {
        return Err(GroupError::Unsupported(group.order()));
    }
    let pos: HashMap<usize, usize> = moved.iter().cloned().zip(0..).collect();
    let relabeled: Vec<Perm> = group
        .elements
        .iter()
        .map(|g| Perm(moved.iter().map(|&v| pos[&g.vertex.0[v]]).collect()))
        .collect();
    symmetric_group_irreps(&relabeled, n, prec)
}

/// Multiplicity of each irrep in each homogeneous degree of the polynomial
/// ring on the group's variable points.
pub struct MolienTable {
    pub max_degree: usize,
    /// m[irrep][k]
    pub m: Vec<Vec<u64>>,
}

impl MolienTable {
    /// Total multiplicity of irrep `pi` over degrees 0..=h.
    pub fn cumulative(&self, pi: usize, h: usize) -> u64 {
        self.m[pi][..=h.min(self.max_degree)].iter().sum()
    }
}

/// Molien series multiplicities, exactly, via the cycle-index form of
/// 1/det(I - t L(gamma)) for permutation actions.
pub fn molien(rep: &RepGroup, max_degree: usize) -> Result<MolienTable, GroupError> {
    let order = rep.group.order() as i128;
    let mut m = Vec::new();
    // coefficient table per element of 1/prod(1 - t^c)
    let coefs: Vec<Vec<i128>> = rep
        .group
        .elements
        .iter()
        .map(|g| {
            let mut series = vec![0i128; max_degree + 1];
            series[0] = 1;
            for c in g.point.cycle_lengths() {
                // multiply by 1/(1 - t^c): prefix sums with stride c
                for k in c..=max_degree {
                    series[k] += series[k - c];
                }
            }
            series
        })
        .collect();
    for irrep in &rep.irreps {
        let chars: Vec<i128> = (0..rep.group.order())
            .map(|e| irrep.char_i64(e) as i128)
            .collect();
        let mut row = Vec::with_capacity(max_degree + 1);
        for k in 0..=max_degree {
            let sum: i128 = (0..rep.group.order()).map(|e| chars[e] * coefs[e][k]).sum();
            if sum % order != 0 || sum < 0 {
                return Err(GroupError::NonIntegerMultiplicity(sum as f64 / order as f64));
            }
            row.push((sum / order) as u64);
        }
        m.push(row);
    }
    Ok(MolienTable { max_degree, m })
}

/// Symmetry-adapted basis of the monomial space of degree <= h: for each
/// irrep, a list of orbits, each carrying d_pi polynomials.
pub struct SymmetryAdaptedMonomialBasis {
    pub nvars: usize,
    pub h: usize,
    /// orbits[irrep][orbit][j], j < d_pi
    pub orbits: Vec<Vec<Vec<SparsePoly>>>,
}

impl SymmetryAdaptedMonomialBasis {
    pub fn total_functions(&self) -> usize {
        self.orbits
            .iter()
            .map(|per_irrep| per_irrep.iter().map(|o| o.len()).sum::<usize>())
            .sum()
    }
}

/// Monomial exponent vectors of degree exactly k in graded-lex order.
pub fn monomials_of_degree(nvars: usize, k: usize) -> Vec<Expo> {
    let mut out = Vec::new();
    let mut cur = vec![0u16; nvars];
    fn rec(v: usize, left: usize, cur: &mut Vec<u16>, nvars: usize, out: &mut Vec<Expo>) {
        if v == nvars {
            if left == 0 {
                out.push(Expo(cur.clone()));
            }
            return;
        }
        for e in 0..=left {
            cur[v] = e as u16;
            rec(v + 1, left - e, cur, nvars, out);
            cur[v] = 0;
        }
    }
    rec(0, k, &mut cur, nvars, &mut out);
    out.sort();
    out
}

/// Monomials of degree <= h in graded-lex order.
pub fn monomials_up_to(nvars: usize, h: usize) -> Vec<Expo> {
    (0..=h).flat_map(|k| monomials_of_degree(nvars, k)).collect()
}

/// The projection algorithm: orthonormal bases of Im(p^pi_{1,1}) per degree,
/// completed to orbits via p^pi_{j,1}. Per-irrep counts are checked against
/// the Molien multiplicities.
pub fn projection_basis(
    rep: &RepGroup,
    h: usize,
    prec: u32,
) -> Result<SymmetryAdaptedMonomialBasis, GroupError> {
    let nvars = rep.group.degree;
    let table = molien(rep, h)?;
    let order = rep.group.order();
    let inv_index: Vec<usize> = rep
        .group
        .elements
        .iter()
        .map(|g| {
            let inv = g.point.inverse();
            rep.group
                .elements
                .iter()
                .position(|h| h.point == inv)
                .expect("group not closed under inverse")
        })
        .collect();
    let mut orbits: Vec<Vec<Vec<SparsePoly>>> = vec![Vec::new(); rep.irreps.len()];
    for k in 0..=h {
        let monos = monomials_of_degree(nvars, k);
        let dim = monos.len();
        let mono_index: HashMap<&Expo, usize> = monos.iter().zip(0..).collect();
        // permutation action on monomial indices
        let actions: Vec<Vec<usize>> = rep
            .group
            .elements
            .iter()
            .map(|g| monos.iter().map(|e| mono_index[&g.point.act_expo(e)]).collect())
            .collect();
        for (pi, irrep) in rep.irreps.iter().enumerate() {
            let want = table.m[pi][k] as usize;
            if want == 0 {
                continue;
            }
            let dpi = irrep.dim;
            let scale = Scalar::from_u64(dpi as u64, prec) / Scalar::from_u64(order as u64, prec);
            // p^pi_{j,1} as dense matrices over the degree-k monomials;
            // the transfer operator carries pi(gamma^-1)_{1,j}
            let proj = |j: usize| -> Vec<Vec<Scalar>> {
                let mut m = vec![vec![Scalar::zero(prec); dim]; dim];
                for (e, act) in actions.iter().enumerate() {
                    let w = &irrep.mats[inv_index[e]][0][j] * &scale;
                    if w.is_zero() {
                        continue;
                    }
                    for (src, &dst) in act.iter().enumerate() {
                        m[dst][src] += &w;
                    }
                }
                m
            };
            let p11 = proj(0);
            // orthonormal basis of the column space by modified Gram-Schmidt
            let mut basis: Vec<Vec<Scalar>> = Vec::new();
            let tol = Scalar::exp2(-(prec as i32) / 4, prec);
            for col in 0..dim {
                let mut v: Vec<Scalar> = (0..dim).map(|r| p11[r][col].clone()).collect();
                for b in &basis {
                    let mut dot = Scalar::zero(prec);
                    for (x, y) in v.iter().zip(b) {
                        dot += &(x * y);
                    }
                    for (x, y) in v.iter_mut().zip(b) {
                        *x -= &(y * &dot);
                    }
                }
                let mut n2 = Scalar::zero(prec);
                for x in &v {
                    n2 += &(x * x);
                }
                let n = n2.sqrt();
                if n > tol {
                    let inv = n.recip();
                    basis.push(v.into_iter().map(|x| &x * &inv).collect());
                }
                if basis.len() == want {
                    break;
                }
            }
            if basis.len() != want {
                return Err(GroupError::RankMismatch(basis.len(), want));
            }
            let to_poly = |v: &[Scalar]| -> SparsePoly {
                let mut p = SparsePoly::zero(nvars, prec);
                for (idx, c) in v.iter().enumerate() {
                    p.add_term(monos[idx].clone(), CScalar::from_real(c.clone()));
                }
                p
            };
            for e1 in &basis {
                let mut orbit = vec![to_poly(e1)];
                for j in 1..dpi {
                    let pj1 = proj(j);
                    let mut v = vec![Scalar::zero(prec); dim];
                    for (r, row) in pj1.iter().enumerate() {
                        let mut s = Scalar::zero(prec);
                        for (c, x) in e1.iter().enumerate() {
                            s += &(&row[c] * x);
                        }
                        v[r] = s;
                    }
                    orbit.push(to_poly(&v));
                }
                orbits[pi].push(orbit);
            }
        }
    }
    Ok(SymmetryAdaptedMonomialBasis { nvars, h, orbits })
}

/// Modified zonal matrices: per irrep, the m x m matrix of polynomials
/// Z[i][i'] = sum_j e_{i,j} e_{i',j}, so that any PSD coefficient matrix
/// yields a group-invariant sum of squares.
pub fn modified_zonal(basis: &SymmetryAdaptedMonomialBasis) -> Vec<Vec<Vec<SparsePoly>>> {
    basis
        .orbits
        .iter()
        .map(|per_irrep| {
            let m = per_irrep.len();
            let mut z: Vec<Vec<SparsePoly>> = Vec::with_capacity(m);
            for i in 0..m {
                let mut row = Vec::with_capacity(m);
                for ip in 0..m {
                    let mut acc = SparsePoly::zero(basis.nvars, per_irrep[i][0].prec());
                    for j in 0..per_irrep[i].len() {
                        acc = acc
                            .add(&per_irrep[i][j].mul(&per_irrep[ip][j]).unwrap())
                            .unwrap();
                    }
                    row.push(acc);
                }
                z.push(row);
            }
            z
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::cast_tolerance;
    use crate::scalar::DEFAULT_PRECISION as P;

    #[test]
    fn edge_groups() {
        let g2 = edge_action_image(2);
        assert_eq!(g2.degree, 1);
        assert_eq!(g2.order(), 2);
        let g3 = edge_action_image(3);
        assert_eq!((g3.degree, g3.order()), (3, 6));
        assert!(g3.is_closed());
        let g4 = edge_action_image(4);
        assert_eq!((g4.degree, g4.order()), (6, 24));
        assert!(g4.is_closed());
        // phi_4 is injective: all edge perms distinct
        let set: std::collections::HashSet<_> = g4.elements.iter().map(|e| e.point.0.clone()).collect();
        assert_eq!(set.len(), 24);
    }

    #[test]
    fn young_dimensions() {
        for (n, dims) in [(1usize, vec![1usize]), (2, vec![1, 1]), (3, vec![1, 2, 1]), (4, vec![1, 3, 2, 3, 1])] {
            let irreps = young_irreps(n, P).unwrap();
            let got: Vec<usize> = irreps.iter().map(|i| i.dim).collect();
            assert_eq!(got, dims, "n = {}", n);
            let sum_sq: usize = got.iter().map(|d| d * d).sum();
            assert_eq!(sum_sq, (1..=n).product::<usize>());
        }
    }

    #[test]
    fn young_homomorphism_and_orthogonality() {
        let n = 4;
        let perms = all_permutations(n);
        let irreps = young_irreps(n, P).unwrap();
        let tol = Scalar::exp2(-100, P);
        let index: HashMap<&Perm, usize> = perms.iter().zip(0..).collect();
        for irrep in &irreps {
            for (a, pa) in perms.iter().enumerate() {
                // orthogonality rho(g)^T rho(g) = I
                let m = &irrep.mats[a];
                for i in 0..irrep.dim {
                    for j in 0..irrep.dim {
                        let mut s = Scalar::zero(P);
                        for k in 0..irrep.dim {
                            s += &(&m[k][i] * &m[k][j]);
                        }
                        let want = if i == j { 1 } else { 0 };
                        assert!((&s - &Scalar::from_i64(want, P)).abs() <= tol);
                    }
                }
                for (b, pb) in perms.iter().enumerate() {
                    // compose(a, b) applies a first: as functions this is b after a
                    let ab = index[&pa.compose(pb)];
                    let prod = mat_mul(&irrep.mats[b], &irrep.mats[a], P);
                    for i in 0..irrep.dim {
                        for j in 0..irrep.dim {
                            assert!(
                                (&prod[i][j] - &irrep.mats[ab][i][j]).abs() <= tol,
                                "homomorphism failed"
                            );
                        }
                    }
                }
            }
        }
        // character orthogonality
        for (i1, r1) in irreps.iter().enumerate() {
            for (i2, r2) in irreps.iter().enumerate() {
                let mut s = 0i64;
                for e in 0..perms.len() {
                    s += r1.char_i64(e) * r2.char_i64(e);
                }
                assert_eq!(s as usize, if i1 == i2 { perms.len() } else { 0 });
            }
        }
    }

    #[test]
    fn stabilizer_examples() {
        let g4 = edge_action_image(4);
        // constant poly: whole group
        let one = SparsePoly::one(6, P);
        assert_eq!(g4.stabilizer(&one).order(), 24);
        // 1 - u_e^2 for edge {0,1}: Klein four
        let e01 = edge_index(4, 0, 1);
        let u = SparsePoly::var(e01, 6, P);
        let g = SparsePoly::one(6, P).sub(&u.mul(&u).unwrap()).unwrap();
        let stab = g4.stabilizer(&g);
        assert_eq!(stab.order(), 4);
        assert!(stab.elements.iter().all(|e| e.point.compose(&e.point).is_identity()));
        // order-3 principal minor on vertices {0,1,2}: stabilizer is S_3
        let minor = order3_minor_poly();
        let stab3 = g4.stabilizer(&minor);
        assert_eq!(stab3.order(), 6);
        assert!(with_irreps(stab3, P).is_ok());
    }

    fn order3_minor_poly() -> SparsePoly {
        // det of [[1,a,b],[a,1,c],[b,c,1]] with a=u01, b=u02, c=u12 in K4's
        // 6 edge variables: 1 - a^2 - b^2 - c^2 + 2abc
        let a = SparsePoly::var(edge_index(4, 0, 1), 6, P);
        let b = SparsePoly::var(edge_index(4, 0, 2), 6, P);
        let c = SparsePoly::var(edge_index(4, 1, 2), 6, P);
        let mut p = SparsePoly::one(6, P);
        for v in [&a, &b, &c] {
            p = p.sub(&v.mul(v).unwrap()).unwrap();
        }
        let two = Scalar::from_u64(2, P);
        p.add(&a.mul(&b).unwrap().mul(&c).unwrap().scale(&two)).unwrap()
    }

    #[test]
    fn molien_trivial_group_counts_monomials() {
        let group = PermGroup {
            degree: 3,
            elements: vec![GroupElement { vertex: Perm::identity(1), point: Perm::identity(3) }],
        };
        let rep = with_irreps(group, P).unwrap();
        let t = molien(&rep, 6).unwrap();
        for k in 0..=6usize {
            let want = crate::scalar::binomial((3 - 1 + k) as u64, k as u64);
            assert_eq!(t.m[0][k], want.to_u64().unwrap());
        }
    }

    #[test]
    fn molien_s4_edge_action_consistency() {
        let rep = with_irreps(edge_action_image(4), P).unwrap();
        let t = molien(&rep, 10).unwrap();
        // sum over irreps of d_pi * m_pi(k) = number of degree-k monomials
        for k in 0..=10usize {
            let mut s = 0u64;
            for (pi, irrep) in rep.irreps.iter().enumerate() {
                s += irrep.dim as u64 * t.m[pi][k];
            }
            let want = crate::scalar::binomial((6 - 1 + k) as u64, k as u64);
            assert_eq!(s, want.to_u64().unwrap(), "k = {}", k);
        }
    }

    #[test]
    fn projection_matches_molien_and_is_equivariant() {
        let rep = with_irreps(edge_action_image(3), P).unwrap();
        let h = 3;
        let basis = projection_basis(&rep, h, P).unwrap();
        let t = molien(&rep, h).unwrap();
        for (pi, per_irrep) in basis.orbits.iter().enumerate() {
            assert_eq!(per_irrep.len() as u64, t.cumulative(pi, h));
        }
        // total function count = dim of monomial space
        let total: usize = basis
            .orbits
            .iter()
            .enumerate()
            .map(|(pi, per)| per.len() * rep.irreps[pi].dim)
            .sum();
        assert_eq!(total, monomials_up_to(3, h).len());
        // trivial isotypic at degree 1: (u1+u2+u3)/sqrt(3)
        let triv_deg1: Vec<&Vec<SparsePoly>> = basis.orbits[0]
            .iter()
            .filter(|o| o[0].degree() == Some(1))
            .collect();
        assert_eq!(triv_deg1.len(), 1);
        let e = &triv_deg1[0][0];
        let inv_sqrt3 = Scalar::from_u64(3, P).sqrt().recip();
        for v in 0..3 {
            let c = e.coeff(&Expo::unit(3, v)).re.abs();
            assert!((&c - &inv_sqrt3).abs() <= cast_tolerance(P));
        }
        // equivariance: act(g, e_{i,j}) = sum_{j'} rho(g)_{j',j} e_{i,j'}
        let tol = Scalar::exp2(-100, P);
        for (pi, irrep) in rep.irreps.iter().enumerate() {
            for orbit in &basis.orbits[pi] {
                for (e, g) in rep.group.elements.iter().enumerate() {
                    for j in 0..irrep.dim {
                        let lhs = g.point.act_poly(&orbit[j]);
                        let mut rhs = SparsePoly::zero(3, P);
                        for jp in 0..irrep.dim {
                            rhs = rhs.add(&orbit[jp].scale(&irrep.mats[e][jp][j])).unwrap();
                        }
                        let diff = lhs.sub(&rhs).unwrap();
                        for (_, c) in diff.terms() {
                            assert!(c.mag() <= tol, "equivariance failed");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn projection_idempotent() {
        let rep = with_irreps(edge_action_image(4), P).unwrap();
        // p11 for the trivial irrep is group averaging; applying twice equals once
        let h = 2;
        let basis = projection_basis(&rep, h, P).unwrap();
        let zon = modified_zonal(&basis);
        // sanity: zonal matrices symmetric
        for z in &zon {
            let m = z.len();
            for i in 0..m {
                for j in 0..m {
                    assert!(z[i][j].sub(&z[j][i]).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn parseval_identity_for_modified_zonal() {
        // Q = identity on every irrep gives sum over all monomials u of u(x)^2
        let rep = with_irreps(edge_action_image(3), P).unwrap();
        let h = 2;
        let basis = projection_basis(&rep, h, P).unwrap();
        let zon = modified_zonal(&basis);
        let mut s = SparsePoly::zero(3, P);
        for z in &zon {
            for i in 0..z.len() {
                s = s.add(&z[i][i]).unwrap();
            }
        }
        let mut want = SparsePoly::zero(3, P);
        for e in monomials_up_to(3, h) {
            let mut m = SparsePoly::zero(3, P);
            m.add_term(e, CScalar::one(P));
            want = want.add(&m.mul(&m).unwrap()).unwrap();
        }
        let diff = s.sub(&want).unwrap();
        for (_, c) in diff.terms() {
            assert!(c.mag() <= Scalar::exp2(-100, P), "Parseval failed: {:?}", c);
        }
    }
}
