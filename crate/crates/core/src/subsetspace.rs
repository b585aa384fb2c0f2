//! Symmetry-adapted system for the space of at-most-two-point subsets of the
//! sphere under O(3), restricted zonal matrices, and the A_2 operator that
//! pushes kernels on subset pairs down to functions on up to four points.

use crate::harmonics::{phi_inverse_expand, spherical_harmonic_cartesian, IrrepLabel};
use crate::poly::{PolyError, SparsePoly};
use crate::scalar::{CScalar, Scalar};
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SubsetSpaceError {
    #[error("tau {0:?} is not admissible for label ({1}, {2})")]
    InadmissibleTau(TauIndex, u32, i8),
    #[error("order m = {0} out of range for l = {1}")]
    OrderOutOfRange(i64, u32),
    #[error("subset cardinality {0} exceeds 4")]
    SubsetTooLarge(usize),
    #[error("zonal entry failed realness check: {0}")]
    NotReal(#[from] PolyError),
}

/// Index of one multiplicity row: which tensor factors of spherical-harmonic
/// spaces the basis element comes from.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum TauIndex {
    Empty,
    Single(u32),
    /// l1 <= l2
    Pair(u32, u32),
}

impl TauIndex {
    /// Number of sphere points in the element's stratum.
    pub fn cardinality(&self) -> usize {
        match self {
            TauIndex::Empty => 0,
            TauIndex::Single(_) => 1,
            TauIndex::Pair(_, _) => 2,
        }
    }

    /// Total harmonic degree: 0, l, or l1 + l2.
    pub fn weight(&self) -> u32 {
        match self {
            TauIndex::Empty => 0,
            TauIndex::Single(l) => *l,
            TauIndex::Pair(l1, l2) => l1 + l2,
        }
    }

    /// Whether this row belongs to R_{(l,p)} (ignoring truncation).
    pub fn admissible_for(&self, label: IrrepLabel) -> bool {
        let ell = label.ell;
        let p = label.parity;
        match *self {
            TauIndex::Empty => ell == 0 && p == 1,
            TauIndex::Single(l) => l == ell && p == if ell % 2 == 0 { 1 } else { -1 },
            TauIndex::Pair(l1, l2) => {
                let min_diff = if ell % 2 == 1 { 1 } else { 0 };
                let pair_parity = if (l1 + l2) % 2 == 0 { 1 } else { -1 };
                l1 <= l2
                    && l2 - l1 >= min_diff
                    && l2 - l1 <= ell
                    && ell <= l1 + l2
                    && pair_parity == p
            }
        }
    }
}

/// All multiplicity rows for one irrep label at truncation degree d, in a
/// deterministic order (by weight, then cardinality, then l1).
///
/// Truncation keeps tau with weight <= d and cardinality <= d, so d = 0
/// retains only the empty row.
pub fn build_index_set(label: IrrepLabel, d: u32) -> Vec<TauIndex> {
    let ell = label.ell;
    let p = label.parity;
    let mut out = Vec::new();
    if ell == 0 && p == 1 {
        out.push(TauIndex::Empty);
    }
    if d >= 1 {
        let single_parity = if ell % 2 == 0 { 1 } else { -1 };
        if p == single_parity && ell <= d {
            out.push(TauIndex::Single(ell));
        }
        if d >= 2 {
            let min_diff = if ell % 2 == 1 { 1 } else { 0 };
            for l1 in 0..=d {
                for l2 in l1..=d {
                    if l1 + l2 > d {
                        continue;
                    }
                    let diff = l2 - l1;
                    let pair_parity = if (l1 + l2) % 2 == 0 { 1 } else { -1 };
                    if diff >= min_diff && diff <= ell && ell <= l1 + l2 && pair_parity == p {
                        out.push(TauIndex::Pair(l1, l2));
                    }
                }
            }
        }
    }
    out.sort_by_key(|t| (t.weight(), t.cardinality(), *t));
    out
}

/// All labels with a nonempty index set at truncation d.
pub fn active_labels(d: u32) -> Vec<IrrepLabel> {
    let mut out = Vec::new();
    for ell in 0..=2 * d {
        for p in [1i8, -1] {
            let label = IrrepLabel::new(ell, p);
            if !build_index_set(label, d).is_empty() {
                out.push(label);
            }
        }
    }
    out
}

/// One symmetry-adapted basis element. The polynomial lives on the stratum
/// of `tau.cardinality()` points (3 * cardinality variables); the element
/// vanishes on the other strata.
#[derive(Clone)]
pub struct BasisElement {
    pub label: IrrepLabel,
    pub tau: TauIndex,
    pub m: i64,
    pub component: SparsePoly,
}

/// Restricted zonal matrix for one irrep label: entries are pair polynomials
/// over the two subsets' cartesian coordinates, first subset's variables
/// first. Only the upper triangle (i <= j over `rows`) is stored; entries
/// are real after assembly.
pub struct ZonalBlockSet {
    pub label: IrrepLabel,
    pub d: u32,
    pub rows: Vec<TauIndex>,
    pub entries: BTreeMap<(usize, usize), SparsePoly>,
}

/// Builder with memoized harmonics, shared across labels.
pub struct SubsetSpace {
    prec: u32,
    harmonics: HashMap<(u32, i64), SparsePoly>,
}

impl SubsetSpace {
    pub fn new(prec: u32) -> Self {
        SubsetSpace { prec, harmonics: HashMap::new() }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    fn harmonic(&mut self, ell: u32, m: i64) -> SparsePoly {
        let prec = self.prec;
        self.harmonics
            .entry((ell, m))
            .or_insert_with(|| spherical_harmonic_cartesian(ell, m, prec).unwrap())
            .clone()
    }

    /// The unit-norm element e_{(l,p),tau,m}.
    pub fn basis_element(
        &mut self,
        label: IrrepLabel,
        tau: TauIndex,
        m: i64,
    ) -> Result<BasisElement, SubsetSpaceError> {
        if m.unsigned_abs() > label.ell as u64 {
            return Err(SubsetSpaceError::OrderOutOfRange(m, label.ell));
        }
        if !tau.admissible_for(label) {
            return Err(SubsetSpaceError::InadmissibleTau(tau, label.ell, label.parity));
        }
        let prec = self.prec;
        let component = match tau {
            TauIndex::Empty => SparsePoly::one(0, prec),
            TauIndex::Single(_) => self.harmonic(label.ell, m),
            TauIndex::Pair(l1, l2) => {
                let expansion = phi_inverse_expand(l1, l2, label.ell, m, prec).unwrap();
                let mut acc = SparsePoly::zero(6, prec);
                for (m1, m2, c) in &expansion {
                    let a = self.harmonic(l1, *m1).relabel(&[0, 1, 2], 6);
                    let b = self.harmonic(l2, *m2).relabel(&[3, 4, 5], 6);
                    acc = acc.add(&a.mul(&b).unwrap().scale(c)).unwrap();
                    if l1 != l2 {
                        // symmetrized cross term, with 1/sqrt(2) applied below
                        let a2 = self.harmonic(l1, *m1).relabel(&[3, 4, 5], 6);
                        let b2 = self.harmonic(l2, *m2).relabel(&[0, 1, 2], 6);
                        acc = acc.add(&a2.mul(&b2).unwrap().scale(c)).unwrap();
                    }
                }
                if l1 != l2 {
                    // isometric symmetrization over the two slot orders
                    let inv_sqrt2 = Scalar::from_u64(2, prec).sqrt().recip();
                    acc = acc.scale(&inv_sqrt2);
                }
                acc
            }
        };
        Ok(BasisElement { label, tau, m, component })
    }

    /// Assembles the restricted zonal matrix for one label, verifying that
    /// every entry is real.
    pub fn zonal_block(
        &mut self,
        label: IrrepLabel,
        d: u32,
    ) -> Result<ZonalBlockSet, SubsetSpaceError> {
        let rows = build_index_set(label, d);
        let prec = self.prec;
        // cache components per (row, m)
        let mut comps: Vec<Vec<SparsePoly>> = Vec::with_capacity(rows.len());
        for &tau in &rows {
            let mut per_m = Vec::new();
            for m in -(label.ell as i64)..=(label.ell as i64) {
                per_m.push(self.basis_element(label, tau, m)?.component);
            }
            comps.push(per_m);
        }
        let mut entries = BTreeMap::new();
        for i in 0..rows.len() {
            let ci = rows[i].cardinality();
            for j in i..rows.len() {
                let cj = rows[j].cardinality();
                let nv = 3 * (ci + cj);
                let mut acc = SparsePoly::zero(nv, prec);
                for mi in 0..comps[i].len() {
                    let a = comps[i][mi].relabel(&identity_map(3 * ci), nv);
                    let b = comps[j][mi]
                        .conj()
                        .relabel(&offset_map(3 * cj, 3 * ci), nv);
                    acc = acc.add(&a.mul(&b).unwrap()).unwrap();
                }
                let real = acc.real_cast()?;
                entries.insert((i, j), real);
            }
        }
        Ok(ZonalBlockSet { label, d, rows, entries })
    }

    /// All zonal blocks with nonempty index sets, ordered by (l, parity).
    pub fn zonal_blocks(&mut self, d: u32) -> Result<Vec<ZonalBlockSet>, SubsetSpaceError> {
        active_labels(d)
            .into_iter()
            .map(|label| self.zonal_block(label, d))
            .collect()
    }
}

fn identity_map(n: usize) -> Vec<usize> {
    (0..n).collect()
}

fn offset_map(n: usize, off: usize) -> Vec<usize> {
    (0..n).map(|v| v + off).collect()
}

/// Ordered subset pairs (J, J') of {0, .., card-1} with |J| = ci,
/// |J'| = cj, and J union J' the full set.
pub fn covering_pairs(card: usize, ci: usize, cj: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let full: u32 = (1u32 << card) - 1;
    let mut out = Vec::new();
    for mj in 0..=full {
        if (mj & full) != mj || (mj.count_ones() as usize) != ci {
            continue;
        }
        for mjp in 0..=full {
            if (mjp & full) != mjp || (mjp.count_ones() as usize) != cj {
                continue;
            }
            if mj | mjp == full {
                out.push((mask_points(mj), mask_points(mjp)));
            }
        }
    }
    out
}

fn mask_points(mask: u32) -> Vec<usize> {
    (0..32).filter(|k| mask >> k & 1 == 1).collect()
}

impl ZonalBlockSet {
    /// The polynomial (x_1, ..., x_card) -> (A_2 Z_{tau_i, tau_j})(S) on sets
    /// S of the given cardinality: the sum of the (i, j) entry over all
    /// ordered covering subset pairs. Zero when no pair covers.
    pub fn a2_polynomial(
        &self,
        i: usize,
        j: usize,
        card: usize,
    ) -> Result<SparsePoly, SubsetSpaceError> {
        if card > 4 {
            return Err(SubsetSpaceError::SubsetTooLarge(card));
        }
        let (lo, hi) = (i.min(j), i.max(j));
        let entry = &self.entries[&(lo, hi)];
        let (ci, cj) = (self.rows[i].cardinality(), self.rows[j].cardinality());
        let prec = entry.prec();
        let mut acc = SparsePoly::zero(3 * card, prec);
        for (pj, pjp) in covering_pairs(card, ci, cj) {
            // map entry variables: tau_i's block to J's points, tau_j's to J'
            let mut map = vec![0usize; 3 * (ci + cj)];
            // the stored entry has tau_lo's block first; when i > j we use
            // the transpose, which for real symmetric pair data means
            // assigning J' to the first block instead.
            let (first, second) = if i <= j { (&pj, &pjp) } else { (&pjp, &pj) };
            let (cf, _cs) = if i <= j { (ci, cj) } else { (cj, ci) };
            for (k, &pt) in first.iter().enumerate() {
                for a in 0..3 {
                    map[3 * k + a] = 3 * pt + a;
                }
            }
            for (k, &pt) in second.iter().enumerate() {
                for a in 0..3 {
                    map[3 * (cf + k) + a] = 3 * pt + a;
                }
            }
            acc = acc.add(&entry.relabel(&map, 3 * card)).unwrap();
        }
        Ok(acc)
    }
}

/// Evaluates a stratum polynomial at a list of sphere points (each a 3-vector
/// of scalars), concatenating coordinates.
pub fn eval_at_points(p: &SparsePoly, pts: &[[Scalar; 3]]) -> CScalar {
    let flat: Vec<Scalar> = pts.iter().flat_map(|p| p.iter().cloned()).collect();
    p.eval(&flat).unwrap()
}
