//! Assembly of the full relaxation SDP, constraint pruning, SDPA-sparse
//! emission, finite-container oracle programs, and the external solver
//! client.
//!
//! The assembled program is a maximization over a product of PSD and
//! nonnegative-diagonal blocks Y subject to linear trace constraints;
//! see [`sdpa`] for how it maps onto the SDPA wire format.

pub mod finite;
pub mod prune;
pub mod sdpa;
pub mod solver;

use crate::harmonics::IrrepLabel;
use crate::invariants::{constant_rewrite, symmetrize_q, RewriteContext, RewriteError};
use crate::poly::SparsePoly;
use crate::scalar::{binomial, Scalar};
use crate::sosmodel::{
    assemble_identity_rows, build_p, lukacs_pair_identity, putinar_identity, BlockKind, Blocks,
    LinPoly, Row, SosError, VarId,
};
use crate::subsetspace::{SubsetSpace, SubsetSpaceError, TauIndex};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SdpGenError {
    #[error("threshold U = {0} outside (-1, 1); upper bound B not usable")]
    BadThreshold(f64),
    #[error(transparent)]
    SubsetSpace(#[from] SubsetSpaceError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Sos(#[from] SosError),
    #[error("inconsistent duplicate rows: same coefficients, constants {0} vs {1}")]
    InconsistentDuplicates(f64, f64),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Block-structured SDP: maximize `objective . Y` over PSD/diagonal blocks
/// Y subject to one trace equality per row. Entries are values of symmetric
/// constraint matrices (upper triangle stored once).
pub struct SdpProblem {
    pub prec: u32,
    pub blocks: Vec<(String, usize, BlockKind)>,
    pub rows: Vec<Row>,
    pub objective: Vec<(VarId, Scalar)>,
}

impl SdpProblem {
    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    pub fn block_index(&self, name: &str) -> Option<usize> {
        self.blocks.iter().position(|(n, _, _)| n == name)
    }
}

/// Adjacency threshold from an energy upper bound: pairs with potential
/// exceeding B are excluded, which for the Riesz s-kernel means
/// x . y > U with U = 1 - B^(-2/s)/2.
pub fn derive_threshold_u(s: u32, b: &Scalar) -> Result<Scalar, SdpGenError> {
    let prec = b.prec();
    let half = Scalar::from_rational(&rug::Rational::from((1, 2)), prec);
    let u = &Scalar::one(prec) - &(b.pow_frac(-2, s as u64) * half);
    let uf = u.to_f64();
    if uf <= -1.0 || uf >= 1.0 {
        return Err(SdpGenError::BadThreshold(uf));
    }
    Ok(u)
}

/// Rewritten kernel data for one irrep label: for each stored entry
/// (ti <= tj) and each subset cardinality, the A2-applied polynomial in
/// inner-product variables (or the constant, for cardinalities 0 and 1).
pub struct LabelData {
    pub label: IrrepLabel,
    pub rows: Vec<TauIndex>,
    /// entries[(ti, tj)] lexicographic over ti <= tj
    pub entries: Vec<EntryData>,
}

pub struct EntryData {
    pub ti: usize,
    pub tj: usize,
    /// index = subset cardinality 0..=4
    pub q_by_card: [Option<QForm>; 5],
}

pub enum QForm {
    Constant(Scalar),
    /// polynomial in the C(card, 2) inner-product variables, symmetrized
    Poly(SparsePoly),
}

/// All label data at one truncation degree; the s-independent part of the
/// pipeline, reusable across potentials.
pub struct KernelBasis {
    pub d: u32,
    pub prec: u32,
    pub labels: Vec<LabelData>,
}

/// Builds zonal blocks, applies A2, and rewrites every entry in inner
/// products. The expensive step; cache per (d, precision).
pub fn build_kernel_basis(d: u32, prec: u32) -> Result<KernelBasis, SdpGenError> {
    let mut space = SubsetSpace::new(prec);
    let blocks = space.zonal_blocks(d)?;
    let contexts: Vec<Option<RewriteContext>> = (0..=4usize)
        .map(|card| {
            if card < 2 {
                Ok(None)
            } else {
                RewriteContext::new(card, d, prec).map(Some)
            }
        })
        .collect::<Result<_, _>>()?;
    let mut labels = Vec::new();
    for block in &blocks {
        let mut entries = Vec::new();
        for ti in 0..block.rows.len() {
            for tj in ti..block.rows.len() {
                let ci = block.rows[ti].cardinality();
                let cj = block.rows[tj].cardinality();
                let mut q_by_card: [Option<QForm>; 5] = Default::default();
                for card in ci.max(cj)..=(ci + cj).min(4) {
                    let a2 = block.a2_polynomial(ti, tj, card)?;
                    if a2.is_zero() {
                        continue;
                    }
                    let q = if card < 2 {
                        QForm::Constant(constant_rewrite(&a2, card)?)
                    } else {
                        let raw = contexts[card].as_ref().unwrap().rewrite(&a2)?;
                        QForm::Poly(symmetrize_q(&raw, card))
                    };
                    q_by_card[card] = Some(q);
                }
                entries.push(EntryData { ti, tj, q_by_card });
            }
        }
        labels.push(LabelData { label: block.label, rows: block.rows.clone(), entries });
    }
    Ok(KernelBasis { d, prec, labels })
}

/// Parameters of one assembled instance.
#[derive(Clone)]
pub struct E2Params {
    pub n_particles: u32,
    pub s: u32,
    pub delta: u32,
    pub threshold: Scalar,
    pub symmetry: bool,
    /// bound M on all split free variables
    pub m_bound: Scalar,
}

/// Names of the distinguished blocks in an assembled instance.
pub const BLOCK_A_SPLIT: &str = "a_split";
pub const BLOCK_SIGN_SLACK: &str = "sign_slack";
pub const BLOCK_BOUND_SLACK: &str = "bound_slack";

/// Assembles the full relaxation at one (d, delta): kernel blocks per irrep
/// label, the pair-constraint branches, the Putinar identities for three and
/// four points, sign slacks for the two scalar inequalities, and bounds M on
/// the split free variables.
pub fn assemble_e2(basis: &KernelBasis, params: &E2Params) -> Result<SdpProblem, SdpGenError> {
    let prec = basis.prec;
    let mut blocks = Blocks::default();
    // kernel blocks, ordered by (l, parity)
    let f_blocks: Vec<usize> = basis
        .labels
        .iter()
        .map(|lab| {
            blocks.add(
                format!(
                    "F_l{}{}",
                    lab.label.ell,
                    if lab.label.parity == 1 { "p" } else { "m" }
                ),
                lab.rows.len(),
                BlockKind::Psd,
            )
        })
        .collect();
    let a_split = blocks.add(BLOCK_A_SPLIT, 10, BlockKind::Diagonal);
    let sign_slack = blocks.add(BLOCK_SIGN_SLACK, 2, BlockKind::Diagonal);

    // q_i as affine polynomials over the SDP variables
    let nvars_for = |card: usize| if card < 2 { 0 } else { card * (card - 1) / 2 };
    let mut q: Vec<LinPoly> = (0..=4).map(|card| LinPoly::zero(nvars_for(card), prec)).collect();
    for (card, qi) in q.iter_mut().enumerate() {
        let plus = VarId { block: a_split, i: 2 * card, j: 2 * card };
        let minus = VarId { block: a_split, i: 2 * card + 1, j: 2 * card + 1 };
        qi.add_scalar_var(plus, &Scalar::one(prec));
        qi.add_scalar_var(minus, &Scalar::from_i64(-1, prec));
        for (lab, fb) in basis.labels.iter().zip(&f_blocks) {
            for entry in &lab.entries {
                if let Some(qform) = &entry.q_by_card[card] {
                    let var = VarId { block: *fb, i: entry.ti, j: entry.tj };
                    match qform {
                        QForm::Constant(c) => qi.add_scalar_var(var, c),
                        QForm::Poly(p) => qi.add_poly_times_var(p, var),
                    }
                }
            }
        }
    }

    let mut rows: Vec<Row> = Vec::new();
    // q_0 <= 0 and q_1 <= 0 via slack variables
    for card in 0..=1usize {
        let form = q[card].map.values().next();
        let mut entries: Vec<(VarId, Scalar)> = form
            .map(|f| f.terms.iter().map(|(v, c)| (*v, c.clone())).collect())
            .unwrap_or_default();
        entries.push((VarId { block: sign_slack, i: card, j: card }, Scalar::one(prec)));
        let rhs = form.map(|f| f.constant.neg()).unwrap_or_else(|| Scalar::zero(prec));
        rows.push(Row { entries, rhs });
    }
    // pair constraint
    let lukacs = lukacs_pair_identity(params.s, basis.d, &params.threshold, &q[2], &mut blocks);
    rows.extend(assemble_identity_rows(&lukacs));
    // three- and four-point constraints
    let mut bounded_extra: Vec<VarId> = Vec::new();
    for card in 3..=4usize {
        let set = build_p(card, &params.threshold)?;
        let (identity, det) =
            putinar_identity(&set, &q[card], params.delta, params.symmetry, &mut blocks)?;
        rows.extend(assemble_identity_rows(&identity));
        if let Some(det) = det {
            for k in 0..det.monomials.len() {
                bounded_extra.push(VarId { block: det.plus_block, i: k, j: k });
                bounded_extra.push(VarId { block: det.minus_block, i: k, j: k });
            }
        }
    }
    // bounds on split free variables: a_i^± and the sign-split multipliers
    let mut bounded: Vec<VarId> = (0..10)
        .map(|k| VarId { block: a_split, i: k, j: k })
        .collect();
    bounded.extend(bounded_extra);
    let bound_slack = blocks.add(BLOCK_BOUND_SLACK, bounded.len(), BlockKind::Diagonal);
    for (k, var) in bounded.iter().enumerate() {
        rows.push(Row {
            entries: vec![
                (*var, Scalar::one(prec)),
                (VarId { block: bound_slack, i: k, j: k }, Scalar::one(prec)),
            ],
            rhs: params.m_bound.clone(),
        });
    }

    // objective: sum over cardinalities of binomial(N, i) a_i
    let mut objective = Vec::new();
    for card in 0..=4usize {
        let c = Scalar::from_integer(&binomial(params.n_particles as u64, card as u64), prec);
        if c.is_zero() {
            continue;
        }
        objective.push((VarId { block: a_split, i: 2 * card, j: 2 * card }, c.clone()));
        objective.push((VarId { block: a_split, i: 2 * card + 1, j: 2 * card + 1 }, c.neg()));
    }

    Ok(SdpProblem { prec, blocks: blocks.entries, rows, objective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::DEFAULT_PRECISION as P;

    #[test]
    fn threshold_examples() {
        // s=2, B=4: U = 1 - (1/4)/2 = 0.875
        let u = derive_threshold_u(2, &Scalar::from_u64(4, P)).unwrap();
        assert!((u.to_f64() - 0.875).abs() < 1e-15);
        // B = 2^(-s/2): U = 0 exactly
        let s = 3u32;
        let b = Scalar::from_f64(2f64.powf(-1.5), P);
        let u = derive_threshold_u(s, &b).unwrap();
        assert!(u.to_f64().abs() < 1e-15);
        // bipyramid bound at s=1
        let b = Scalar::from_f64(6.4746914947, P);
        let u = derive_threshold_u(1, &b).unwrap();
        assert!((u.to_f64() - 0.98807).abs() < 1e-4);
        // out of range
        assert!(derive_threshold_u(1, &Scalar::from_f64(0.1, P)).is_err());
    }

    #[test]
    fn assemble_small_instance() {
        // d = 1: labels (0,+1) with rows [empty, single0] and (1,-1) with
        // rows [single1]
        let basis = build_kernel_basis(1, P).unwrap();
        assert_eq!(basis.labels.len(), 2);
        let params = E2Params {
            n_particles: 5,
            s: 1,
            delta: 2,
            threshold: Scalar::from_f64(0.9, P),
            symmetry: false,
            m_bound: Scalar::from_u64(1000, P),
        };
        let problem = assemble_e2(&basis, &params).unwrap();
        // objective binomials: 1, 5, 10, 10, 5
        let mut coefs = vec![];
        for (v, c) in &problem.objective {
            if v.i % 2 == 0 {
                coefs.push(c.to_f64());
            }
        }
        assert_eq!(coefs, vec![1.0, 5.0, 10.0, 10.0, 5.0]);
        assert!(problem.num_constraints() > 12);
        assert!(problem.block_index("F_l0p").is_some());
        assert!(problem.block_index("F_l1m").is_some());
        assert!(problem.block_index(BLOCK_A_SPLIT).is_some());
    }

    #[test]
    fn q1_contributions_match_addition_theorem() {
        // at d = 1, q_1 = a_1 + 2 F^(0,+)_{01} + F^(0,+)_{11} + 3 F^(1,-)_{00}
        let basis = build_kernel_basis(1, P).unwrap();
        let lab0 = &basis.labels[0];
        assert_eq!(lab0.label, IrrepLabel::new(0, 1));
        // entry (0,1) at card 1 is the cross term with constant 1
        let e01 = lab0.entries.iter().find(|e| (e.ti, e.tj) == (0, 1)).unwrap();
        match e01.q_by_card[1].as_ref().unwrap() {
            QForm::Constant(c) => assert!((c.to_f64() - 1.0).abs() < 1e-30),
            _ => panic!("expected constant"),
        }
        // entry (1,1) at card 1: |Y_0^0|^2 = 1
        let e11 = lab0.entries.iter().find(|e| (e.ti, e.tj) == (1, 1)).unwrap();
        match e11.q_by_card[1].as_ref().unwrap() {
            QForm::Constant(c) => assert!((c.to_f64() - 1.0).abs() < 1e-30),
            _ => panic!("expected constant"),
        }
        // label (1,-1): single1 diagonal at card 1: 2l+1 = 3
        let lab1 = &basis.labels[1];
        let e00 = lab1.entries.iter().find(|e| (e.ti, e.tj) == (0, 0)).unwrap();
        match e00.q_by_card[1].as_ref().unwrap() {
            QForm::Constant(c) => assert!((c.to_f64() - 3.0).abs() < 1e-30),
            _ => panic!("expected constant"),
        }
        // and at card 2 the same entry is 6u
        match e00.q_by_card[2].as_ref().unwrap() {
            QForm::Poly(p) => {
                assert_eq!(p.degree(), Some(1));
                let c = p.coeff(&crate::poly::Expo(vec![1]));
                assert!((c.re.to_f64() - 6.0).abs() < 1e-30);
            }
            _ => panic!("expected poly"),
        }
    }
}
