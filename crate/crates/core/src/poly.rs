//! Sparse multivariate polynomials over complex fixed-precision scalars.
//!
//! Terms are keyed by dense exponent vectors in graded-lexicographic order,
//! so iteration order (and everything derived from it downstream, like SDP
//! constraint indexing) is deterministic.

use crate::scalar::{CScalar, Scalar};
use rug::{Integer, Rational};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("variable count mismatch: {0} vs {1}")]
    VarMismatch(usize, usize),
    #[error("point length {0} does not match variable count {1}")]
    PointLength(usize, usize),
    #[error("variable index {0} out of range for {1} variables")]
    IndexOutOfRange(usize, usize),
    #[error("polynomial is not real: max imaginary coefficient {0:e}")]
    NotReal(f64),
}

/// Dense exponent vector ordered by total degree, then lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Expo(pub Vec<u16>);

impl Expo {
    pub fn zeros(nvars: usize) -> Self {
        Expo(vec![0; nvars])
    }

    pub fn unit(nvars: usize, var: usize) -> Self {
        let mut e = vec![0; nvars];
        e[var] = 1;
        Expo(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn add(&self, other: &Expo) -> Expo {
        Expo(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Expo {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Expo {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial; real polynomials simply have zero imaginary parts.
#[derive(Clone)]
pub struct SparsePoly {
    nvars: usize,
    prec: u32,
    terms: BTreeMap<Expo, CScalar>,
}

/// Coefficients with magnitude below 2^(16 - prec) are dropped after each
/// operation; headroom well under working precision.
pub fn drop_tolerance(prec: u32) -> Scalar {
    Scalar::exp2(16 - prec as i32, prec)
}

/// Tolerance for real-cast and verification checks: 2^(-prec/2).
pub fn cast_tolerance(prec: u32) -> Scalar {
    Scalar::exp2(-(prec as i32) / 2, prec)
}

impl SparsePoly {
    pub fn zero(nvars: usize, prec: u32) -> Self {
        SparsePoly { nvars, prec, terms: BTreeMap::new() }
    }

    pub fn constant(c: CScalar, nvars: usize) -> Self {
        let prec = c.prec();
        let mut p = SparsePoly::zero(nvars, prec);
        p.add_term(Expo::zeros(nvars), c);
        p
    }

    pub fn one(nvars: usize, prec: u32) -> Self {
        SparsePoly::constant(CScalar::one(prec), nvars)
    }

    /// The monomial `x_var`.
    pub fn var(var: usize, nvars: usize, prec: u32) -> Self {
        let mut p = SparsePoly::zero(nvars, prec);
        p.add_term(Expo::unit(nvars, var), CScalar::one(prec));
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Max total degree over stored terms; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.degree()).max()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Expo, &CScalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Expo) -> CScalar {
        self.terms.get(e).cloned().unwrap_or_else(|| CScalar::zero(self.prec))
    }

    /// Adds `c` to the coefficient of `e`, keeping the drop-tolerance invariant.
    pub fn add_term(&mut self, e: Expo, c: CScalar) {
        debug_assert_eq!(e.0.len(), self.nvars);
        let tol = drop_tolerance(self.prec);
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                if c.mag() > tol {
                    v.insert(c);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().mag() <= tol {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &SparsePoly) -> Result<SparsePoly, PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::VarMismatch(self.nvars, other.nvars));
        }
        let mut r = self.clone();
        for (e, c) in other.terms() {
            r.add_term(e.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn sub(&self, other: &SparsePoly) -> Result<SparsePoly, PolyError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SparsePoly {
        let mut r = SparsePoly::zero(self.nvars, self.prec);
        for (e, c) in self.terms() {
            r.terms.insert(e.clone(), c.neg());
        }
        r
    }

    pub fn scale(&self, s: &Scalar) -> SparsePoly {
        let mut r = SparsePoly::zero(self.nvars, self.prec);
        let tol = drop_tolerance(self.prec);
        for (e, c) in self.terms() {
            let c = c.scale(s);
            if c.mag() > tol {
                r.terms.insert(e.clone(), c);
            }
        }
        r
    }

    pub fn scale_c(&self, s: &CScalar) -> SparsePoly {
        let mut r = SparsePoly::zero(self.nvars, self.prec);
        let tol = drop_tolerance(self.prec);
        for (e, c) in self.terms() {
            let c = c * s;
            if c.mag() > tol {
                r.terms.insert(e.clone(), c);
            }
        }
        r
    }

    pub fn mul(&self, other: &SparsePoly) -> Result<SparsePoly, PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::VarMismatch(self.nvars, other.nvars));
        }
        let mut r = SparsePoly::zero(self.nvars, self.prec);
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                r.add_term(ea.add(eb), ca * cb);
            }
        }
        Ok(r)
    }

    pub fn conj(&self) -> SparsePoly {
        let mut r = SparsePoly::zero(self.nvars, self.prec);
        for (e, c) in self.terms() {
            r.terms.insert(e.clone(), c.conj());
        }
        r
    }

    pub fn eval(&self, point: &[Scalar]) -> Result<CScalar, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::PointLength(point.len(), self.nvars));
        }
        let mut acc = CScalar::zero(self.prec);
        for (e, c) in self.terms() {
            let mut m = Scalar::one(self.prec);
            for (v, &exp) in e.0.iter().enumerate() {
                if exp > 0 {
                    m = m * point[v].powi(exp as u32);
                }
            }
            acc += &c.scale(&m);
        }
        Ok(acc)
    }

    /// Composes out one variable: every occurrence of `x_var` is replaced by
    /// `replacement` (a polynomial in the same variable space).
    pub fn substitute(&self, var: usize, replacement: &SparsePoly) -> Result<SparsePoly, PolyError> {
        if var >= self.nvars {
            return Err(PolyError::IndexOutOfRange(var, self.nvars));
        }
        if replacement.nvars != self.nvars {
            return Err(PolyError::VarMismatch(replacement.nvars, self.nvars));
        }
        let max_pow = self
            .terms
            .keys()
            .map(|e| e.0[var])
            .max()
            .unwrap_or(0) as usize;
        let mut powers: Vec<SparsePoly> = Vec::with_capacity(max_pow + 1);
        powers.push(SparsePoly::one(self.nvars, self.prec));
        for k in 1..=max_pow {
            powers.push(powers[k - 1].mul(replacement)?);
        }
        let mut r = SparsePoly::zero(self.nvars, self.prec);
        for (e, c) in self.terms() {
            let k = e.0[var] as usize;
            let mut rest = e.clone();
            rest.0[var] = 0;
            for (pe, pc) in powers[k].terms() {
                r.add_term(rest.add(pe), pc * c);
            }
        }
        Ok(r)
    }

    /// Formal partial derivative with respect to `x_var`.
    pub fn derivative(&self, var: usize) -> SparsePoly {
        let mut r = SparsePoly::zero(self.nvars, self.prec);
        for (e, c) in self.terms() {
            let k = e.0[var];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2.0[var] = k - 1;
            r.add_term(e2, c.scale(&Scalar::from_u64(k as u64, self.prec)));
        }
        r
    }

    /// Maps variable `i` of `self` to variable `map[i]` of a `new_nvars`-variable
    /// polynomial. Distinct source variables may map to the same target
    /// (exponents add), which is how subset points get merged.
    pub fn relabel(&self, map: &[usize], new_nvars: usize) -> SparsePoly {
        assert_eq!(map.len(), self.nvars);
        let mut r = SparsePoly::zero(new_nvars, self.prec);
        for (e, c) in self.terms() {
            let mut ne = vec![0u16; new_nvars];
            for (v, &exp) in e.0.iter().enumerate() {
                ne[map[v]] += exp;
            }
            r.add_term(Expo(ne), c.clone());
        }
        r
    }

    /// Largest imaginary coefficient magnitude (zero polynomial gives 0).
    pub fn max_im(&self) -> Scalar {
        let mut m = Scalar::zero(self.prec);
        for (_, c) in self.terms() {
            m = m.max(&c.im.abs());
        }
        m
    }

    /// Whether all imaginary parts are below the cast tolerance 2^(-prec/2).
    pub fn is_real(&self) -> bool {
        self.max_im() <= cast_tolerance(self.prec)
    }

    /// Drops imaginary parts; errors when the polynomial is not real within
    /// the cast tolerance.
    pub fn real_cast(&self) -> Result<SparsePoly, PolyError> {
        if !self.is_real() {
            return Err(PolyError::NotReal(self.max_im().to_f64()));
        }
        let mut r = SparsePoly::zero(self.nvars, self.prec);
        let tol = drop_tolerance(self.prec);
        for (e, c) in self.terms() {
            let c = CScalar::from_real(c.re.clone());
            if c.mag() > tol {
                r.terms.insert(e.clone(), c);
            }
        }
        Ok(r)
    }

    /// The constant value of a degree-0 polynomial (or zero).
    pub fn constant_value(&self) -> CScalar {
        self.coeff(&Expo::zeros(self.nvars))
    }

    /// Whether the polynomial has only the constant term.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.degree() == 0)
    }
}

impl fmt::Debug for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:?})", c)?;
            for (v, &exp) in e.0.iter().enumerate() {
                if exp > 0 {
                    write!(f, "*x{}^{}", v, exp)?;
                }
            }
        }
        Ok(())
    }
}

/// Normalized sphere moment: the integral of x^a y^b z^c over S^2 with the
/// rotation-invariant probability measure. Zero when any exponent is odd,
/// otherwise (a-1)!!(b-1)!!(c-1)!! / (a+b+c+1)!!.
pub fn sphere_monomial_integral(a: u32, b: u32, c: u32, prec: u32) -> Scalar {
    if a % 2 == 1 || b % 2 == 1 || c % 2 == 1 {
        return Scalar::zero(prec);
    }
    let num = double_factorial_odd(a) * double_factorial_odd(b) * double_factorial_odd(c);
    let den = double_factorial_odd(a + b + c + 2);
    Scalar::from_rational(&Rational::from((num, den)), prec)
}

/// (n-1)!! for even n (so 1 for n = 0).
fn double_factorial_odd(n: u32) -> Integer {
    let mut r = Integer::from(1);
    let mut k = 1u32;
    while k < n {
        r *= k;
        k += 2;
    }
    r
}

/// Inner product of two polynomials on a product of spheres: both live in
/// 3*points variables and the integral is taken against the product of
/// normalized sphere measures, conjugating the second argument.
pub fn product_sphere_inner_product(
    p: &SparsePoly,
    q: &SparsePoly,
    points: usize,
) -> Result<CScalar, PolyError> {
    if p.nvars() != 3 * points || q.nvars() != 3 * points {
        return Err(PolyError::VarMismatch(p.nvars(), 3 * points));
    }
    let prec = p.prec();
    let mut acc = CScalar::zero(prec);
    for (ep, cp) in p.terms() {
        for (eq, cq) in q.terms() {
            let e = ep.add(eq);
            let mut m = Scalar::one(prec);
            let mut zero = false;
            for k in 0..points {
                let i = sphere_monomial_integral(
                    e.0[3 * k] as u32,
                    e.0[3 * k + 1] as u32,
                    e.0[3 * k + 2] as u32,
                    prec,
                );
                if i.is_zero() {
                    zero = true;
                    break;
                }
                m = m * i;
            }
            if !zero {
                acc += &(cp * &cq.conj()).scale(&m);
            }
        }
    }
    Ok(acc)
}

/// Inner product over a single sphere (3 variables).
pub fn sphere_inner_product(p: &SparsePoly, q: &SparsePoly) -> Result<CScalar, PolyError> {
    product_sphere_inner_product(p, q, 1)
}

/// Reduces a polynomial in 3*points variables to its normal form modulo the
/// sphere relations x_k^2 + y_k^2 + z_k^2 = 1: every z_k exponent is brought
/// below 2 via z_k^2 = 1 - x_k^2 - y_k^2. Two polynomials agree on the product
/// of spheres iff their normal forms are equal.
pub fn sphere_normal_form(p: &SparsePoly, points: usize) -> SparsePoly {
    assert_eq!(p.nvars(), 3 * points);
    let prec = p.prec();
    let nvars = p.nvars();
    let mut cur = p.clone();
    for k in 0..points {
        let zi = 3 * k + 2;
        let max_z = cur.terms.keys().map(|e| e.0[zi]).max().unwrap_or(0);
        if max_z < 2 {
            continue;
        }
        // precompute (1 - x^2 - y^2)^j expansions for this point
        let max_j = (max_z / 2) as usize;
        let mut pows: Vec<Vec<(u16, u16, Scalar)>> = Vec::with_capacity(max_j + 1);
        pows.push(vec![(0, 0, Scalar::one(prec))]);
        for j in 1..=max_j {
            pows.push(trinomial_expansion(j as u32, prec));
        }
        let mut next = SparsePoly::zero(nvars, prec);
        for (e, c) in cur.terms() {
            let ze = e.0[zi];
            if ze < 2 {
                next.add_term(e.clone(), c.clone());
                continue;
            }
            let j = (ze / 2) as usize;
            let rem = ze % 2;
            for (dx, dy, coef) in &pows[j] {
                let mut ne = e.clone();
                ne.0[zi] = rem;
                ne.0[3 * k] += dx;
                ne.0[3 * k + 1] += dy;
                next.add_term(ne, c.scale(coef));
            }
        }
        cur = next;
    }
    cur
}

/// Terms (x-exp, y-exp, coefficient) of (1 - x^2 - y^2)^j.
fn trinomial_expansion(j: u32, prec: u32) -> Vec<(u16, u16, Scalar)> {
    let mut out = Vec::new();
    let jf = crate::scalar::factorial(j);
    for p in 0..=j {
        for q in 0..=(j - p) {
            let r = j - p - q;
            let m = Rational::from((
                jf.clone(),
                crate::scalar::factorial(p) * crate::scalar::factorial(q) * crate::scalar::factorial(r),
            ));
            let sign = if (p + q) % 2 == 0 { 1 } else { -1 };
            let c = Scalar::from_rational(&(m * Rational::from(sign)), prec);
            out.push((2 * p as u16, 2 * q as u16, c));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::DEFAULT_PRECISION as P;

    fn real(v: f64) -> CScalar {
        CScalar::from_real(Scalar::from_f64(v, P))
    }

    fn xy(nvars: usize) -> (SparsePoly, SparsePoly) {
        (SparsePoly::var(0, nvars, P), SparsePoly::var(1, nvars, P))
    }

    #[test]
    fn add_cancels() {
        // (x+y) + (x-y) = 2x
        let (x, y) = xy(2);
        let a = x.add(&y).unwrap();
        let b = x.sub(&y).unwrap();
        let s = a.add(&b).unwrap();
        assert_eq!(s.num_terms(), 1);
        assert_eq!(s.coeff(&Expo(vec![1, 0])), real(2.0));
    }

    #[test]
    fn add_identity_and_var_mismatch() {
        let (x, _) = xy(2);
        let z = SparsePoly::zero(2, P);
        assert_eq!(x.add(&z).unwrap().num_terms(), 1);
        assert!(x.add(&SparsePoly::zero(3, P)).is_err());
    }

    #[test]
    fn legendre2_plus_half() {
        // (3z^2-1)/2 + 1/2 = (3/2) z^2
        let z = SparsePoly::var(2, 3, P);
        let half = Scalar::from_rational(&rug::Rational::from((1, 2)), P);
        let three_half = Scalar::from_rational(&rug::Rational::from((3, 2)), P);
        let p = z
            .mul(&z)
            .unwrap()
            .scale(&three_half)
            .sub(&SparsePoly::constant(CScalar::from_real(half.clone()), 3))
            .unwrap();
        let s = p
            .add(&SparsePoly::constant(CScalar::from_real(half), 3))
            .unwrap();
        assert_eq!(s.num_terms(), 1);
        assert_eq!(s.coeff(&Expo(vec![0, 0, 2])), CScalar::from_real(three_half_val()));
        fn three_half_val() -> Scalar {
            Scalar::from_rational(&rug::Rational::from((3, 2)), P)
        }
    }

    #[test]
    fn mul_cases() {
        let (x, y) = xy(2);
        assert_eq!(x.mul(&x).unwrap().coeff(&Expo(vec![2, 0])), real(1.0));
        let one = SparsePoly::one(2, P);
        let p = x.add(&y).unwrap();
        assert_eq!(one.mul(&p).unwrap().num_terms(), 2);
        // (x+iy)(x-iy) = x^2 + y^2
        let i = CScalar::i(P);
        let xiy = x.add(&y.scale_c(&i)).unwrap();
        let xmiy = x.add(&y.scale_c(&i.neg())).unwrap();
        let m = xiy.mul(&xmiy).unwrap();
        assert_eq!(m.num_terms(), 2);
        assert_eq!(m.coeff(&Expo(vec![2, 0])), real(1.0));
        assert_eq!(m.coeff(&Expo(vec![0, 2])), real(1.0));
    }

    #[test]
    fn eval_cases() {
        let prec = P;
        // x^2+y^2+z^2 at (1,0,0) = 1
        let mut p = SparsePoly::zero(3, prec);
        for v in 0..3 {
            p.add_term(
                {
                    let mut e = Expo::zeros(3);
                    e.0[v] = 2;
                    e
                },
                CScalar::one(prec),
            );
        }
        let pt = [Scalar::one(prec), Scalar::zero(prec), Scalar::zero(prec)];
        assert_eq!(p.eval(&pt).unwrap(), CScalar::one(prec));
        // zero poly
        assert!(SparsePoly::zero(3, prec).eval(&pt).unwrap().is_zero());
        // (3z^2-1)/2 at z = 1/2 -> -1/8
        let z = SparsePoly::var(2, 3, prec);
        let half = Scalar::from_rational(&rug::Rational::from((1, 2)), prec);
        let leg2 = z
            .mul(&z)
            .unwrap()
            .scale(&Scalar::from_rational(&rug::Rational::from((3, 2)), prec))
            .sub(&SparsePoly::constant(CScalar::from_real(half.clone()), 3))
            .unwrap();
        let got = leg2
            .eval(&[Scalar::zero(prec), Scalar::zero(prec), half])
            .unwrap();
        let want = Scalar::from_rational(&rug::Rational::from((-1, 8)), prec);
        assert!((&got.re - &want).abs() <= cast_tolerance(prec));
    }

    #[test]
    fn substitution_cases() {
        let prec = P;
        // u := 1 - w^2/2 in a 1-variable space (u and w share the slot)
        let u = SparsePoly::var(0, 1, prec);
        let repl = SparsePoly::one(1, prec)
            .sub(
                &u.mul(&u)
                    .unwrap()
                    .scale(&Scalar::from_rational(&rug::Rational::from((1, 2)), prec)),
            )
            .unwrap();
        let s = u.substitute(0, &repl).unwrap();
        assert_eq!(s.num_terms(), 2);
        // constant unchanged
        let c = SparsePoly::one(1, prec);
        assert_eq!(c.substitute(0, &repl).unwrap().num_terms(), 1);
        // u^2 -> 1 - w^2 + w^4/4
        let u2 = u.mul(&u).unwrap();
        let s2 = u2.substitute(0, &repl).unwrap();
        assert_eq!(s2.coeff(&Expo(vec![0])), real(1.0));
        assert_eq!(s2.coeff(&Expo(vec![2])), real(-1.0));
        assert_eq!(
            s2.coeff(&Expo(vec![4])),
            CScalar::from_real(Scalar::from_rational(&rug::Rational::from((1, 4)), prec))
        );
        assert!(u.substitute(3, &repl).is_err());
    }

    #[test]
    fn sphere_integrals() {
        assert_eq!(sphere_monomial_integral(0, 0, 0, P), Scalar::one(P));
        assert!(sphere_monomial_integral(1, 0, 0, P).is_zero());
        let third = Scalar::from_rational(&rug::Rational::from((1, 3)), P);
        assert_eq!(sphere_monomial_integral(0, 0, 2, P), third);
        // coordinate symmetry
        for k in 1..=10u32 {
            let a = sphere_monomial_integral(2 * k, 0, 0, P);
            assert_eq!(a, sphere_monomial_integral(0, 2 * k, 0, P));
            assert_eq!(a, sphere_monomial_integral(0, 0, 2 * k, P));
        }
        // multiply by x^2+y^2+z^2 = 1
        for (a, b, c) in [(0u32, 0u32, 0u32), (2, 0, 0), (2, 2, 0), (4, 2, 2)] {
            let lhs = &(&sphere_monomial_integral(a + 2, b, c, P)
                + &sphere_monomial_integral(a, b + 2, c, P))
                + &sphere_monomial_integral(a, b, c + 2, P);
            assert_eq!(lhs, sphere_monomial_integral(a, b, c, P));
        }
    }

    #[test]
    fn sphere_inner_products() {
        let one = SparsePoly::one(3, P);
        assert_eq!(sphere_inner_product(&one, &one).unwrap(), CScalar::one(P));
        let z = SparsePoly::var(2, 3, P);
        let x = SparsePoly::var(0, 3, P);
        assert!(sphere_inner_product(&z, &x).unwrap().is_zero());
        // sqrt(3) z is unit
        let s3 = Scalar::from_u64(3, P).sqrt();
        let y10 = z.scale(&s3);
        let ip = sphere_inner_product(&y10, &y10).unwrap();
        assert!((&ip.re - &Scalar::one(P)).abs() <= cast_tolerance(P));
    }

    #[test]
    fn normal_form_agrees_on_sphere() {
        let prec = P;
        // p = (x^2+y^2+z^2)^2 * x reduces to x
        let mut s = SparsePoly::zero(3, prec);
        for v in 0..3 {
            let xv = SparsePoly::var(v, 3, prec);
            s = s.add(&xv.mul(&xv).unwrap()).unwrap();
        }
        let x = SparsePoly::var(0, 3, prec);
        let p = s.mul(&s).unwrap().mul(&x).unwrap();
        let nf = sphere_normal_form(&p, 1);
        assert_eq!(nf.num_terms(), 1);
        assert_eq!(nf.coeff(&Expo(vec![1, 0, 0])), real(1.0));
    }

    #[test]
    fn relabel_merges_points() {
        let prec = P;
        // f(a, b) = a0 * b0 in 6 vars; merge b onto a's point
        let a0 = SparsePoly::var(0, 6, prec);
        let b0 = SparsePoly::var(3, 6, prec);
        let p = a0.mul(&b0).unwrap();
        let merged = p.relabel(&[0, 1, 2, 0, 1, 2], 3);
        assert_eq!(merged.coeff(&Expo(vec![2, 0, 0])), real(1.0));
    }
}
