//! Legendre polynomials, cartesian Laplace spherical harmonics, and
//! Clebsch-Gordan coefficients.
//!
//! Harmonics are kept complex internally; realness is only asserted once the
//! zonal matrices are assembled. The phase convention for negative orders is
//! Y_l^{-m} = (-1)^m conj(Y_l^m), validated downstream by the orthonormality
//! and zonal realness checks.

use crate::poly::{Expo, SparsePoly};
use crate::scalar::{factorial, CScalar, Scalar};
use rug::{Integer, Rational};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarmonicsError {
    #[error("order |m| = {0} exceeds degree l = {1}")]
    OrderOutOfRange(i64, u32),
    #[error("l = {0} outside coupling range [{1}, {2}]")]
    CouplingRange(u32, u32, u32),
}

/// Irreducible representation label of O(3): degree and inversion parity.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct IrrepLabel {
    pub ell: u32,
    /// +1 or -1
    pub parity: i8,
}

impl IrrepLabel {
    pub fn new(ell: u32, parity: i8) -> Self {
        assert!(parity == 1 || parity == -1, "parity must be +1 or -1");
        IrrepLabel { ell, parity }
    }

    pub fn dim(&self) -> u32 {
        2 * self.ell + 1
    }
}

/// Arguments of a Clebsch-Gordan coefficient C^{l,m}_{l1,m1,l2,m2}.
#[derive(Clone, Copy, Debug)]
pub struct CGKey {
    pub l1: u32,
    pub m1: i64,
    pub l2: u32,
    pub m2: i64,
    pub l: u32,
    pub m: i64,
}

impl CGKey {
    pub fn is_valid(&self) -> bool {
        self.m1.unsigned_abs() <= self.l1 as u64
            && self.m2.unsigned_abs() <= self.l2 as u64
            && self.m.unsigned_abs() <= self.l as u64
    }
}

/// The l-th Legendre polynomial in one variable, by the Rodrigues formula.
pub fn legendre(ell: u32, prec: u32) -> SparsePoly {
    // (x^2 - 1)^ell, differentiated ell times, divided by 2^ell ell!
    let mut p = SparsePoly::zero(1, prec);
    // exact rational coefficients: sum_k C(ell,k) (-1)^(ell-k) x^(2k)
    let denom = Integer::from(Integer::from(1) << ell) * factorial(ell);
    for k in 0..=ell {
        let deg = 2 * k;
        if deg < ell {
            continue; // vanishes after ell derivatives
        }
        // d^ell/dx^ell x^(2k) = (2k)!/(2k-ell)! x^(2k-ell)
        let mut num = crate::scalar::binomial(ell as u64, k as u64)
            * Rational::from((factorial(deg), factorial(deg - ell)));
        if (ell - k) % 2 == 1 {
            num = -num;
        }
        let c = Scalar::from_rational(&(num / Rational::from(denom.clone())), prec);
        p.add_term(Expo(vec![(deg - ell) as u16]), CScalar::from_real(c));
    }
    p
}

/// d^m/dz^m of the l-th Legendre polynomial (zero polynomial when m > l).
pub fn assoc_legendre_derivative_part(ell: u32, m: u32, prec: u32) -> SparsePoly {
    let mut p = legendre(ell, prec);
    for _ in 0..m {
        p = p.derivative(0);
    }
    p
}

/// Cartesian Laplace spherical harmonic Y_l^m as a homogeneous complex
/// polynomial of degree l in (x, y, z), orthonormal for the normalized
/// sphere measure.
pub fn spherical_harmonic_cartesian(
    ell: u32,
    m: i64,
    prec: u32,
) -> Result<SparsePoly, HarmonicsError> {
    if m.unsigned_abs() > ell as u64 {
        return Err(HarmonicsError::OrderOutOfRange(m, ell));
    }
    if m < 0 {
        let pos = spherical_harmonic_cartesian(ell, -m, prec)?;
        let conj = pos.conj();
        return Ok(if (-m) % 2 == 1 { conj.neg() } else { conj });
    }
    let m = m as u32;
    // (-1)^m c_l^m = sqrt((2l+1)(l-m)!/(l+m)!)
    let norm2 = Rational::from((
        Integer::from(2 * ell + 1) * factorial(ell - m),
        factorial(ell + m),
    ));
    let norm = Scalar::from_rational(&norm2, prec).sqrt();

    // derivative part in z
    let dz = assoc_legendre_derivative_part(ell, m, prec);
    // (x + iy)^m
    let x = SparsePoly::var(0, 3, prec);
    let y = SparsePoly::var(1, 3, prec);
    let xiy = x.add(&y.scale_c(&CScalar::i(prec))).unwrap();
    let mut phase = SparsePoly::one(3, prec);
    for _ in 0..m {
        phase = phase.mul(&xiy).unwrap();
    }
    // lift dz from 1 variable (z) into 3 variables
    let dz3 = dz.relabel(&[2], 3);
    let raw = dz3.mul(&phase).unwrap().scale(&norm);

    // homogenize to degree ell with powers of x^2+y^2+z^2
    let mut r2 = SparsePoly::zero(3, prec);
    for v in 0..3 {
        let xv = SparsePoly::var(v, 3, prec);
        r2 = r2.add(&xv.mul(&xv).unwrap()).unwrap();
    }
    let mut out = SparsePoly::zero(3, prec);
    for (e, c) in raw.terms() {
        let deg = e.degree();
        debug_assert!(deg <= ell && (ell - deg) % 2 == 0);
        let k = (ell - deg) / 2;
        let mut t = SparsePoly::zero(3, prec);
        t.add_term(e.clone(), c.clone());
        for _ in 0..k {
            t = t.mul(&r2).unwrap();
        }
        out = out.add(&t).unwrap();
    }
    Ok(out)
}

/// Clebsch-Gordan coefficient by the explicit factorial sum. Returns zero
/// when m1 + m2 != m or l is outside the triangle range.
pub fn clebsch_gordan(key: CGKey, prec: u32) -> Scalar {
    assert!(key.is_valid(), "invalid CG key {:?}", key);
    let CGKey { l1, m1, l2, m2, l, m } = key;
    if m1 + m2 != m {
        return Scalar::zero(prec);
    }
    if (l as i64) < (l1 as i64 - l2 as i64).abs() || l > l1 + l2 {
        return Scalar::zero(prec);
    }
    let l1 = l1 as i64;
    let l2 = l2 as i64;
    let l = l as i64;
    let f = |v: i64| -> Integer { factorial(v as u32) };
    // prefactor under the square root (exact rational)
    let pre = Rational::from((
        Integer::from(2 * l + 1) * f(l1 + l2 - l) * f(l1 - l2 + l) * f(-l1 + l2 + l),
        f(l1 + l2 + l + 1),
    )) * Rational::from(
        f(l1 + m1) * f(l1 - m1) * f(l2 + m2) * f(l2 - m2) * f(l + m) * f(l - m),
    );
    // finite sum over nu keeping all factorial arguments nonnegative
    let lo = 0i64.max(-(l - l2 + m1)).max(-(l - l1 - m2));
    let hi = (l1 + l2 - l).min(l1 - m1).min(l2 + m2);
    let mut sum = Rational::new();
    for nu in lo..=hi {
        let den = f(nu)
            * f(l1 + l2 - l - nu)
            * f(l1 - m1 - nu)
            * f(l2 + m2 - nu)
            * f(l - l2 + m1 + nu)
            * f(l - l1 - m2 + nu);
        let term = Rational::from((Integer::from(1), den));
        if nu % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Scalar::from_rational(&pre, prec).sqrt() * Scalar::from_rational(&sum, prec)
}

/// Expansion of Phi^{-1}_{l1,l2}(Y_l^m) over the tensor basis: all pairs
/// (m1, m2) with m1 + m2 = m and a nonzero Clebsch-Gordan coefficient.
pub fn phi_inverse_expand(
    l1: u32,
    l2: u32,
    l: u32,
    m: i64,
    prec: u32,
) -> Result<Vec<(i64, i64, Scalar)>, HarmonicsError> {
    let lo = (l1 as i64 - l2 as i64).unsigned_abs() as u32;
    if l < lo || l > l1 + l2 {
        return Err(HarmonicsError::CouplingRange(l, lo, l1 + l2));
    }
    let mut out = Vec::new();
    let m1_lo = (-(l1 as i64)).max(m - l2 as i64);
    let m1_hi = (l1 as i64).min(m + l2 as i64);
    for m1 in m1_lo..=m1_hi {
        let m2 = m - m1;
        let c = clebsch_gordan(CGKey { l1, m1, l2, m2, l, m }, prec);
        if !c.is_zero() {
            out.push((m1, m2, c));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{cast_tolerance, sphere_inner_product};
    use crate::scalar::DEFAULT_PRECISION as P;

    fn close(a: &Scalar, b: f64) -> bool {
        (a.to_f64() - b).abs() < 1e-12
    }

    #[test]
    fn legendre_small() {
        let p0 = legendre(0, P);
        assert_eq!(p0.num_terms(), 1);
        assert!(close(&p0.coeff(&Expo(vec![0])).re, 1.0));
        let p1 = legendre(1, P);
        assert!(close(&p1.coeff(&Expo(vec![1])).re, 1.0));
        let p2 = legendre(2, P);
        assert!(close(&p2.coeff(&Expo(vec![2])).re, 1.5));
        assert!(close(&p2.coeff(&Expo(vec![0])).re, -0.5));
    }

    #[test]
    fn assoc_derivative_parts() {
        // d/dz z = 1
        let d11 = assoc_legendre_derivative_part(1, 1, P);
        assert!(close(&d11.coeff(&Expo(vec![0])).re, 1.0));
        // zeroth derivative is P_l itself
        let d20 = assoc_legendre_derivative_part(2, 0, P);
        assert!(close(&d20.coeff(&Expo(vec![2])).re, 1.5));
        // d/dz (3z^2-1)/2 = 3z
        let d21 = assoc_legendre_derivative_part(2, 1, P);
        assert!(close(&d21.coeff(&Expo(vec![1])).re, 3.0));
        // m > l gives the zero polynomial
        assert!(assoc_legendre_derivative_part(2, 3, P).is_zero());
    }

    #[test]
    fn harmonics_base_cases() {
        let y00 = spherical_harmonic_cartesian(0, 0, P).unwrap();
        assert_eq!(y00.num_terms(), 1);
        assert!(close(&y00.coeff(&Expo(vec![0, 0, 0])).re, 1.0));
        let y10 = spherical_harmonic_cartesian(1, 0, P).unwrap();
        assert!(close(&y10.coeff(&Expo(vec![0, 0, 1])).re, 3f64.sqrt()));
        assert!(spherical_harmonic_cartesian(2, 3, P).is_err());
    }

    #[test]
    fn harmonics_homogeneous_and_harmonic() {
        for ell in 0..=6u32 {
            for m in -(ell as i64)..=(ell as i64) {
                let y = spherical_harmonic_cartesian(ell, m, P).unwrap();
                for (e, _) in y.terms() {
                    assert_eq!(e.degree(), ell, "Y_{}^{} not homogeneous", ell, m);
                }
                let mut lap = SparsePoly::zero(3, P);
                for v in 0..3 {
                    lap = lap.add(&y.derivative(v).derivative(v)).unwrap();
                }
                assert!(lap.is_zero(), "Y_{}^{} not harmonic", ell, m);
            }
        }
    }

    #[test]
    fn harmonics_orthonormal() {
        let tol = cast_tolerance(P);
        let lmax = 6u32;
        let mut all = Vec::new();
        for ell in 0..=lmax {
            for m in -(ell as i64)..=(ell as i64) {
                all.push((ell, m, spherical_harmonic_cartesian(ell, m, P).unwrap()));
            }
        }
        for (i, (l1, m1, y1)) in all.iter().enumerate() {
            for (l2, m2, y2) in all.iter().skip(i) {
                let ip = sphere_inner_product(y1, y2).unwrap();
                let want = if l1 == l2 && m1 == m2 { 1.0 } else { 0.0 };
                assert!(
                    (&ip.re - &Scalar::from_f64(want, P)).abs() <= tol && ip.im.abs() <= tol,
                    "<Y_{}^{}, Y_{}^{}> = {:?}",
                    l1,
                    m1,
                    l2,
                    m2,
                    ip
                );
            }
        }
    }

    #[test]
    fn cg_values() {
        let c = clebsch_gordan(CGKey { l1: 0, m1: 0, l2: 0, m2: 0, l: 0, m: 0 }, P);
        assert!(close(&c, 1.0));
        // antisymmetric coupling vanishes
        let c = clebsch_gordan(CGKey { l1: 1, m1: 0, l2: 1, m2: 0, l: 1, m: 0 }, P);
        assert!(c.is_zero() || c.abs().to_f64() < 1e-70);
        // direct evaluation
        let c = clebsch_gordan(CGKey { l1: 1, m1: 0, l2: 1, m2: 0, l: 2, m: 0 }, P);
        assert!(close(&c, (2f64 / 3f64).sqrt()));
        // selection rules
        assert!(clebsch_gordan(CGKey { l1: 1, m1: 1, l2: 1, m2: 1, l: 2, m: 0 }, P).is_zero());
        assert!(clebsch_gordan(CGKey { l1: 1, m1: 0, l2: 1, m2: 0, l: 3, m: 0 }, P).is_zero());
    }

    #[test]
    fn cg_orthogonality_and_symmetry() {
        let tol = cast_tolerance(P);
        for l1 in 0..=4u32 {
            for l2 in 0..=4u32 {
                let lo = (l1 as i64 - l2 as i64).unsigned_abs() as u32;
                for l in lo..=(l1 + l2) {
                    for lp in lo..=(l1 + l2) {
                        for m in -(l as i64)..=(l as i64) {
                            if m.unsigned_abs() > lp as u64 {
                                continue;
                            }
                            let mut s = Scalar::zero(P);
                            for m1 in -(l1 as i64)..=(l1 as i64) {
                                let m2 = m - m1;
                                if m2.unsigned_abs() > l2 as u64 {
                                    continue;
                                }
                                let a = clebsch_gordan(CGKey { l1, m1, l2, m2, l, m }, P);
                                let b = clebsch_gordan(CGKey { l1, m1, l2, m2, l: lp, m }, P);
                                s += &(a * b);
                            }
                            let want = if l == lp { 1.0 } else { 0.0 };
                            assert!(
                                (&s - &Scalar::from_f64(want, P)).abs() <= tol,
                                "orthogonality failed l1={} l2={} l={} l'={} m={}",
                                l1,
                                l2,
                                l,
                                lp,
                                m
                            );
                        }
                    }
                }
            }
        }
        // symmetry relation C^{l,m}_{l2,m2,l1,m1} = (-1)^(l1+l2-l) C^{l,m}_{l1,m1,l2,m2}
        for l1 in 0..=4u32 {
            for l2 in 0..=4u32 {
                let lo = (l1 as i64 - l2 as i64).unsigned_abs() as u32;
                for l in lo..=(l1 + l2) {
                    for m1 in -(l1 as i64)..=(l1 as i64) {
                        for m2 in -(l2 as i64)..=(l2 as i64) {
                            let m = m1 + m2;
                            if m.unsigned_abs() > l as u64 {
                                continue;
                            }
                            let a = clebsch_gordan(CGKey { l1, m1, l2, m2, l, m }, P);
                            let b = clebsch_gordan(CGKey { l1: l2, m1: m2, l2: l1, m2: m1, l, m }, P);
                            let sign = if (l1 + l2 - l) % 2 == 0 { 1.0 } else { -1.0 };
                            assert!(
                                (&b - &(a.clone() * Scalar::from_f64(sign, P))).abs()
                                    <= cast_tolerance(P),
                                "symmetry failed l1={} l2={} l={} m1={} m2={}",
                                l1,
                                l2,
                                l,
                                m1,
                                m2
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn phi_inverse_cases() {
        let e = phi_inverse_expand(0, 0, 0, 0, P).unwrap();
        assert_eq!(e.len(), 1);
        assert!(close(&e[0].2, 1.0));
        assert_eq!((e[0].0, e[0].1), (0, 0));
        // out of coupling range
        assert!(phi_inverse_expand(1, 1, 3, 0, P).is_err());
        // normalization: sum of squares of coefficients is 1
        for l1 in 0..=3u32 {
            for l2 in 0..=3u32 {
                let lo = (l1 as i64 - l2 as i64).unsigned_abs() as u32;
                for l in lo..=(l1 + l2) {
                    for m in -(l as i64)..=(l as i64) {
                        let e = phi_inverse_expand(l1, l2, l, m, P).unwrap();
                        let mut s = Scalar::zero(P);
                        for (_, _, c) in &e {
                            s += &(c * c);
                        }
                        assert!(
                            (&s - &Scalar::one(P)).abs() <= cast_tolerance(P),
                            "unit norm failed {} {} {} {}",
                            l1,
                            l2,
                            l,
                            m
                        );
                    }
                }
            }
        }
        // l1=l2=1 coupling to l=1: symmetric part vanishes
        for m in -1i64..=1 {
            let e = phi_inverse_expand(1, 1, 1, m, P).unwrap();
            // symmetrized coefficient c(m1,m2)+c(m2,m1) must vanish
            for &(m1, m2, ref c) in &e {
                let back: Vec<_> = e.iter().filter(|t| t.0 == m2 && t.1 == m1).collect();
                let other = back.first().map(|t| t.2.clone()).unwrap_or(Scalar::zero(P));
                assert!((&other + c).abs() <= cast_tolerance(P));
            }
        }
    }
}
