//! Deterministic sampling of sphere points at working precision.

use crate::scalar::Scalar;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A point drawn from a cube-rejection direction sample, normalized at full
/// precision so it lies on the sphere to within an ulp.
pub fn random_unit_point(rng: &mut ChaCha8Rng, prec: u32) -> [Scalar; 3] {
    loop {
        let v: [f64; 3] = [
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
        ];
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if !(1e-3..=1.0).contains(&n2) {
            continue;
        }
        let mut out = [Scalar::zero(prec), Scalar::zero(prec), Scalar::zero(prec)];
        let mut norm2 = Scalar::zero(prec);
        for (o, x) in out.iter_mut().zip(v) {
            *o = Scalar::from_f64(x, prec);
            norm2 += &(&*o * &*o);
        }
        let inv = norm2.sqrt().recip();
        for o in out.iter_mut() {
            *o = &*o * &inv;
        }
        return out;
    }
}

/// A tuple of points with all pairwise inner products at most `u_max`
/// (an independent set of the threshold graph). `u_max` is in f64 because
/// rejection only needs approximate comparisons.
pub fn random_independent_tuple(
    rng: &mut ChaCha8Rng,
    prec: u32,
    count: usize,
    u_max: f64,
    max_attempts: usize,
) -> Option<Vec<[Scalar; 3]>> {
    'outer: for _ in 0..max_attempts {
        let pts: Vec<[Scalar; 3]> = (0..count).map(|_| random_unit_point(rng, prec)).collect();
        for a in 0..count {
            for b in (a + 1)..count {
                let dot: f64 = (0..3).map(|k| pts[a][k].to_f64() * pts[b][k].to_f64()).sum();
                if dot > u_max {
                    continue 'outer;
                }
            }
        }
        return Some(pts);
    }
    None
}

/// Inner products of a tuple in lexicographic edge order.
pub fn pair_inner_products(pts: &[[Scalar; 3]]) -> Vec<Scalar> {
    let prec = pts.first().map(|p| p[0].prec()).unwrap_or(64);
    let mut out = Vec::new();
    for a in 0..pts.len() {
        for b in (a + 1)..pts.len() {
            let mut dot = Scalar::zero(prec);
            for k in 0..3 {
                dot += &(&pts[a][k] * &pts[b][k]);
            }
            out.push(dot);
        }
    }
    out
}
