use num_rational::Rational64;

/// Largest denominator considered by [`near_rational`].
pub const MAX_DENOMINATOR: i64 = 1_000_000;
/// Distance below which a float counts as equal to a rational.
pub const RATIONAL_TOL: f64 = 1e-12;

/// Continued-fraction convergents of `x` with denominators up to `max_den`.
pub fn convergents(x: f64, max_den: i64) -> Vec<Rational64> {
    let mut out = Vec::new();
    if !x.is_finite() {
        return out;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 || h2.abs() > i64::MAX as i128 {
            break;
        }
        out.push(Rational64::new(h2 as i64, k2 as i64));
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    out
}

pub fn to_f64(q: Rational64) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// A rational with denominator at most `max_den` within `tol` of `x`.
pub fn near_rational(x: f64, max_den: i64, tol: f64) -> Option<Rational64> {
    convergents(x, max_den)
        .into_iter()
        .find(|q| (to_f64(*q) - x).abs() <= tol)
}
