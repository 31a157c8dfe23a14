//! Small helpers around `BigRational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// Exact rational value of a finite float.
pub fn exact(x: f64) -> BigRational {
    BigRational::from_f64(x).expect("finite float")
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Continued-fraction convergents of `x` with denominators up to `max_den`,
/// in order of increasing denominator.
pub fn convergents(x: f64, max_den: i64) -> Vec<BigRational> {
    let mut out = Vec::new();
    if !x.is_finite() {
        return out;
    }
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        let ai = match BigInt::from_f64(a) {
            Some(v) => v,
            None => break,
        };
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        if k2 > BigInt::from(max_den) {
            break;
        }
        out.push(BigRational::new(h2.clone(), k2.clone()));
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let frac = rest - a;
        if frac.abs() < 1e-15 {
            break;
        }
        rest = 1.0 / frac;
    }
    out
}

/// Smallest-denominator rational within `tol` of `x` that passes `verify`.
pub fn recognize<F>(x: f64, tol: f64, max_den: i64, verify: F) -> Option<BigRational>
where
    F: Fn(&BigRational) -> bool,
{
    convergents(x, max_den)
        .into_iter()
        .find(|r| (to_f64(r) - x).abs() <= tol && verify(r))
}

/// `p/q` text, or just `p` for integers.
pub fn format(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn abs(r: &BigRational) -> BigRational {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convergents_of_sixth() {
        let r = recognize(1.0 / 6.0, 1e-12, 1000, |_| true).unwrap();
        assert_eq!(format(&r), "1/6");
        let r = recognize(4.0 / 3.0, 1e-12, 1000, |_| true).unwrap();
        assert_eq!(format(&r), "4/3");
        assert_eq!(format(&recognize(0.0, 1e-12, 10, |_| true).unwrap()), "0");
    }

    #[test]
    fn irrational_not_recognized() {
        let x = (7.0 - 17f64.sqrt()) / 12.0;
        assert!(recognize(x, 1e-15, 1000, |_| true).is_none());
    }
}
