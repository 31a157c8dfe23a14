//! Real root isolation for integer polynomials on a rational interval.
//!
//! Signs are always evaluated exactly (homogenized integer Horner at rational
//! points), so clustered roots cannot be lost to floating cancellation. A
//! uniform grid brackets sign changes; each bracket is then bisected.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Signed;

use crate::cheb::IntPoly;
use crate::rational::to_f64;
use crate::{Error, Exec, Result};

/// Grid and refinement settings for [`isolate_roots`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isolation {
    /// Number of grid cells on the first attempt.
    pub grid_cells: u64,
    /// Bisection stops once a bracket is at most this wide.
    pub width: f64,
    /// Grid multiplier for the single retry on a count mismatch.
    pub retry_factor: u64,
}

impl Default for Isolation {
    fn default() -> Self {
        Isolation {
            grid_cells: 1 << 14,
            width: 1e-13,
            retry_factor: 4,
        }
    }
}

/// A root bracket `[lo, hi]` with exact rational endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct RootBracket {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RootBracket {
    pub fn midpoint(&self) -> f64 {
        to_f64(&((&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))))
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

fn sign_of(p: &IntPoly, x: &BigRational) -> i8 {
    p.sign_at(x.numer(), x.denom())
}

/// Isolates exactly `expected` simple roots of `poly` in `[lo, hi]`.
///
/// Returns brackets in increasing order. Fails with
/// [`Error::RootCountMismatch`] if neither the default grid nor one refined
/// grid yields the expected count.
pub fn isolate_roots(
    poly: &IntPoly,
    lo: &BigRational,
    hi: &BigRational,
    expected: usize,
    opts: Isolation,
    exec: Exec,
) -> Result<Vec<RootBracket>> {
    let mut cells = opts.grid_cells.max(1);
    let mut found = 0;
    for _attempt in 0..2 {
        let roots = scan(poly, lo, hi, cells, opts.width, exec);
        if roots.len() == expected {
            return Ok(roots);
        }
        found = roots.len();
        log::debug!(
            "root isolation found {found} of {expected} roots on {cells} cells, refining"
        );
        cells = cells.saturating_mul(opts.retry_factor.max(2));
    }
    Err(Error::RootCountMismatch {
        expected,
        found,
        lo: to_f64(lo),
        hi: to_f64(hi),
    })
}

fn scan(
    poly: &IntPoly,
    lo: &BigRational,
    hi: &BigRational,
    cells: u64,
    width: f64,
    exec: Exec,
) -> Vec<RootBracket> {
    if poly.is_zero() {
        return Vec::new();
    }
    // x_k = (base + k * step) / den with integer base, step and den
    let lcm = lo.denom().lcm(hi.denom());
    let den = &lcm * BigInt::from(cells);
    let base = (lo * BigRational::from_integer(den.clone())).to_integer();
    let step = ((hi - lo) * BigRational::from_integer(lcm)).to_integer();

    let signs: Vec<i8> = exec.map_range(cells as usize + 1, |k| {
        let num = &base + &step * BigInt::from(k);
        poly.sign_at(&num, &den)
    });
    let point = |k: usize| BigRational::new(&base + &step * BigInt::from(k), den.clone());

    let mut brackets = Vec::new();
    for k in 0..=cells as usize {
        if signs[k] == 0 {
            let x = point(k);
            brackets.push(RootBracket { lo: x.clone(), hi: x });
        } else if k < cells as usize && signs[k + 1] != 0 && signs[k] != signs[k + 1] {
            brackets.push(RootBracket {
                lo: point(k),
                hi: point(k + 1),
            });
        }
    }
    exec.map(&brackets, |b| refine(poly, b.clone(), width))
}

/// Bisects a sign-change bracket until it is at most `width` wide.
pub fn refine(poly: &IntPoly, mut b: RootBracket, width: f64) -> RootBracket {
    if b.is_exact() {
        return b;
    }
    let two = BigRational::from_integer(BigInt::from(2));
    let lo_sign = sign_of(poly, &b.lo);
    while to_f64(&(&b.hi - &b.lo)) > width {
        let mid = (&b.lo + &b.hi) / &two;
        match sign_of(poly, &mid) {
            0 => {
                return RootBracket {
                    lo: mid.clone(),
                    hi: mid,
                }
            }
            s if s == lo_sign => b.lo = mid,
            _ => b.hi = mid,
        }
    }
    b
}

/// `|p(x)|` at a float point, evaluated exactly then rounded.
pub fn abs_value_at(poly: &IntPoly, x: f64) -> f64 {
    let v = poly.eval_rational(&crate::rational::exact(x));
    to_f64(&v.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn factored_cubic() {
        // 3 lambda (2 lambda - 1)(6 lambda - 5)
        let p = IntPoly::from_i64s(&[0, 15, -48, 36]);
        let roots = isolate_roots(&p, &r(0, 1), &r(4, 3), 3, Isolation::default(), Exec::Sequential)
            .unwrap();
        let mids: Vec<f64> = roots.iter().map(|b| b.midpoint()).collect();
        for (got, want) in mids.iter().zip([0.0, 0.5, 5.0 / 6.0]) {
            assert!((got - want).abs() < 1e-13, "{got} vs {want}");
        }
        assert!(roots[0].is_exact());
    }

    #[test]
    fn close_roots_are_separated() {
        // roots 1/3 and 1/3 + 2^-12, a few grid cells apart
        let a = IntPoly::from_i64s(&[-1, 3]);
        let b = IntPoly::new(vec![-(BigInt::from(1) << 12usize) - BigInt::from(3), BigInt::from(3) << 12usize]);
        let p = &a * &b;
        let roots = isolate_roots(&p, &r(0, 1), &r(1, 1), 2, Isolation::default(), Exec::Parallel)
            .unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots[0].midpoint() < roots[1].midpoint());
    }

    #[test]
    fn mismatch_reported() {
        let p = IntPoly::from_i64s(&[1, 0, 1]); // no real roots
        let err = isolate_roots(&p, &r(0, 1), &r(1, 1), 1, Isolation::default(), Exec::Sequential)
            .unwrap_err();
        assert!(matches!(err, Error::RootCountMismatch { expected: 1, found: 0, .. }));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let p = IntPoly::from_i64s(&[-1, 3, 2]);
        let a = isolate_roots(&p, &r(-3, 1), &r(1, 1), 2, Isolation::default(), Exec::Sequential).unwrap();
        let b = isolate_roots(&p, &r(-3, 1), &r(1, 1), 2, Isolation::default(), Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
