use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Zero};

/// Scalar field for weights and function values.
///
/// Measures take values in the nonnegative part of the field; functions take
/// values in `Complex<T>`. Exact types (`BigRational`, `Ratio<i64>`) make
/// every check an equality; `f64` works but equality checks become fragile.
pub trait Scalar:
    Clone + Num + Neg<Output = Self> + PartialOrd + FromPrimitive + Debug + Send + Sync + 'static
{
    /// `num / den`; panics if `den == 0`.
    fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_i64(num).expect("integer fits scalar") / Self::from_i64(den).expect("integer fits scalar")
    }

    fn is_positive_value(&self) -> bool {
        *self > Self::zero()
    }

    fn is_negative_value(&self) -> bool {
        *self < Self::zero()
    }
}

impl<T> Scalar for T where T: Clone + Num + Neg<Output = T> + PartialOrd + FromPrimitive + Debug + Send + Sync + 'static {}

/// Always `num/den`, including integers (`3/1`) and zero (`0/1`).
pub fn rational_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `"a/b"` or `"a"`; surrounding whitespace is ignored.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().ok()?;
            Some(BigRational::new(n, BigInt::one()))
        }
    }
}
