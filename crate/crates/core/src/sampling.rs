//! Seeded random inputs for the verification routines.

use num_complex::Complex;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::measures::{BaseMeasure, FinSuppFn};
use crate::Scalar;

/// `n/d` with `n ∈ [-6, 6]`, `d ∈ [1, 5]`.
pub fn rational<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::ratio(rng.gen_range(-6..=6), rng.gen_range(1..=5))
}

/// Strictly positive: `n/d` with `n ∈ [1, 9]`, `d ∈ [1, 7]`.
pub fn positive_rational<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::ratio(rng.gen_range(1..=9), rng.gen_range(1..=7))
}

pub fn gaussian<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    Complex::new(rational(rng), rational(rng))
}

pub fn positive_measure<T: Scalar, R: Rng + ?Sized>(rng: &mut R, vertices: usize) -> BaseMeasure<T> {
    BaseMeasure::new((0..vertices).map(|_| positive_rational(rng)).collect()).expect("positive weights")
}

/// A function with between 1 and `max_terms` terms drawn from `candidates`.
/// May come out zero if coefficients cancel to zero; callers do not rely on
/// nonzero samples.
pub fn function<K: Ord + Clone, T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    candidates: &[K],
    max_terms: usize,
) -> FinSuppFn<K, T> {
    if candidates.is_empty() {
        return FinSuppFn::zero();
    }
    let terms = rng.gen_range(1..=max_terms.max(1));
    FinSuppFn::from_pairs((0..terms).map(|_| {
        let k = candidates.choose(rng).expect("nonempty").clone();
        (k, gaussian(rng))
    }))
}
