use std::fmt::Debug;

use num_traits::{FromPrimitive, Num, Signed};

/// Coefficient field for the moment, cumulant and polynomial tables.
///
/// `f64` is the working type; any exact field with the same traits (for
/// example a big rational) runs the same code paths.
pub trait Scalar: Num + Signed + FromPrimitive + Clone + PartialEq + Debug {
    fn from_count(k: u64) -> Self {
        Self::from_u64(k).expect("count representable")
    }

    fn factorial(k: u32) -> Self {
        (1..=u64::from(k)).fold(Self::one(), |acc, i| acc * Self::from_count(i))
    }

    fn binomial(n: u32, k: u32) -> Self {
        if k > n {
            return Self::zero();
        }
        Self::factorial(n) / (Self::factorial(k) * Self::factorial(n - k))
    }

    /// Multi-index factorial `ν₁!⋯ν_d!`.
    fn multi_factorial(entries: &[u32]) -> Self {
        entries
            .iter()
            .fold(Self::one(), |acc, &v| acc * Self::factorial(v))
    }
}

impl<T> Scalar for T where T: Num + Signed + FromPrimitive + Clone + PartialEq + Debug {}
