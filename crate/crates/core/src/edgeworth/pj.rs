use crate::cumulant::{chi_poly, CumulantSet, Polynomial, Scalar};
use crate::error::{Error, Result};

/// The correction polynomial
/// `P̃_j(z) = Σ_{m=1}^{j} (1/m!) Σ_{j₁+…+j_m=j} Π_k χ_{j_k+2}(z)/(j_k+2)!`
/// with the inner sum over ordered tuples of positive integers.
///
/// Its monomials have orders in `[j+2, 3j]` and it only reads cumulants of
/// order at most `j+2`.
pub fn pj_polynomial<T: Scalar>(j: u32, c: &CumulantSet<T>) -> Result<Polynomial<T>> {
    if j == 0 {
        return Ok(Polynomial::constant(c.dim(), T::one()));
    }
    if j + 2 > c.max_order() {
        return Err(Error::UnsupportedOrder(format!(
            "P_{j} needs cumulants up to order {}, have {}",
            j + 2,
            c.max_order()
        )));
    }
    let j = j as usize;
    // q[r] = χ_{r+2}(z)/(r+2)!, r = 1..=j
    let mut q = vec![Polynomial::zero(c.dim())];
    for r in 1..=j as u32 {
        q.push(chi_poly(r + 2, c)?.scale(&(T::one() / T::factorial(r + 2))));
    }
    // tuples[m][k]: sum over ordered m-tuples of positive integers summing to k
    let mut prev: Vec<Polynomial<T>> = q.clone();
    let mut total = prev[j].clone();
    for m in 2..=j {
        let mut next = vec![Polynomial::zero(c.dim()); j + 1];
        for (k, slot) in next.iter_mut().enumerate().skip(m) {
            for r in 1..=k - (m - 1) {
                if q[r].is_zero() || prev[k - r].is_zero() {
                    continue;
                }
                *slot = slot.add(&q[r].mul(&prev[k - r]));
            }
        }
        total = total.add(&next[j].scale(&(T::one() / T::factorial(m as u32))));
        prev = next;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cumulant::MultiIndex;

    fn skewed(k3: f64, k4: f64) -> CumulantSet {
        CumulantSet::from_fn(1, 4, |nu| match nu.order() {
            2 => 1.0,
            3 => k3,
            4 => k4,
            _ => 0.0,
        })
        .unwrap()
    }

    #[test]
    fn first_two_terms_in_one_dimension() {
        let (k3, k4) = (0.8, -0.3);
        let c = skewed(k3, k4);
        let p1 = pj_polynomial(1, &c).unwrap();
        assert_eq!(p1.degrees(), vec![3]);
        assert!((p1.coeff(&MultiIndex::new(vec![3])) - k3 / 6.0).abs() < 1e-15);

        let p2 = pj_polynomial(2, &c).unwrap();
        assert_eq!(p2.degrees(), vec![4, 6]);
        assert!((p2.coeff(&MultiIndex::new(vec![4])) - k4 / 24.0).abs() < 1e-15);
        assert!((p2.coeff(&MultiIndex::new(vec![6])) - k3 * k3 / 72.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_cumulants_give_zero() {
        let c = skewed(0.0, 0.0);
        assert!(pj_polynomial(1, &c).unwrap().is_zero());
        assert!(pj_polynomial(2, &c).unwrap().is_zero());
    }

    #[test]
    fn order_check() {
        assert!(matches!(
            pj_polynomial(3, &skewed(1.0, 1.0)),
            Err(Error::UnsupportedOrder(_))
        ));
    }
}
