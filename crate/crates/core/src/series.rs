//! Truncated formal power series with exact rational coefficients, and
//! the secant-plane counting series built on them.
//!
//! A [`PowerSeries`] stores coefficients `0..=order` in one formal
//! variable `z`. All arithmetic is exact (`BigRational`) and respects the
//! truncation order: products are plain convolutions cut at the order,
//! inverses and square roots come from the standard recurrences.
//!
//! [`n_d_table`] expands
//!
//! ```text
//! (2 / ((1+4z)^(1/2) + 1))^(2g-2-m) * (1+4z)^((g-1)/2)
//! ```
//!
//! whose z^d coefficient is the virtual count `N_d` of d-secant
//! (d-2)-planes to a curve of genus `g` and degree `m` in projective
//! (2d-2)-space. Both half-integer powers reduce to integer powers of the
//! square-root series; the reciprocal factor is computed by series
//! inversion of `((1+4z)^(1/2) + 1)/2`, keeping everything away from
//! division by `z`. The values are exact rationals; integrality is
//! asserted per entry and violations are reported, not rounded away.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// A formal power series truncated after `z^order`, with exact rational
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<BigRational>,
}

fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl PowerSeries {
    /// Series from coefficients `c0, c1, ...`; the order is
    /// `coeffs.len() - 1`.
    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty(), "a series has at least its constant term");
        PowerSeries { coeffs }
    }

    pub fn constant(value: i64, order: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); order + 1];
        coeffs[0] = rational(value);
        PowerSeries { coeffs }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(1, order)
    }

    /// The polynomial `c + a z` padded to `order`.
    pub fn linear(c: i64, a: i64, order: usize) -> Self {
        let mut s = Self::constant(c, order);
        if order >= 1 {
            s.coeffs[1] = rational(a);
        }
        s
    }

    /// Inclusive truncation order.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> &BigRational {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Copy truncated (or zero-padded) to a new order.
    pub fn truncated(&self, order: usize) -> PowerSeries {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, BigRational::zero());
        PowerSeries { coeffs }
    }

    pub fn add(&self, other: &PowerSeries) -> PowerSeries {
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|i| &self.coeffs[i] + &other.coeffs[i])
            .collect();
        PowerSeries { coeffs }
    }

    pub fn sub(&self, other: &PowerSeries) -> PowerSeries {
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|i| &self.coeffs[i] - &other.coeffs[i])
            .collect();
        PowerSeries { coeffs }
    }

    pub fn scale(&self, factor: &BigRational) -> PowerSeries {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Truncated convolution product.
    pub fn mul(&self, other: &PowerSeries) -> PowerSeries {
        let order = self.order().min(other.order());
        let mut coeffs = vec![BigRational::zero(); order + 1];
        for i in 0..=order {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=order - i {
                if !other.coeffs[j].is_zero() {
                    coeffs[i + j] += &self.coeffs[i] * &other.coeffs[j];
                }
            }
        }
        PowerSeries { coeffs }
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn inverse(&self) -> Result<PowerSeries> {
        if self.coeffs[0].is_zero() {
            return Err(Error::NonUnitConstantTerm("0".into()));
        }
        let order = self.order();
        let mut inv = vec![BigRational::zero(); order + 1];
        inv[0] = self.coeffs[0].recip();
        for n in 1..=order {
            let mut acc = BigRational::zero();
            for i in 1..=n {
                if !self.coeffs[i].is_zero() {
                    acc += &self.coeffs[i] * &inv[n - i];
                }
            }
            inv[n] = -acc / &self.coeffs[0];
        }
        Ok(PowerSeries { coeffs: inv })
    }

    /// Square root with constant term 1; requires `f(0) = 1`.
    pub fn sqrt(&self) -> Result<PowerSeries> {
        if !self.coeffs[0].is_one() {
            return Err(Error::NonUnitConstantTerm(self.coeffs[0].to_string()));
        }
        let order = self.order();
        let mut root = vec![BigRational::zero(); order + 1];
        root[0] = BigRational::one();
        let two = rational(2);
        for n in 1..=order {
            let mut acc = BigRational::zero();
            for i in 1..n {
                acc += &root[i] * &root[n - i];
            }
            root[n] = (&self.coeffs[n] - acc) / &two;
        }
        Ok(PowerSeries { coeffs: root })
    }

    fn pow_unsigned(&self, exponent: u64) -> PowerSeries {
        let mut result = PowerSeries::one(self.order());
        let mut base = self.clone();
        let mut e = exponent;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }
}

/// `f^(numerator/denominator)` for a series with unit constant term;
/// the denominator must be 1 or 2. Negative exponents go through series
/// inversion, half-integer ones through the square root.
pub fn series_pow(f: &PowerSeries, numerator: i64, denominator: u32) -> Result<PowerSeries> {
    if !f.coeffs[0].is_one() {
        return Err(Error::NonUnitConstantTerm(f.coeffs[0].to_string()));
    }
    let base = match denominator {
        1 => f.clone(),
        2 => f.sqrt()?,
        other => {
            return Err(Error::BadExponent(format!(
                "denominator {other} is not 1 or 2"
            )))
        }
    };
    let base = if numerator < 0 { base.inverse()? } else { base };
    Ok(base.pow_unsigned(numerator.unsigned_abs()))
}

/// The binomial series of `(1+4z)^(1/2)`: coefficient of `z^j` is
/// `C(1/2, j) * 4^j`, an integer for every `j`.
pub fn sqrt_1_plus_4z(order: usize) -> PowerSeries {
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut current = BigRational::one();
    coeffs.push(current.clone());
    for j in 1..=order {
        // c_j = c_{j-1} * (1/2 - (j-1)) / j * 4
        let step = BigRational::new(BigInt::from(3 - 2 * j as i64), BigInt::from(2 * j as i64));
        current = &current * step * rational(4);
        coeffs.push(current.clone());
    }
    PowerSeries { coeffs }
}

/// Exact table of the virtual secant-plane counts `N_0..N_max_d` for
/// genus `g` and curve degree `m`.
#[derive(Debug, Clone)]
pub struct SecantTable {
    pub genus: i64,
    pub curve_degree: i64,
    /// `values[d]` is the exact rational `N_d`.
    pub values: Vec<BigRational>,
    /// Indices `d` whose `N_d` came out non-integral. Expected to be
    /// empty; surfaced instead of rounded.
    pub non_integral: Vec<usize>,
}

/// Expand the counting series for genus `g`, degree `m`, up to `z^max_d`.
///
/// Internally works with two guard terms beyond `max_d` so truncation
/// slips would show up in tests, then cuts back.
pub fn n_d_table(g: i64, m: i64, max_d: usize) -> Result<SecantTable> {
    let order = max_d + 2;
    let root = sqrt_1_plus_4z(order);
    // ((1+4z)^(1/2) + 1) / 2 has unit constant term; its inverse is the
    // factor 2/((1+4z)^(1/2)+1).
    let half_sum = root
        .add(&PowerSeries::one(order))
        .scale(&BigRational::new(BigInt::from(1), BigInt::from(2)));
    let reciprocal = half_sum.inverse()?;
    let first = series_pow(&reciprocal, 2 * g - 2 - m, 1)?;
    // (1+4z)^((g-1)/2) is the (g-1)-th power of the square root.
    let second = series_pow(&root, g - 1, 1)?;
    let series = first.mul(&second);
    let values: Vec<BigRational> = series.coeffs[..=max_d].to_vec();
    let non_integral = (0..=max_d).filter(|&d| !values[d].is_integer()).collect();
    Ok(SecantTable {
        genus: g,
        curve_degree: m,
        values,
        non_integral,
    })
}

/// The classical existence invariant `g - (r+1)(g-d+r)` for degree-`d`
/// rank-`r` series on a genus-`g` curve.
pub fn rho(d: i64, g: i64, r: i64) -> i64 {
    g - (r + 1) * (g - d + r)
}

/// Virtual dimension `d - r(s+1-d+r)` of the space of inclusions of a
/// degree-`(m-d)` series into a fixed degree-`m` rank-`s` series.
pub fn mu(d: i64, r: i64, s: i64) -> i64 {
    d - r * (s + 1 - d + r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(values: &[i64]) -> Vec<BigRational> {
        values.iter().map(|&v| rational(v)).collect()
    }

    #[test]
    fn square_root_series_low_coefficients() {
        assert_eq!(sqrt_1_plus_4z(0).coeffs(), &ints(&[1]));
        assert_eq!(sqrt_1_plus_4z(3).coeffs(), &ints(&[1, 2, -2, 4]));
        assert_eq!(
            sqrt_1_plus_4z(7).coeffs(),
            &ints(&[1, 2, -2, 4, -10, 28, -84, 264])
        );
    }

    #[test]
    fn square_root_squares_back() {
        for order in [0usize, 1, 5, 12] {
            let root = sqrt_1_plus_4z(order);
            let squared = root.mul(&root);
            assert_eq!(squared, PowerSeries::linear(1, 4, order));
        }
    }

    #[test]
    fn generic_sqrt_matches_binomial_route() {
        let f = PowerSeries::linear(1, 4, 12);
        assert_eq!(f.sqrt().unwrap(), sqrt_1_plus_4z(12));
    }

    #[test]
    fn binomial_power() {
        let f = PowerSeries::linear(1, 1, 4);
        let squared = series_pow(&f, 2, 1).unwrap();
        assert_eq!(squared.coeffs(), &ints(&[1, 2, 1, 0, 0]));
    }

    #[test]
    fn exponent_zero_gives_one() {
        let f = PowerSeries::linear(1, 4, 6);
        // (g-1)/2 with g = 1.
        assert_eq!(series_pow(&f, 0, 2).unwrap(), PowerSeries::one(6));
    }

    #[test]
    fn inverse_identity() {
        let f = PowerSeries::from_coeffs(ints(&[1, 3, -2, 7, 0, 5]));
        let inv = series_pow(&f, -1, 1).unwrap();
        assert_eq!(f.mul(&inv), PowerSeries::one(5));
    }

    #[test]
    fn pow_rejects_non_unit_constant() {
        let f = PowerSeries::linear(2, 1, 3);
        assert!(series_pow(&f, 2, 1).is_err());
        assert!(series_pow(&f, 1, 2).is_err());
        assert!(series_pow(&PowerSeries::linear(1, 1, 3), 1, 3).is_err());
    }

    #[test]
    fn reciprocal_factor_matches_closed_form() {
        // 2/((1+4z)^(1/2)+1) agrees with ((1+4z)^(1/2)-1)/(2z): the z^j
        // coefficient of the latter is a_{j+1}/2.
        let order = 12;
        let root = sqrt_1_plus_4z(order + 1);
        let half_sum = root
            .truncated(order)
            .add(&PowerSeries::one(order))
            .scale(&BigRational::new(BigInt::from(1), BigInt::from(2)));
        let reciprocal = half_sum.inverse().unwrap();
        let two = rational(2);
        for j in 0..=order {
            assert_eq!(reciprocal.coeff(j), &(root.coeff(j + 1) / &two), "z^{j}");
        }
    }

    #[test]
    fn counting_series_frozen_low_order_values() {
        // Independent hand expansion: with g=0, m=3 the factors are
        // ((A+1)/2)^5 = 1 + 5z + 5z^2 + ... and A^-1 = 1 - 2z + 6z^2 - ...
        // so N = [1, 3, 1]; with m=2 the exponent drops to 4 and
        // N = [1, 2, 0].
        let t = n_d_table(0, 3, 2).unwrap();
        assert_eq!(t.values, ints(&[1, 3, 1]));
        assert!(t.non_integral.is_empty());
        let t = n_d_table(0, 2, 2).unwrap();
        assert_eq!(t.values, ints(&[1, 2, 0]));
    }

    #[test]
    fn first_coefficient_is_the_curve_degree() {
        for g in 0..=6 {
            for m in 1..=12 {
                let t = n_d_table(g, m, 1).unwrap();
                assert_eq!(t.values[0], rational(1), "N_0 at g={g} m={m}");
                assert_eq!(t.values[1], rational(m), "N_1 at g={g} m={m}");
            }
        }
    }

    #[test]
    fn table_is_integral_over_the_grid() {
        for g in 0..=6 {
            for m in 1..=12 {
                let t = n_d_table(g, m, 8).unwrap();
                assert!(
                    t.non_integral.is_empty(),
                    "non-integral N_d at g={g} m={m}: {:?}",
                    t.non_integral
                );
            }
        }
    }

    #[test]
    fn guard_terms_do_not_change_the_prefix() {
        let short = n_d_table(3, 5, 4).unwrap();
        let long = n_d_table(3, 5, 8).unwrap();
        assert_eq!(short.values[..], long.values[..5]);
    }

    #[test]
    fn rho_values() {
        assert_eq!(rho(3, 4, 1), 0);
        for (d, g) in [(0, 0), (2, 5), (7, 3)] {
            assert_eq!(rho(d, g, 0), d);
        }
        assert_eq!(rho(6, 6, 0), 6);
    }

    #[test]
    fn mu_values() {
        assert_eq!(mu(2, 1, 1), 1);
        for (d, s) in [(1, 4), (5, 2), (9, 9)] {
            assert_eq!(mu(d, 0, s), d);
        }
        for d in 0..6 {
            for r in 0..=d {
                assert_eq!(mu(d, r, d - r), d - r, "d={d} r={r}");
            }
        }
    }

    /// Brute-force convolution, independent of `PowerSeries::mul`.
    fn convolve(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let order = a.len().min(b.len()) - 1;
        let mut out = vec![BigRational::zero(); order + 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                if i + j <= order {
                    out[i + j] += x * y;
                }
            }
        }
        out
    }

    #[test]
    fn multiplication_matches_convolution_oracle() {
        use proptest::prelude::*;
        let coeff = || -20i64..20;
        proptest!(|(a in proptest::collection::vec(coeff(), 1..13),
                    b in proptest::collection::vec(coeff(), 1..13))| {
            let sa = PowerSeries::from_coeffs(ints(&a));
            let sb = PowerSeries::from_coeffs(ints(&b));
            let product = sa.mul(&sb);
            prop_assert_eq!(product.coeffs(), &convolve(sa.coeffs(), sb.coeffs()));
        });
    }
}
