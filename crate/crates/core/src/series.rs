//! Truncated Laurent series with exact integer coefficients.
//!
//! A series knows its coefficients on the window `valuation <= e < order`.
//! Everything below the valuation is zero by construction; everything at or
//! above the order is unknown and is never treated as zero. Every operation
//! propagates the order conservatively, so a coefficient that is reported is
//! always exact.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::Signed;

use crate::error::{Error, Result};

/// Integer coefficient ring for [`LaurentSeries`].
///
/// Implemented for the primitive signed integers and for [`BigInt`]. The
/// fixed-width instances are handy for quick experiments at low order; they
/// overflow on the products this crate cares about well before order 3000.
pub trait CoeffRing:
    Clone
    + fmt::Debug
    + fmt::Display
    + Signed
    + Send
    + Sync
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
{
    /// `self += a * b`
    fn add_product(&mut self, a: &Self, b: &Self);
}

macro_rules! prim_coeff_ring {
    ($($t:ty),*) => {$(
        impl CoeffRing for $t {
            #[inline]
            fn add_product(&mut self, a: &Self, b: &Self) {
                *self += a * b;
            }
        }
    )*};
}

prim_coeff_ring!(i32, i64, i128);

impl CoeffRing for BigInt {
    #[inline]
    fn add_product(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
}

/// A sign `+1` or `-1`, used for monomial prefactors and for the argument of
/// a q-Pochhammer factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_i64(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    /// `(-1)^n`
    pub fn parity(n: i64) -> Sign {
        if n.rem_euclid(2) == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn apply<T: CoeffRing>(self, value: T) -> T {
        match self {
            Sign::Plus => value,
            Sign::Minus => -value,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        self * Sign::Minus
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Lowest exponent at which two series disagree, with both coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Disagreement<T> {
    pub exponent: i64,
    pub left: T,
    pub right: T,
}

/// Truncated Laurent series `sum_{valuation <= e < order} c_e q^e`.
///
/// `==` is structural: same window and same coefficients. Use
/// [`LaurentSeries::agrees_with`] to compare on the common window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentSeries<T> {
    valuation: i64,
    coeffs: Vec<T>,
    order: i64,
}

impl<T: CoeffRing> LaurentSeries<T> {
    /// Builds a series from a dense block starting at `valuation`; the order
    /// is `valuation + coeffs.len()`.
    pub fn from_coeffs(valuation: i64, coeffs: Vec<T>) -> Self {
        let order = valuation + coeffs.len() as i64;
        LaurentSeries {
            valuation,
            coeffs,
            order,
        }
    }

    /// All-zero series known on `[valuation, order)`.
    pub fn zero(valuation: i64, order: i64) -> Self {
        let order = order.max(valuation);
        LaurentSeries {
            valuation,
            coeffs: vec![T::zero(); (order - valuation) as usize],
            order,
        }
    }

    /// The constant series 1 known below `order`. For `order <= 0` the window
    /// is empty.
    pub fn one(order: i64) -> Self {
        Self::monomial(Sign::Plus, 0, order)
    }

    /// `sign * q^exponent`, known below `order`.
    pub fn monomial(sign: Sign, exponent: i64, order: i64) -> Self {
        let mut s = Self::zero(exponent.min(order), order);
        if exponent < order {
            s.coeffs[0] = sign.apply(T::one());
        }
        s
    }

    /// Builds a series from sparse `(exponent, coefficient)` terms. Terms at or
    /// above `order` are dropped; the valuation is the smallest term exponent
    /// (or 0 when there are none below 0).
    pub fn from_terms(terms: &[(i64, T)], order: i64) -> Self {
        let valuation = terms
            .iter()
            .map(|(e, _)| *e)
            .min()
            .unwrap_or(0)
            .min(0)
            .min(order);
        let mut s = Self::zero(valuation, order);
        for (e, c) in terms {
            if *e < order {
                s.coeffs[(*e - valuation) as usize] += c;
            }
        }
        s
    }

    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    /// Dense coefficient block; index `i` holds the coefficient of
    /// `q^(valuation + i)`.
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// True when no coefficient is known.
    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exact coefficient of `q^e`. Exponents below the valuation are zero by
    /// construction; exponents at or above the order are unknown.
    pub fn coeff_at(&self, e: i64) -> Result<T> {
        if e >= self.order {
            return Err(Error::OutOfRange {
                exponent: e,
                order: self.order,
            });
        }
        if e < self.valuation {
            return Ok(T::zero());
        }
        Ok(self.coeffs[(e - self.valuation) as usize].clone())
    }

    /// Borrowing accessor for the known window only.
    pub fn get(&self, e: i64) -> Option<&T> {
        if e < self.valuation || e >= self.order {
            None
        } else {
            Some(&self.coeffs[(e - self.valuation) as usize])
        }
    }

    /// Iterates `(exponent, coefficient)` over the known window.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &T)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (self.valuation + i as i64, c))
    }

    /// Lowers the order to `order` (never raises it).
    pub fn truncate(&self, order: i64) -> Self {
        let order = order.min(self.order);
        if order <= self.valuation {
            return Self::zero(order, order);
        }
        LaurentSeries {
            valuation: self.valuation,
            coeffs: self.coeffs[..(order - self.valuation) as usize].to_vec(),
            order,
        }
    }

    /// Multiplies by `sign * q^exponent`: shifts every exponent and flips
    /// signs when `sign` is minus. Exact and invertible.
    pub fn monomial_mul(&self, sign: Sign, exponent: i64) -> Self {
        let coeffs = match sign {
            Sign::Plus => self.coeffs.clone(),
            Sign::Minus => self.coeffs.iter().map(|c| -c.clone()).collect(),
        };
        LaurentSeries {
            valuation: self.valuation + exponent,
            coeffs,
            order: self.order + exponent,
        }
    }

    /// Multiplicative inverse. The coefficient at the valuation must be `+1`
    /// or `-1`.
    pub fn invert(&self) -> Result<Self> {
        let lead = match self.coeffs.first() {
            Some(c) if c.is_one() => Sign::Plus,
            Some(c) if (-c.clone()).is_one() => Sign::Minus,
            _ => {
                return Err(Error::NotAUnit {
                    exponent: self.valuation,
                })
            }
        };
        // a = lead * q^v * (1 + u), 1/a = lead * q^-v * 1/(1 + u)
        let n = self.coeffs.len();
        let unit: Vec<T> = self.coeffs.iter().map(|c| lead.apply(c.clone())).collect();
        let mut inv = vec![T::zero(); n];
        inv[0] = T::one();
        for i in 1..n {
            let mut acc = T::zero();
            for j in 1..=i {
                acc.add_product(&unit[j], &inv[i - j]);
            }
            inv[i] = -acc;
        }
        let coeffs = match lead {
            Sign::Plus => inv,
            Sign::Minus => inv.into_iter().map(|c| -c).collect(),
        };
        Ok(LaurentSeries {
            valuation: -self.valuation,
            coeffs,
            order: self.order - 2 * self.valuation,
        })
    }

    /// Multiplies in place by `1 - sign * q^step`, `step >= 1`. The order is
    /// unchanged because the factor is a unit power series.
    pub fn mul_one_minus(&mut self, sign: Sign, step: i64) {
        assert!(step >= 1, "step must be positive");
        let step = step as usize;
        for i in (step..self.coeffs.len()).rev() {
            let (lo, hi) = self.coeffs.split_at_mut(i);
            match sign {
                Sign::Plus => hi[0] -= &lo[i - step],
                Sign::Minus => hi[0] += &lo[i - step],
            }
        }
    }

    /// Divides in place by `1 - sign * q^step`, `step >= 1`, i.e. multiplies by
    /// the geometric series `sum_p (sign q^step)^p` via stride accumulation.
    pub fn div_one_minus(&mut self, sign: Sign, step: i64) {
        assert!(step >= 1, "step must be positive");
        let step = step as usize;
        for i in step..self.coeffs.len() {
            let (lo, hi) = self.coeffs.split_at_mut(i);
            match sign {
                Sign::Plus => hi[0] += &lo[i - step],
                Sign::Minus => hi[0] -= &lo[i - step],
            }
        }
    }

    /// Adds `sign * q^start / (1 - q^stride)` (stride >= 1) to the known
    /// window.
    pub fn add_geometric(&mut self, sign: Sign, start: i64, stride: i64) {
        assert!(stride >= 1, "stride must be positive");
        let one = sign.apply(T::one());
        let mut e = start.max(self.valuation);
        if e > start {
            // first term of the progression at or above the valuation
            e = start + (e - start + stride - 1) / stride * stride;
        }
        while e < self.order {
            self.coeffs[(e - self.valuation) as usize] += &one;
            e += stride;
        }
    }

    /// Adds `sign * q^e` when `e` is inside the known window.
    pub fn add_monomial(&mut self, sign: Sign, e: i64) {
        if let Some(c) = self.get_mut(e) {
            match sign {
                Sign::Plus => *c += &T::one(),
                Sign::Minus => *c -= &T::one(),
            }
        }
    }

    fn get_mut(&mut self, e: i64) -> Option<&mut T> {
        if e < self.valuation || e >= self.order {
            None
        } else {
            Some(&mut self.coeffs[(e - self.valuation) as usize])
        }
    }

    /// Lowest exponent in the jointly known window where the two series
    /// differ, or `None` when they agree there.
    pub fn first_disagreement(&self, other: &Self) -> Option<Disagreement<T>> {
        let lo = self.valuation.min(other.valuation);
        let hi = self.order.min(other.order);
        (lo..hi).find_map(|e| {
            let a = self.coeff_at(e).expect("inside window");
            let b = other.coeff_at(e).expect("inside window");
            (a != b).then_some(Disagreement {
                exponent: e,
                left: a,
                right: b,
            })
        })
    }

    /// Agreement on the jointly known window.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.first_disagreement(other).is_none()
    }

    /// True when every known coefficient is zero.
    pub fn is_zero_on_window(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

impl<T: CoeffRing> Add for &LaurentSeries<T> {
    type Output = LaurentSeries<T>;

    fn add(self, rhs: &LaurentSeries<T>) -> LaurentSeries<T> {
        let order = self.order.min(rhs.order);
        let valuation = self.valuation.min(rhs.valuation).min(order);
        let mut out = LaurentSeries::zero(valuation, order);
        for s in [self, rhs] {
            for (e, c) in s.iter().take_while(|(e, _)| *e < order) {
                out.coeffs[(e - valuation) as usize] += c;
            }
        }
        out
    }
}

impl<T: CoeffRing> Neg for &LaurentSeries<T> {
    type Output = LaurentSeries<T>;

    fn neg(self) -> LaurentSeries<T> {
        self.monomial_mul(Sign::Minus, 0)
    }
}

impl<T: CoeffRing> Sub for &LaurentSeries<T> {
    type Output = LaurentSeries<T>;

    fn sub(self, rhs: &LaurentSeries<T>) -> LaurentSeries<T> {
        self + &(-rhs)
    }
}

impl<T: CoeffRing> Mul for &LaurentSeries<T> {
    type Output = LaurentSeries<T>;

    /// Schoolbook Cauchy product.
    fn mul(self, rhs: &LaurentSeries<T>) -> LaurentSeries<T> {
        let valuation = self.valuation + rhs.valuation;
        let order = (self.order + rhs.valuation).min(rhs.order + self.valuation);
        let len = (order - valuation) as usize;
        let mut coeffs = vec![T::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(len - i) {
                coeffs[i + j].add_product(a, b);
            }
        }
        LaurentSeries {
            valuation,
            coeffs,
            order,
        }
    }
}

impl<T: CoeffRing> fmt::Display for LaurentSeries<T> {
    /// Renders the nonzero terms followed by `+ O(q^order)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.iter().filter(|(_, c)| !c.is_zero()) {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let unit = abs.is_one();
            match (e, unit) {
                (0, _) => write!(f, "{abs}")?,
                (1, true) => f.write_str("q")?,
                (1, false) => write!(f, "{abs}q")?,
                (_, true) => write!(f, "q^{e}")?,
                (_, false) => write!(f, "{abs}q^{e}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(q^{})", self.order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type S = LaurentSeries<i64>;

    fn poly(valuation: i64, c: &[i64]) -> S {
        S::from_coeffs(valuation, c.to_vec())
    }

    #[test]
    fn add_cancels() {
        let a = poly(0, &[1, 1, 0, 0]);
        let b = poly(0, &[1, -1, 0, 0]);
        let s = &a + &b;
        assert_eq!(s.coeffs(), &[2, 0, 0, 0]);
    }

    #[test]
    fn add_disjoint_supports() {
        let a = S::from_terms(&[(-2, 1)], 5);
        let b = S::from_terms(&[(2, 1)], 5);
        let s = &a + &b;
        assert_eq!(s.valuation(), -2);
        assert_eq!(s.coeff_at(-2).unwrap(), 1);
        assert_eq!(s.coeff_at(2).unwrap(), 1);
        assert_eq!(s.coeff_at(0).unwrap(), 0);
    }

    #[test]
    fn mul_examples() {
        let a = poly(0, &[1, 1, 0, 0, 0]);
        let b = poly(0, &[1, -1, 0, 0, 0]);
        assert_eq!((&a * &b).coeffs(), &[1, 0, -1, 0, 0]);

        let m = &S::monomial(Sign::Plus, -3, 10) * &S::monomial(Sign::Plus, 5, 10);
        assert_eq!(m.valuation(), 2);
        assert_eq!(m.coeff_at(2).unwrap(), 1);
        assert_eq!(m.order(), 7);

        let geo = S::from_coeffs(0, vec![1; 8]);
        let t = &poly(0, &[1, -1, 0, 0, 0, 0, 0, 0]) * &geo;
        assert_eq!(t.coeffs(), &[1, 0, 0, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn invert_examples() {
        let inv = poly(0, &[1, -1, 0, 0, 0, 0]).invert().unwrap();
        assert_eq!(inv.coeffs(), &[1; 6]);

        assert_eq!(S::one(4).invert().unwrap().coeffs(), &[1, 0, 0, 0]);

        // -q^-2 (1 - q^5), known on [-2, 18)
        let mut c = vec![0; 20];
        c[0] = -1;
        c[5] = 1;
        let a = poly(-2, &c);
        let inv = a.invert().unwrap();
        assert_eq!(inv.valuation(), 2);
        for (e, v) in inv.iter() {
            let want = if (e - 2) % 5 == 0 { -1 } else { 0 };
            assert_eq!(*v, want, "q^{e}");
        }
        let prod = &a * &inv;
        assert!(prod.agrees_with(&S::one(prod.order())));
    }

    #[test]
    fn invert_rejects_non_units() {
        assert_eq!(
            poly(3, &[2, 1]).invert().unwrap_err(),
            Error::NotAUnit { exponent: 3 }
        );
        assert!(S::zero(0, 0).invert().is_err());
    }

    #[test]
    fn monomial_mul_examples() {
        let s = poly(0, &[1, 1, 0]).monomial_mul(Sign::Minus, 2);
        assert_eq!(s.valuation(), 2);
        assert_eq!(s.coeff_at(2).unwrap(), -1);
        assert_eq!(s.coeff_at(3).unwrap(), -1);
        assert_eq!(s.order(), 5);
    }

    #[test]
    fn coeff_at_window() {
        let s = poly(0, &[1, 0, -1]);
        assert_eq!(s.coeff_at(2).unwrap(), -1);
        assert_eq!(s.coeff_at(1).unwrap(), 0);
        assert_eq!(s.coeff_at(-7).unwrap(), 0);
        assert_eq!(
            s.coeff_at(3).unwrap_err(),
            Error::OutOfRange {
                exponent: 3,
                order: 3
            }
        );
    }

    #[test]
    fn in_place_binomials_match_mul() {
        let base = poly(-1, &[3, -2, 5, 0, 1, 7, -4, 2, 0, 9]);
        let mut fast = base.clone();
        fast.mul_one_minus(Sign::Minus, 3);
        let mut factor = vec![0; 10];
        factor[0] = 1;
        factor[3] = 1;
        let slow = &base * &poly(0, &factor);
        assert!(fast.agrees_with(&slow));

        let mut back = fast.clone();
        back.div_one_minus(Sign::Minus, 3);
        assert!(back.agrees_with(&base));
    }

    #[test]
    fn add_geometric_respects_window() {
        let mut s = S::zero(-3, 10);
        s.add_geometric(Sign::Minus, -5, 4);
        // -5, -1, 3, 7 -> only -1, 3, 7 are in the window
        let got: Vec<i64> = s.iter().filter(|(_, c)| **c != 0).map(|(e, _)| e).collect();
        assert_eq!(got, vec![-1, 3, 7]);
        assert_eq!(s.coeff_at(3).unwrap(), -1);
    }

    #[test]
    fn display() {
        let s = poly(0, &[1, -1, -1, 0, 0, 1]);
        assert_eq!(s.to_string(), "1 - q - q^2 + q^5 + O(q^6)");
        assert_eq!(S::zero(0, 3).to_string(), "0 + O(q^3)");
    }
}
