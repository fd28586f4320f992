//! Restricted partitions: counts by dynamic programming, the even/odd
//! part-count split, explicit enumeration, and the two partition identities
//! that follow from the vanishing theorems.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::series::Sign;
use crate::vanishing::{ExtendedParams, ResidueClass, Variant};

/// Default cap on the number of partitions an enumeration may produce.
pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;

/// Parts are positive integers whose residue mod `modulus` lies in one of
/// two disjoint sets: parts from `repeatable` may repeat, parts from
/// `distinct` appear at most once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictedPartitionSpec {
    modulus: i64,
    repeatable: BTreeSet<i64>,
    distinct: BTreeSet<i64>,
    max_part: Option<i64>,
}

impl RestrictedPartitionSpec {
    pub fn new(
        modulus: i64,
        repeatable: impl IntoIterator<Item = i64>,
        distinct: impl IntoIterator<Item = i64>,
    ) -> Result<Self> {
        if modulus < 1 {
            return Err(invalid(format!("modulus {modulus} must be >= 1")));
        }
        let reduce = |it: &mut dyn Iterator<Item = i64>| -> BTreeSet<i64> {
            it.map(|r| r.rem_euclid(modulus)).collect()
        };
        let repeatable = reduce(&mut repeatable.into_iter());
        let distinct = reduce(&mut distinct.into_iter());
        if let Some(r) = repeatable.intersection(&distinct).next() {
            return Err(invalid(format!(
                "residue {r} is both repeatable and distinct"
            )));
        }
        if distinct.contains(&0) {
            return Err(invalid("residue 0 may only be repeatable"));
        }
        Ok(RestrictedPartitionSpec {
            modulus,
            repeatable,
            distinct,
            max_part: None,
        })
    }

    /// Only parts `<= max_part` are used.
    pub fn with_max_part(mut self, max_part: i64) -> Self {
        self.max_part = Some(max_part);
        self
    }

    /// Parts `≡ 0, ±r (mod mk)`, all repeatable: the partitions counted by
    /// `p_{m,k,r}`.
    pub fn zero_plus_minus(m: i64, k: i64, r: i64) -> Result<Self> {
        let mk = m * k;
        Self::new(mk, [0, r, mk - r], [])
    }

    /// Repeatable parts `≡ ±r` and distinct parts `≡ ±(r - tk) (mod mk)`.
    pub fn parity_split(params: &ExtendedParams) -> Result<Self> {
        let mk = params.m() * params.k();
        let r = params.r();
        let d = params.numerator_offset().abs();
        Self::new(mk, [r, mk - r], [d, mk - d])
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    pub fn repeatable(&self) -> &BTreeSet<i64> {
        &self.repeatable
    }

    pub fn distinct(&self) -> &BTreeSet<i64> {
        &self.distinct
    }

    pub fn max_part(&self) -> Option<i64> {
        self.max_part
    }

    /// Allowed part sizes `<= n`, ascending, each flagged `true` when it must
    /// be distinct.
    pub fn allowed_parts(&self, n: i64) -> Vec<(i64, bool)> {
        let top = self.max_part.map_or(n, |b| b.min(n));
        (1..=top)
            .filter_map(|p| {
                let res = p % self.modulus;
                if self.repeatable.contains(&res) {
                    Some((p, false))
                } else if self.distinct.contains(&res) {
                    Some((p, true))
                } else {
                    None
                }
            })
            .collect()
    }
}

/// Counts of partitions with an even and an odd number of parts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParityCountPair {
    #[serde(serialize_with = "as_decimal")]
    pub even_count: BigInt,
    #[serde(serialize_with = "as_decimal")]
    pub odd_count: BigInt,
}

fn as_decimal<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl ParityCountPair {
    /// `even - odd`
    pub fn difference(&self) -> BigInt {
        &self.even_count - &self.odd_count
    }
}

/// `count[i]` = number of restricted partitions of `i`, for `0 <= i <= n_max`.
pub fn restricted_counts(spec: &RestrictedPartitionSpec, n_max: i64) -> Vec<BigInt> {
    if n_max < 0 {
        return Vec::new();
    }
    let n = n_max as usize;
    let mut count = vec![BigInt::zero(); n + 1];
    count[0] = BigInt::one();
    for (p, distinct) in spec.allowed_parts(n_max) {
        let p = p as usize;
        if distinct {
            for i in (p..=n).rev() {
                let (lo, hi) = count.split_at_mut(i);
                hi[0] += &lo[i - p];
            }
        } else {
            for i in p..=n {
                let (lo, hi) = count.split_at_mut(i);
                hi[0] += &lo[i - p];
            }
        }
    }
    count
}

/// Number of restricted partitions of `n` (zero for negative `n`).
pub fn count_restricted(spec: &RestrictedPartitionSpec, n: i64) -> BigInt {
    restricted_counts(spec, n)
        .pop()
        .unwrap_or_else(BigInt::zero)
}

/// Even/odd part-count split for every `0 <= i <= n_max`.
pub fn parity_counts(spec: &RestrictedPartitionSpec, n_max: i64) -> Vec<ParityCountPair> {
    if n_max < 0 {
        return Vec::new();
    }
    let n = n_max as usize;
    let mut even = vec![BigInt::zero(); n + 1];
    let mut odd = vec![BigInt::zero(); n + 1];
    even[0] = BigInt::one();
    for (p, distinct) in spec.allowed_parts(n_max) {
        let p = p as usize;
        if distinct {
            // 0/1 transition, descending so that both reads see old values
            for i in (p..=n).rev() {
                let (e, o) = (even[i - p].clone(), odd[i - p].clone());
                even[i] += o;
                odd[i] += e;
            }
        } else {
            // unbounded: one more copy of p flips the parity
            for i in p..=n {
                let (e, o) = (even[i - p].clone(), odd[i - p].clone());
                even[i] += o;
                odd[i] += e;
            }
        }
    }
    even.into_iter()
        .zip(odd)
        .map(|(even_count, odd_count)| ParityCountPair {
            even_count,
            odd_count,
        })
        .collect()
}

/// `(p^e(n), p^o(n))` for repeatable parts `≡ ±r` and distinct parts
/// `≡ ±(r - tk) (mod mk)`, `r = sm + t`, `k` odd.
pub fn count_parity_split(m: i64, k: i64, s: i64, t: i64, n: i64) -> Result<ParityCountPair> {
    let params = ExtendedParams::new(m, k, s, t, Variant::Minus)?;
    if n < 0 {
        return Err(invalid(format!("need n >= 0 (got {n})")));
    }
    let spec = RestrictedPartitionSpec::parity_split(&params)?;
    Ok(parity_counts(&spec, n).pop().expect("n >= 0"))
}

/// One row of the signed theta sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedTerm {
    pub j: i64,
    /// `nk - rs - mk j(j+1)/2 - j(tk - r)`
    pub argument: i64,
    /// `(-1)^j p_{m,k,r}(argument)`
    pub signed_count: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedSum {
    pub terms: Vec<SignedTerm>,
    pub total: BigInt,
}

/// `j` with `2N - M j^2 - (M + 2c) j >= 0`, i.e. the nonnegative arguments of
/// the signed sum, found from the roots of the quadratic.
fn theta_window(big_n: i64, modulus: i64, c: i64) -> Vec<i64> {
    let arg = |j: i64| big_n - modulus * j * (j + 1) / 2 - c * j;
    let (m, b) = (modulus as i128, (modulus + 2 * c) as i128);
    let disc = b * b + 8 * m * big_n as i128;
    if disc < 0 {
        return Vec::new();
    }
    let root = num_integer::Roots::sqrt(&disc);
    let lo = ((-b - root) / (2 * m)) as i64 - 2;
    let hi = ((-b + root) / (2 * m)) as i64 + 2;
    (lo..=hi).filter(|&j| arg(j) >= 0).collect()
}

/// `sum_j (-1)^j p_{m,k,r}(nk - rs - mk j(j+1)/2 - j(tk - r))` over all `j`
/// with a nonnegative argument, with `r = sm + t`. Zero whenever the
/// parameters are valid.
pub fn signed_sum(m: i64, k: i64, s: i64, t: i64, n: i64) -> Result<SignedSum> {
    let params = ExtendedParams::new(m, k, s, t, Variant::Plus)?;
    let r = params.r();
    let mk = m * k;
    let big_n = n * k - r * s;
    let js = theta_window(big_n, mk, t * k - r);
    let arg = |j: i64| big_n - mk * j * (j + 1) / 2 - j * (t * k - r);
    let top = js.iter().map(|&j| arg(j)).max().unwrap_or(-1);
    let counts = restricted_counts(&RestrictedPartitionSpec::zero_plus_minus(m, k, r)?, top);
    let terms: Vec<SignedTerm> = js
        .into_iter()
        .map(|j| {
            let argument = arg(j);
            SignedTerm {
                j,
                argument,
                signed_count: Sign::parity(j).apply(counts[argument as usize].clone()),
            }
        })
        .collect();
    let total = terms.iter().map(|t| &t.signed_count).sum();
    Ok(SignedSum { terms, total })
}

/// A partition as an ascending list of parts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition {
    parts: Vec<i64>,
}

impl Partition {
    pub fn new(mut parts: Vec<i64>) -> Result<Self> {
        if parts.iter().any(|&p| p < 1) {
            return Err(invalid("parts must be positive"));
        }
        parts.sort_unstable();
        Ok(Partition { parts })
    }

    pub fn parts(&self) -> &[i64] {
        &self.parts
    }

    pub fn total(&self) -> i64 {
        self.parts.iter().sum()
    }

    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }

    pub fn has_even_part_count(&self) -> bool {
        self.parts.len().is_multiple_of(2)
    }

    /// `(part, multiplicity)` pairs, ascending by part.
    pub fn multiplicities(&self) -> Vec<(i64, usize)> {
        let mut out: Vec<(i64, usize)> = Vec::new();
        for &p in &self.parts {
            match out.last_mut() {
                Some((q, c)) if *q == p => *c += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }
}

impl fmt::Display for Partition {
    /// Multiplicity notation, e.g. `2+13+17^6+32`. The empty partition
    /// renders as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("0");
        }
        let rendered: Vec<String> = self
            .multiplicities()
            .into_iter()
            .map(|(p, c)| {
                if c == 1 {
                    p.to_string()
                } else {
                    format!("{p}^{c}")
                }
            })
            .collect();
        f.write_str(&rendered.join("+"))
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Accepts `2+13^10+17` as well as the braced `13^{10}`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" || s.is_empty() {
            return Ok(Partition { parts: Vec::new() });
        }
        let bad = || Error::Parse(format!("malformed partition '{s}'"));
        let mut parts = Vec::new();
        for tok in s.split('+') {
            let tok = tok.trim();
            let (base, mult) = match tok.split_once('^') {
                Some((b, e)) => {
                    let e = e.trim_start_matches('{').trim_end_matches('}');
                    (b, e.parse::<usize>().map_err(|_| bad())?)
                }
                None => (tok, 1),
            };
            let base: i64 = base.parse().map_err(|_| bad())?;
            if base < 1 || mult < 1 {
                return Err(bad());
            }
            parts.extend(std::iter::repeat_n(base, mult));
        }
        Partition::new(parts)
    }
}

/// All restricted partitions of `n`, in lexicographic order of their
/// ascending part lists. Fails with [`Error::TooLarge`] past `cap`.
pub fn enumerate_restricted(
    spec: &RestrictedPartitionSpec,
    n: i64,
    cap: usize,
) -> Result<Vec<Partition>> {
    if n < 0 {
        return Err(invalid(format!("need n >= 0 (got {n})")));
    }
    fn walk(
        parts: &[(i64, bool)],
        from: usize,
        remaining: i64,
        current: &mut Vec<i64>,
        out: &mut Vec<Partition>,
        cap: usize,
    ) -> Result<()> {
        if remaining == 0 {
            if out.len() == cap {
                return Err(Error::TooLarge { cap });
            }
            out.push(Partition {
                parts: current.clone(),
            });
            return Ok(());
        }
        for (j, &(p, distinct)) in parts.iter().enumerate().skip(from) {
            if p > remaining {
                break;
            }
            current.push(p);
            walk(
                parts,
                if distinct { j + 1 } else { j },
                remaining - p,
                current,
                out,
                cap,
            )?;
            current.pop();
        }
        Ok(())
    }
    let parts = spec.allowed_parts(n);
    let mut out = Vec::new();
    walk(&parts, 0, n, &mut Vec::new(), &mut out, cap)?;
    Ok(out)
}

/// Outcome of checking `p^e = p^o` along the predicted class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityIdentityReport {
    pub class: ResidueClass,
    pub n_max: i64,
    pub checked: usize,
    pub violations: Vec<(i64, ParityCountPair)>,
}

impl ParityIdentityReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Class where `p^e = p^o`: `nk - rs` when `r - tk > 0`, `nk - r(s+1)` when
/// `r - tk < 0`.
pub fn parity_identity_class(params: &ExtendedParams) -> ResidueClass {
    let (k, r, s) = (params.k(), params.r(), params.s());
    if params.numerator_offset() > 0 {
        ResidueClass::new(k, -r * s)
    } else {
        ResidueClass::new(k, -r * (s + 1))
    }
}

/// Checks `p^e(n) = p^o(n)` for every `0 <= n <= n_max` in the class.
pub fn verify_parity_identity(
    m: i64,
    k: i64,
    s: i64,
    t: i64,
    n_max: i64,
) -> Result<ParityIdentityReport> {
    let params = ExtendedParams::new(m, k, s, t, Variant::Minus)?;
    let spec = RestrictedPartitionSpec::parity_split(&params)?;
    let class = parity_identity_class(&params);
    let table = parity_counts(&spec, n_max);
    let mut checked = 0;
    let mut violations = Vec::new();
    for n in class.members(0, n_max + 1) {
        checked += 1;
        let pair = &table[n as usize];
        if pair.even_count != pair.odd_count {
            violations.push((n, pair.clone()));
        }
    }
    Ok(ParityIdentityReport {
        class,
        n_max,
        checked,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2151() -> RestrictedPartitionSpec {
        RestrictedPartitionSpec::zero_plus_minus(2, 15, 1).unwrap()
    }

    #[test]
    fn signed_counts_m2_k15() {
        assert_eq!(count_restricted(&p2151(), 70), BigInt::from(13));
        assert_eq!(count_restricted(&p2151(), 300), BigInt::from(4673));
        assert_eq!(count_restricted(&p2151(), 0), BigInt::one());
    }

    #[test]
    fn signed_sum_m2_k15_n20() {
        let s = signed_sum(2, 15, 0, 1, 20).unwrap();
        let rows: Vec<(i64, i64, i64)> = s
            .terms
            .iter()
            .map(|t| (t.j, t.argument, i64::try_from(&t.signed_count).unwrap()))
            .collect();
        assert_eq!(
            rows,
            vec![
                (-5, 70, -13),
                (-4, 176, 203),
                (-3, 252, -1654),
                (-2, 298, 3838),
                (-1, 314, -5773),
                (0, 300, 4673),
                (1, 256, -1654),
                (2, 182, 393),
                (3, 78, -13),
            ]
        );
        assert!(s.total.is_zero());
    }

    #[test]
    fn signed_sum_empty_and_small() {
        let s = signed_sum(2, 15, 0, 1, -3).unwrap();
        assert!(s.terms.is_empty());
        assert!(s.total.is_zero());
        assert!(signed_sum(3, 3, 1, 1, 4).unwrap().total.is_zero());
        assert!(signed_sum(2, 3, 1, 1, 4).is_err());
    }

    #[test]
    fn parity_split_149() {
        let pair = count_parity_split(2, 15, 8, 1, 149).unwrap();
        assert_eq!(pair.even_count, BigInt::from(6));
        assert_eq!(pair.odd_count, BigInt::from(6));
        let zero = count_parity_split(2, 15, 8, 1, 0).unwrap();
        assert_eq!(
            (zero.even_count, zero.odd_count),
            (BigInt::one(), BigInt::zero())
        );
        assert!(count_parity_split(2, 4, 0, 1, 10).is_err());
    }

    #[test]
    fn enumerate_149() {
        let params = ExtendedParams::new(2, 15, 8, 1, Variant::Minus).unwrap();
        let spec = RestrictedPartitionSpec::parity_split(&params).unwrap();
        let all = enumerate_restricted(&spec, 149, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(all.len(), 12);
        let odd: BTreeSet<String> = all
            .iter()
            .filter(|p| !p.has_even_part_count())
            .map(|p| p.to_string())
            .collect();
        let want: BTreeSet<String> = [
            "2+13+17^6+32",
            "2+17^7+28",
            "2+17^4+32+47",
            "2+17^5+62",
            "13+17^8",
            "17^6+47",
        ]
        .into_iter()
        .map(String::from)
        .collect();
        assert_eq!(odd, want);
    }

    #[test]
    fn enumerate_edges() {
        let spec = RestrictedPartitionSpec::new(30, [17, 13], [2, 28]).unwrap();
        assert!(enumerate_restricted(&spec, 1, 10).unwrap().is_empty());
        let one = enumerate_restricted(&spec, 0, 10).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].to_string(), "0");
        let all = RestrictedPartitionSpec::new(1, [0], []).unwrap();
        assert_eq!(
            enumerate_restricted(&all, 30, 100).unwrap_err(),
            Error::TooLarge { cap: 100 }
        );
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let spec = RestrictedPartitionSpec::new(5, [1, 4], [2]).unwrap();
        let list = enumerate_restricted(&spec, 20, 10_000).unwrap();
        assert!(list.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(BigInt::from(list.len()), count_restricted(&spec, 20));
    }

    #[test]
    fn spec_validation() {
        assert!(RestrictedPartitionSpec::new(5, [1], [6]).is_err());
        assert!(RestrictedPartitionSpec::new(5, [], [0]).is_err());
        assert!(RestrictedPartitionSpec::new(0, [], []).is_err());
        let capped = RestrictedPartitionSpec::new(3, [0, 1, 2], [])
            .unwrap()
            .with_max_part(2);
        assert_eq!(count_restricted(&capped, 10), BigInt::from(6));
    }

    #[test]
    fn partition_render_parse() {
        let p: Partition = "2+13^{10}+17".parse().unwrap();
        assert_eq!(p.to_string(), "2+13^10+17");
        assert_eq!(p.total(), 149);
        assert_eq!(p.num_parts(), 12);
        assert_eq!(p.multiplicities(), vec![(2, 1), (13, 10), (17, 1)]);
        assert!("2+x".parse::<Partition>().is_err());
        assert!("3^0".parse::<Partition>().is_err());
    }

    #[test]
    fn parity_identity_reports() {
        let rep = verify_parity_identity(2, 15, 8, 1, 600).unwrap();
        assert_eq!(rep.class, ResidueClass::new(15, 14));
        assert!(rep.holds());
        assert_eq!(rep.checked, 40);
        assert!(verify_parity_identity(3, 3, 1, 1, 300).unwrap().holds());
        assert!(verify_parity_identity(2, 4, 1, 1, 30).is_err());
    }
}
