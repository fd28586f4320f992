//! Theorem families for vanishing coefficients, their predicted zero
//! classes, and verification against exact expansions.
//!
//! Four families are covered:
//!
//! * Andrews-Bressoud: `(q^r, q^(2k-r); q^(2k)) / (q^(k-r), q^(k+r); q^(2k))`,
//!   zero at `n ≡ r(k-r+1)/2 (mod k)`.
//! * Alladi-Gordon: `(q^r, q^(mk-r); q^(mk)) / (±q^s, ±q^(mk-s); q^(mk))`
//!   with `r ≡ (k-1)s (mod mk)`, zero at `n ≡ r r' (mod k)`.
//! * Extended plus and minus: `(q^(r-tk), q^(mk-(r-tk)); q^(mk)) /
//!   (±q^r, ±q^(mk-r); q^(mk))` with `r = sm + t`, zero at `kn - rs`.
//!
//! When `r - tk < 0` the extended numerator is rewritten with positive
//! offsets as `-q^(r-tk) (q^(mk-(tk-r)), q^(tk-r); q^(mk))`. Verification
//! always expands the product without that monomial, so the reported zero
//! class is shifted by `tk - r`.

use std::fmt;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::products::{expand_product, normalized_pair, PochhammerFactor, ProductSpec};
use crate::series::Sign;
use crate::Series;

/// Minimum number of checked exponents before a residue class may be
/// labelled all-zero.
pub const MIN_CLASS_SAMPLES: usize = 10;

/// Number of violations kept in a report.
pub const REPORTED_VIOLATIONS: usize = 3;

fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Plus,
    Minus,
}

impl Variant {
    fn denominator_sign(self) -> Sign {
        match self {
            Variant::Plus => Sign::Plus,
            Variant::Minus => Sign::Minus,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Plus => "plus",
            Variant::Minus => "minus",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AndrewsBressoudParams {
    k: i64,
    r: i64,
}

impl AndrewsBressoudParams {
    pub fn new(k: i64, r: i64) -> Result<Self> {
        if k < 2 {
            return Err(invalid(format!("need k >= 2 (got k={k})")));
        }
        if !(1..k).contains(&r) {
            return Err(invalid(format!("need 1 <= r < k (got r={r}, k={k})")));
        }
        if gcd(r, k) != 1 {
            return Err(invalid("gcd(r,k) != 1"));
        }
        if (r + k) % 2 == 0 {
            return Err(invalid("r and k must have opposite parity"));
        }
        Ok(AndrewsBressoudParams { k, r })
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn r(&self) -> i64 {
        self.r
    }
}

/// `1 < m < k`, `1 <= s < mk`, `gcd(s, mk) = 1`; the minus variant needs `k`
/// odd. `r*`, `r` and `r'` are always recomputed from `(m, k, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AlladiGordonParams {
    m: i64,
    k: i64,
    s: i64,
    variant: Variant,
}

impl AlladiGordonParams {
    pub fn new(m: i64, k: i64, s: i64, variant: Variant) -> Result<Self> {
        if !(1 < m && m < k) {
            return Err(invalid(format!("need 1 < m < k (got m={m}, k={k})")));
        }
        if !(1..m * k).contains(&s) {
            return Err(invalid(format!(
                "need 1 <= s < mk (got s={s}, mk={})",
                m * k
            )));
        }
        if gcd(s, m * k) != 1 {
            return Err(invalid("gcd(s,km) != 1"));
        }
        if variant == Variant::Minus && k % 2 == 0 {
            return Err(invalid("the minus variant needs k odd"));
        }
        let p = AlladiGordonParams { m, k, s, variant };
        // ceil(r*/mk) lies in [1, k-1] because r* = (k-1)s < (k-1)mk, so the
        // reduction below never hits 0. Kept as a guard for the ambiguous
        // "1 <= r' < k" representative.
        if p.ceil_ratio().rem_euclid(k) == 0 {
            return Err(invalid(
                "ceil(r*/mk) ≡ 0 (mod k): r' has no representative in [1,k)",
            ));
        }
        Ok(p)
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn s(&self) -> i64 {
        self.s
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// `r* = (k-1)s`
    pub fn r_star(&self) -> i64 {
        (self.k - 1) * self.s
    }

    /// `r ≡ r* (mod mk)` with `1 <= r < mk`.
    pub fn r(&self) -> i64 {
        self.r_star().rem_euclid(self.m * self.k)
    }

    fn ceil_ratio(&self) -> i64 {
        Integer::div_ceil(&self.r_star(), &(self.m * self.k))
    }

    /// `r' ≡ ceil(r*/mk) (mod k)` with `1 <= r' < k`.
    pub fn r_prime(&self) -> i64 {
        self.ceil_ratio().rem_euclid(self.k)
    }
}

/// `k, m > 1`, `0 <= s < k`, `1 <= t < m`, `r = sm + t` coprime to `k`; the
/// minus variant needs `k` odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExtendedParams {
    m: i64,
    k: i64,
    s: i64,
    t: i64,
    variant: Variant,
}

impl ExtendedParams {
    pub fn new(m: i64, k: i64, s: i64, t: i64, variant: Variant) -> Result<Self> {
        if m < 2 || k < 2 {
            return Err(invalid(format!("need m > 1 and k > 1 (got m={m}, k={k})")));
        }
        if !(0..k).contains(&s) {
            return Err(invalid(format!("need 0 <= s < k (got s={s}, k={k})")));
        }
        if !(1..m).contains(&t) {
            return Err(invalid(format!("need 1 <= t < m (got t={t}, m={m})")));
        }
        if gcd(s * m + t, k) != 1 {
            return Err(invalid("gcd(r,k) != 1"));
        }
        if variant == Variant::Minus && k % 2 == 0 {
            return Err(invalid("the minus variant needs k odd"));
        }
        Ok(ExtendedParams {
            m,
            k,
            s,
            t,
            variant,
        })
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn s(&self) -> i64 {
        self.s
    }

    pub fn t(&self) -> i64 {
        self.t
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn r(&self) -> i64 {
        self.s * self.m + self.t
    }

    /// `r - tk`, the numerator offset before normalization. Never zero: `k`
    /// would divide `r`, contradicting `gcd(r, k) = 1` with `k > 1`.
    pub fn numerator_offset(&self) -> i64 {
        self.r() - self.t * self.k
    }
}

/// One parameterized theorem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TheoremInstance {
    AndrewsBressoud(AndrewsBressoudParams),
    AlladiGordon(AlladiGordonParams),
    Extended(ExtendedParams),
}

impl TheoremInstance {
    pub fn family_name(&self) -> &'static str {
        match self {
            TheoremInstance::AndrewsBressoud(_) => "ab",
            TheoremInstance::AlladiGordon(p) if p.variant == Variant::Plus => "ag-plus",
            TheoremInstance::AlladiGordon(_) => "ag-minus",
            TheoremInstance::Extended(p) if p.variant == Variant::Plus => "plus",
            TheoremInstance::Extended(_) => "minus",
        }
    }

    /// The `r` of each family (derived where applicable).
    pub fn r(&self) -> i64 {
        match self {
            TheoremInstance::AndrewsBressoud(p) => p.r,
            TheoremInstance::AlladiGordon(p) => p.r(),
            TheoremInstance::Extended(p) => p.r(),
        }
    }

    pub fn k(&self) -> i64 {
        match self {
            TheoremInstance::AndrewsBressoud(p) => p.k,
            TheoremInstance::AlladiGordon(p) => p.k,
            TheoremInstance::Extended(p) => p.k,
        }
    }

    pub fn params_json(&self) -> Value {
        match self {
            TheoremInstance::AndrewsBressoud(p) => json!({"k": p.k, "r": p.r}),
            TheoremInstance::AlladiGordon(p) => json!({
                "m": p.m, "k": p.k, "s": p.s, "sign": p.variant,
                "r_star": p.r_star(), "r_prime": p.r_prime(),
            }),
            TheoremInstance::Extended(p) => json!({
                "m": p.m, "k": p.k, "s": p.s, "t": p.t, "sign": p.variant,
            }),
        }
    }
}

impl fmt::Display for TheoremInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TheoremInstance::AndrewsBressoud(p) => write!(f, "k={} r={}", p.k, p.r),
            TheoremInstance::AlladiGordon(p) => write!(f, "m={} k={} s={}", p.m, p.k, p.s),
            TheoremInstance::Extended(p) => {
                write!(f, "m={} k={} s={} t={}", p.m, p.k, p.s, p.t)
            }
        }
    }
}

impl From<AndrewsBressoudParams> for TheoremInstance {
    fn from(p: AndrewsBressoudParams) -> Self {
        TheoremInstance::AndrewsBressoud(p)
    }
}

impl From<AlladiGordonParams> for TheoremInstance {
    fn from(p: AlladiGordonParams) -> Self {
        TheoremInstance::AlladiGordon(p)
    }
}

impl From<ExtendedParams> for TheoremInstance {
    fn from(p: ExtendedParams) -> Self {
        TheoremInstance::Extended(p)
    }
}

/// `n ≡ residue (mod modulus)`, residue reduced into `[0, modulus)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ResidueClass {
    #[serde(rename = "mod")]
    modulus: i64,
    #[serde(rename = "res")]
    residue: i64,
}

impl ResidueClass {
    pub fn new(modulus: i64, residue: i64) -> Self {
        assert!(modulus >= 1, "modulus must be positive");
        ResidueClass {
            modulus,
            residue: residue.rem_euclid(modulus),
        }
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    pub fn residue(&self) -> i64 {
        self.residue
    }

    pub fn contains(&self, n: i64) -> bool {
        n.rem_euclid(self.modulus) == self.residue
    }

    /// Members of the class in `[lo, hi)`.
    pub fn members(&self, lo: i64, hi: i64) -> impl Iterator<Item = i64> {
        let first = lo + (self.residue - lo).rem_euclid(self.modulus);
        (first..hi.max(first)).step_by(self.modulus as usize)
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}n+{}", self.modulus, self.residue)
    }
}

fn factor_pair(sign: Sign, a: i64, modulus: i64) -> Result<Vec<PochhammerFactor>> {
    Ok(vec![
        PochhammerFactor::new(sign, a, modulus)?,
        PochhammerFactor::new(sign, modulus - a, modulus)?,
    ])
}

/// The product of a theorem, as displayed. For extended parameters with
/// `r < tk` the result carries the prefactor `-q^(r-tk)`.
pub fn build_spec(params: &TheoremInstance) -> Result<ProductSpec> {
    match params {
        TheoremInstance::AndrewsBressoud(p) => {
            let (k, r) = (p.k, p.r);
            Ok(ProductSpec::new(
                factor_pair(Sign::Plus, r, 2 * k)?,
                factor_pair(Sign::Plus, k - r, 2 * k)?,
            ))
        }
        TheoremInstance::AlladiGordon(p) => {
            let mk = p.m * p.k;
            Ok(ProductSpec::new(
                factor_pair(Sign::Plus, p.r(), mk)?,
                factor_pair(p.variant.denominator_sign(), p.s, mk)?,
            ))
        }
        TheoremInstance::Extended(p) => {
            let mk = p.m * p.k;
            let (sign, shift, numerator) = normalized_pair(p.numerator_offset(), mk)?;
            Ok(ProductSpec::new(
                numerator,
                factor_pair(p.variant.denominator_sign(), p.r(), mk)?,
            )
            .with_prefactor(sign, shift))
        }
    }
}

/// Predicted class of vanishing coefficients of the product expanded without
/// its monomial prefactor.
pub fn zero_class(params: &TheoremInstance) -> Result<ResidueClass> {
    match params {
        TheoremInstance::AndrewsBressoud(p) => {
            let (k, r) = (p.k, p.r);
            Ok(ResidueClass::new(k, r * (k - r + 1) / 2))
        }
        TheoremInstance::AlladiGordon(p) => Ok(ResidueClass::new(p.k, p.r() * p.r_prime())),
        TheoremInstance::Extended(p) => {
            let (k, r, s) = (p.k, p.r(), p.s);
            let offset = p.numerator_offset();
            if offset == 0 {
                return Err(Error::Degenerate("r - tk = 0".into()));
            }
            if offset > 0 {
                Ok(ResidueClass::new(k, -r * s))
            } else {
                // dropping the prefactor -q^(r-tk) shifts exponents by tk - r
                Ok(ResidueClass::new(k, -offset - r * s))
            }
        }
    }
}

/// Result of checking one theorem instance against an exact expansion.
#[derive(Debug, Clone)]
pub struct VanishingReport {
    pub params: TheoremInstance,
    /// Product that was expanded (no monomial prefactor).
    pub spec: ProductSpec,
    pub order: i64,
    pub zero_class: ResidueClass,
    /// The smallest violating exponents, at most [`REPORTED_VIOLATIONS`].
    pub violations: Vec<(i64, BigInt)>,
    pub violation_count: usize,
    /// Residues mod `k` whose known coefficients are all zero, computed
    /// without reference to the prediction.
    pub observed_zero_classes: Vec<ResidueClass>,
}

impl VanishingReport {
    pub fn verified(&self) -> bool {
        self.violation_count == 0
    }

    pub fn to_json(&self) -> Value {
        json!({
            "family": self.params.family_name(),
            "params": self.params.params_json(),
            "r": self.params.r(),
            "order": self.order,
            "zero_class": self.zero_class,
            "violations": self
                .violations
                .iter()
                .map(|(e, c)| json!([e, c.to_string()]))
                .collect::<Vec<_>>(),
            "observed_zero_classes": self.observed_zero_classes,
        })
    }
}

/// Residues mod `modulus` where every known coefficient vanishes, provided
/// at least [`MIN_CLASS_SAMPLES`] exponents of the class are known.
pub fn observed_zero_classes(series: &Series, modulus: i64) -> Vec<ResidueClass> {
    (0..modulus)
        .map(|res| ResidueClass::new(modulus, res))
        .filter(|class| {
            let mut seen = 0usize;
            let all_zero = class.members(series.valuation(), series.order()).all(|e| {
                seen += 1;
                series.get(e).is_some_and(|c| c.is_zero())
            });
            all_zero && seen >= MIN_CLASS_SAMPLES
        })
        .collect()
}

/// Expands the theorem's product below `order` and checks the predicted
/// zero class.
pub fn verify_vanishing(params: &TheoremInstance, order: i64) -> Result<VanishingReport> {
    if order < 1 {
        return Err(invalid(format!("order must be >= 1 (got {order})")));
    }
    let spec = build_spec(params)?.without_prefactor();
    let class = zero_class(params)?;
    let series: Series = expand_product(&spec, order)?;
    let mut violations = Vec::new();
    let mut violation_count = 0;
    for e in class.members(series.valuation(), series.order()) {
        let c = series.get(e).expect("inside window");
        if !c.is_zero() {
            violation_count += 1;
            if violations.len() < REPORTED_VIOLATIONS {
                violations.push((e, c.clone()));
            }
        }
    }
    Ok(VanishingReport {
        params: *params,
        spec,
        order,
        zero_class: class,
        violations,
        violation_count,
        observed_zero_classes: observed_zero_classes(&series, params.k()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Extended family, `(q^r, q^(mk-r))` in the denominator.
    Plus,
    /// Extended family, `(-q^r, -q^(mk-r))` in the denominator.
    Minus,
    AndrewsBressoud,
    AlladiGordon,
    AlladiGordonMinus,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "plus" | "mcl" => Ok(Family::Plus),
            "minus" => Ok(Family::Minus),
            "ab" => Ok(Family::AndrewsBressoud),
            "ag" | "ag-plus" => Ok(Family::AlladiGordon),
            "ag-minus" => Ok(Family::AlladiGordonMinus),
            other => Err(Error::Parse(format!("unknown family '{other}'"))),
        }
    }
}

/// A grid tuple that failed its family's invariants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedTuple {
    pub params: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct ScanOutcome {
    pub reports: Vec<VanishingReport>,
    pub skipped: Vec<SkippedTuple>,
}

impl ScanOutcome {
    pub fn violated(&self) -> usize {
        self.reports.iter().filter(|r| !r.verified()).count()
    }

    pub fn all_verified(&self) -> bool {
        self.violated() == 0
    }
}

/// All grid tuples of a family in lexicographic parameter order, each either
/// a valid instance or a skip record.
pub fn grid(
    family: Family,
    ks: RangeInclusive<i64>,
    ms: RangeInclusive<i64>,
) -> Vec<std::result::Result<TheoremInstance, SkippedTuple>> {
    let skip = |params: String, e: Error| SkippedTuple {
        params,
        reason: e.to_string(),
    };
    let mut out = Vec::new();
    match family {
        Family::AndrewsBressoud => {
            for k in ks {
                for r in 1..k {
                    out.push(
                        AndrewsBressoudParams::new(k, r)
                            .map(Into::into)
                            .map_err(|e| skip(format!("k={k} r={r}"), e)),
                    );
                }
            }
        }
        Family::AlladiGordon | Family::AlladiGordonMinus => {
            let variant = if family == Family::AlladiGordon {
                Variant::Plus
            } else {
                Variant::Minus
            };
            for m in ms {
                for k in ks.clone() {
                    if !(1 < m && m < k) {
                        continue;
                    }
                    for s in 1..m * k {
                        out.push(
                            AlladiGordonParams::new(m, k, s, variant)
                                .map(Into::into)
                                .map_err(|e| skip(format!("m={m} k={k} s={s}"), e)),
                        );
                    }
                }
            }
        }
        Family::Plus | Family::Minus => {
            let variant = if family == Family::Plus {
                Variant::Plus
            } else {
                Variant::Minus
            };
            for m in ms {
                for k in ks.clone() {
                    for s in 0..k {
                        for t in 1..m {
                            out.push(
                                ExtendedParams::new(m, k, s, t, variant)
                                    .map(Into::into)
                                    .map_err(|e| skip(format!("m={m} k={k} s={s} t={t}"), e)),
                            );
                        }
                    }
                }
            }
        }
    }
    out
}

/// Verifies every valid tuple of the grid in parallel on the current rayon
/// pool. Output order is the grid order.
pub fn scan(
    family: Family,
    ks: RangeInclusive<i64>,
    ms: RangeInclusive<i64>,
    order: i64,
) -> Result<ScanOutcome> {
    let mut outcome = ScanOutcome::default();
    let mut valid = Vec::new();
    for item in grid(family, ks, ms) {
        match item {
            Ok(p) => valid.push(p),
            Err(s) => outcome.skipped.push(s),
        }
    }
    outcome.reports = valid
        .par_iter()
        .map(|p| verify_vanishing(p, order))
        .collect::<Result<Vec<_>>>()?;
    Ok(outcome)
}
