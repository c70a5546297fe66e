//! Truncated formal power series with exact big-integer coefficients.
//!
//! A [`TruncatedSeries`] of order `N` stores `c[0..=N]` and stands for the
//! power series modulo `q^(N+1)`. Binary operations take the smaller of the two
//! truncation orders. No coefficient is ever rounded.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exec::Execution;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    coeffs: Vec<BigInt>,
}

impl TruncatedSeries {
    pub fn zero(order: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![BigInt::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(0, BigInt::one(), order)
    }

    /// `value * q^exponent`; the zero series if `exponent > order`.
    pub fn monomial(exponent: usize, value: BigInt, order: usize) -> Self {
        let mut s = Self::zero(order);
        if exponent <= order {
            s.coeffs[exponent] = value;
        }
        s
    }

    /// Takes ownership of an explicit coefficient vector. The order is `len - 1`.
    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(invalid("a series needs at least the constant coefficient"));
        }
        Ok(TruncatedSeries { coeffs })
    }

    /// Small-integer convenience constructor; pads with zeros or truncates to `order`.
    pub fn from_i64s(values: &[i64], order: usize) -> Self {
        let mut s = Self::zero(order);
        for (c, &v) in s.coeffs.iter_mut().zip(values) {
            *c = BigInt::from(v);
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    /// Coefficient of `q^k`. Panics if `k` is beyond the truncation order.
    pub fn coeff(&self, k: usize) -> &BigInt {
        &self.coeffs[k]
    }

    pub fn get(&self, k: usize) -> Option<&BigInt> {
        self.coeffs.get(k)
    }

    pub fn set(&mut self, k: usize, value: BigInt) {
        self.coeffs[k] = value;
    }

    /// Drops every coefficient above `order`. No-op if already shorter.
    pub fn truncate(&self, order: usize) -> Self {
        let keep = (order + 1).min(self.coeffs.len());
        TruncatedSeries {
            coeffs: self.coeffs[..keep].to_vec(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().min(other.coeffs.len());
        TruncatedSeries {
            coeffs: (0..n).map(|k| &self.coeffs[k] + &other.coeffs[k]).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().min(other.coeffs.len());
        TruncatedSeries {
            coeffs: (0..n).map(|k| &self.coeffs[k] - &other.coeffs[k]).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, factor: &BigInt) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Cauchy product using the default execution policy.
    pub fn mul(&self, other: &Self) -> Self {
        self.mul_with(other, Execution::default())
    }

    /// Schoolbook Cauchy product. Output is identical under both policies.
    pub fn mul_with(&self, other: &Self, exec: Execution) -> Self {
        let n = self.coeffs.len().min(other.coeffs.len());
        let a = &self.coeffs[..n];
        let b = &other.coeffs[..n];
        // index list of nonzero entries; most catalog products are sparse
        let support: Vec<usize> = (0..n).filter(|&i| !a[i].is_zero()).collect();
        let coeffs = exec.map_range(0..n, |k| {
            let mut acc = BigInt::zero();
            for &i in support.iter().take_while(|&&i| i <= k) {
                let bj = &b[k - i];
                if !bj.is_zero() {
                    acc += &a[i] * bj;
                }
            }
            acc
        });
        TruncatedSeries { coeffs }
    }

    /// Multiplicative inverse modulo `q^(N+1)`. The constant term must be a unit.
    pub fn invert(&self) -> Result<Self> {
        let a0 = &self.coeffs[0];
        if !(a0.is_one() || (-a0).is_one()) {
            return Err(Error::NonUnit(a0.to_string()));
        }
        let n = self.coeffs.len();
        let support: Vec<usize> = (1..n).filter(|&i| !self.coeffs[i].is_zero()).collect();
        let mut inv: Vec<BigInt> = Vec::with_capacity(n);
        inv.push(a0.clone());
        for k in 1..n {
            let mut acc = BigInt::zero();
            for &i in support.iter().take_while(|&&i| i <= k) {
                acc += &self.coeffs[i] * &inv[k - i];
            }
            // a0 is its own inverse
            let v = if a0.is_one() { -acc } else { acc };
            inv.push(v);
        }
        Ok(TruncatedSeries { coeffs: inv })
    }

    pub fn pow(&self, exponent: u32) -> Self {
        let mut result = Self::one(self.order());
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

    /// Multiplies by `q^k`, keeping the truncation order.
    pub fn shift(&self, k: usize) -> Self {
        let n = self.coeffs.len();
        let mut s = Self::zero(n - 1);
        for i in 0..n.saturating_sub(k) {
            s.coeffs[i + k] = self.coeffs[i].clone();
        }
        s
    }

    /// Substitutes `q -> q^k`. The result has order `k * N`, the largest order at
    /// which every coefficient is still determined.
    pub fn dilate(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(invalid("dilation factor must be positive"));
        }
        let mut s = Self::zero(self.order() * k);
        for (i, c) in self.coeffs.iter().enumerate() {
            s.coeffs[i * k] = c.clone();
        }
        Ok(s)
    }

    /// `result[k] = a[t*k + j]`, truncated at `floor((N - j) / t)`.
    pub fn dissect(&self, modulus: usize, residue: usize) -> Result<Self> {
        if modulus == 0 {
            return Err(invalid("dissection modulus must be positive"));
        }
        if residue >= modulus {
            return Err(invalid(format!("residue {residue} is not below modulus {modulus}")));
        }
        if residue > self.order() {
            return Err(invalid(format!(
                "residue {residue} exceeds the truncation order {}",
                self.order()
            )));
        }
        let coeffs = self.coeffs[residue..].iter().step_by(modulus).cloned().collect();
        Ok(TruncatedSeries { coeffs })
    }

    /// Substitutes `q -> -q`.
    pub fn substitute_signed(&self) -> Self {
        TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { -c } else { c.clone() })
                .collect(),
        }
    }

    /// In-place multiplication by the binomial `1 - a q^e` with `a = sign`.
    pub fn mul_binomial(&mut self, sign: Sign, e: usize) {
        if e == 0 || e > self.order() {
            // e == 0 is excluded by every caller; the factor is constant.
            debug_assert!(e != 0);
            return;
        }
        for k in (e..self.coeffs.len()).rev() {
            let (lo, hi) = self.coeffs.split_at_mut(k);
            match sign {
                Sign::Pos => hi[0] -= &lo[k - e],
                Sign::Neg => hi[0] += &lo[k - e],
            }
        }
    }

    /// In-place division by the binomial `1 - a q^e` with `a = sign`.
    pub fn div_binomial(&mut self, sign: Sign, e: usize) {
        if e == 0 || e > self.order() {
            debug_assert!(e != 0);
            return;
        }
        for k in e..self.coeffs.len() {
            let (lo, hi) = self.coeffs.split_at_mut(k);
            match sign {
                Sign::Pos => hi[0] += &lo[k - e],
                Sign::Neg => hi[0] -= &lo[k - e],
            }
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    /// Newline-delimited `exponent<TAB>coefficient` records.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            out.push_str(&format!("{k}\t{c}\n"));
        }
        out
    }

    /// Inverse of [`to_tsv`](Self::to_tsv). Exponents must run 0, 1, 2, ... without gaps.
    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut coeffs = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let perr = |detail: String| Error::Parse { what: "series record", detail };
            let (exp, value) = line
                .split_once('\t')
                .ok_or_else(|| perr(format!("line {}: missing tab", line_no + 1)))?;
            let exp: usize = exp
                .trim()
                .parse()
                .map_err(|_| perr(format!("line {}: bad exponent {exp:?}", line_no + 1)))?;
            if exp != coeffs.len() {
                return Err(perr(format!(
                    "line {}: expected exponent {}, found {exp}",
                    line_no + 1,
                    coeffs.len()
                )));
            }
            let value = BigInt::from_str(value.trim())
                .map_err(|_| perr(format!("line {}: bad coefficient {value:?}", line_no + 1)))?;
            coeffs.push(value);
        }
        Self::from_coeffs(coeffs)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "q")?,
                (1, false) => write!(f, "{mag}q")?,
                (_, true) => write!(f, "q^{k}")?,
                (_, false) => write!(f, "{mag}q^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.coeffs.len())
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: Self) -> TruncatedSeries {
        TruncatedSeries::add(self, rhs)
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: Self) -> TruncatedSeries {
        TruncatedSeries::sub(self, rhs)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries::neg(self)
    }
}

impl std::ops::Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: Self) -> TruncatedSeries {
        TruncatedSeries::mul(self, rhs)
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    order: usize,
    coefficients: Vec<String>,
}

// Coefficients travel as decimal strings so no JSON consumer rounds them.
impl Serialize for TruncatedSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesRepr {
            order: self.order(),
            coefficients: self.coeffs.iter().map(|c| c.to_string()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TruncatedSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = SeriesRepr::deserialize(d)?;
        if repr.coefficients.len() != repr.order + 1 {
            return Err(D::Error::custom("coefficient count does not match order"));
        }
        let coeffs = repr
            .coefficients
            .iter()
            .map(|c| BigInt::from_str(c).map_err(D::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(TruncatedSeries { coeffs })
    }
}

/// Sign of `a` in a Pochhammer symbol `(a q^r; q^m)_L`: `Pos` gives factors
/// `1 - q^e`, `Neg` gives `1 + q^e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }

    pub fn from_i64(v: i64) -> Result<Sign> {
        match v {
            1 => Ok(Sign::Pos),
            -1 => Ok(Sign::Neg),
            _ => Err(invalid(format!("sign must be +1 or -1, got {v}"))),
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

/// Number of factors in a Pochhammer product, or the largest-part bound index
/// of a partition class.
///
/// Serialized as a number, or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Length {
    Finite(u32),
    #[serde(with = "infinite_tag")]
    Infinite,
}

mod infinite_tag {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("inf")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        match String::deserialize(d)?.as_str() {
            "inf" => Ok(()),
            other => Err(de::Error::custom(format!("expected \"inf\", got {other:?}"))),
        }
    }
}

impl Length {
    pub fn finite(self) -> Option<u32> {
        match self {
            Length::Finite(l) => Some(l),
            Length::Infinite => None,
        }
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Length::Finite(l) => write!(f, "{l}"),
            Length::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Length {
    type Err = Error;

    fn from_str(s: &str) -> Result<Length> {
        match s.trim() {
            "inf" | "infinite" | "infinity" | "∞" => Ok(Length::Infinite),
            t => t.parse::<u32>().map(Length::Finite).map_err(|_| Error::Parse {
                what: "length",
                detail: format!("{s:?} is neither a count nor 'inf'"),
            }),
        }
    }
}

/// `(a q^start; q^step)_len` with `a = ±1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pochhammer {
    pub sign: Sign,
    pub start: u32,
    pub step: u32,
    pub len: Length,
}

impl Pochhammer {
    pub fn new(sign: Sign, start: u32, step: u32, len: Length) -> Result<Self> {
        if start == 0 {
            return Err(invalid("Pochhammer start exponent must be at least 1"));
        }
        if step == 0 {
            return Err(invalid("Pochhammer step must be at least 1"));
        }
        Ok(Pochhammer { sign, start, step, len })
    }

    /// `(±q^start; q^step)_∞`. Panics on zero arguments; intended for constants.
    pub fn infinite(sign: Sign, start: u32, step: u32) -> Self {
        Self::new(sign, start, step, Length::Infinite).expect("positive start and step")
    }

    /// Exponents of the binomial factors that can affect coefficients up to `order`.
    pub fn exponents(&self, order: usize) -> impl Iterator<Item = usize> + '_ {
        let limit = self.len.finite().map_or(u64::MAX, u64::from);
        let (start, step) = (self.start as usize, self.step as usize);
        (0u64..)
            .take_while(move |&j| j < limit)
            .map(move |j| start + step * j as usize)
            .take_while(move |&e| e <= order)
    }

    pub fn mul_into(&self, s: &mut TruncatedSeries) {
        let order = s.order();
        for e in self.exponents(order) {
            s.mul_binomial(self.sign, e);
        }
    }

    pub fn div_into(&self, s: &mut TruncatedSeries) {
        let order = s.order();
        for e in self.exponents(order) {
            s.div_binomial(self.sign, e);
        }
    }
}

/// Expansion of `prod_{j<L} (1 - a q^(r + m j))` truncated at `order`.
pub fn qpochhammer(sign: Sign, r: u32, m: u32, len: Length, order: usize) -> Result<TruncatedSeries> {
    let p = Pochhammer::new(sign, r, m, len)?;
    let mut s = TruncatedSeries::one(order);
    p.mul_into(&mut s);
    Ok(s)
}
