//! Integer partitions: constrained enumeration, conjugation, the Stanley
//! statistic and the brute-force oracles the product expansions are checked
//! against.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;

/// Exhaustive classification refuses `n` above this without an override.
pub const CLASSIFY_LIMIT: u32 = 80;

/// A nonincreasing sequence of positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u32>,
    norm: u32,
}

impl Partition {
    pub fn empty() -> Self {
        Partition { parts: Vec::new(), norm: 0 }
    }

    /// Accepts parts in any order; zero parts are rejected.
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::Parse {
                what: "partition",
                detail: "parts must be positive".into(),
            });
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        let norm = parts.iter().sum();
        Ok(Partition { parts, norm })
    }

    /// For callers that already hold a nonincreasing list of positive parts.
    pub(crate) fn from_sorted(parts: Vec<u32>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        debug_assert!(parts.iter().all(|&p| p > 0));
        let norm = parts.iter().sum();
        Partition { parts, norm }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn norm(&self) -> u32 {
        self.norm
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn largest(&self) -> Option<u32> {
        self.parts.first().copied()
    }

    /// Number of parts equal to `value`.
    pub fn multiplicity(&self, value: u32) -> usize {
        self.parts.iter().filter(|&&p| p == value).count()
    }

    /// Number of parts congruent to `residue` mod `modulus`.
    pub fn residue_count(&self, residue: u32, modulus: u32) -> usize {
        let r = residue % modulus;
        self.parts.iter().filter(|&&p| p % modulus == r).count()
    }

    pub fn odd_parts(&self) -> usize {
        self.parts.iter().filter(|&&p| p % 2 == 1).count()
    }

    pub fn conjugate(&self) -> Partition {
        let width = self.largest().unwrap_or(0) as usize;
        let mut cols = vec![0u32; width];
        for &p in &self.parts {
            for c in cols.iter_mut().take(p as usize) {
                *c += 1;
            }
        }
        Partition::from_sorted(cols)
    }

    /// Number of odd parts of the conjugate, without building it.
    pub fn conjugate_odd_parts(&self) -> usize {
        // column j (1-based) has length #{parts >= j}; scan parts from the smallest
        let mut odd = 0;
        let mut prev = 0u32;
        let len = self.parts.len();
        for (i, &p) in self.parts.iter().rev().enumerate() {
            let height = len - i;
            if height % 2 == 1 {
                odd += (p - prev) as usize;
            }
            prev = p;
        }
        odd
    }
}

impl fmt::Display for Partition {
    /// Comma-separated, nonincreasing, runs written as `part^count`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "()");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.parts.len() {
            let p = self.parts[i];
            let run = self.parts[i..].iter().take_while(|&&x| x == p).count();
            if !first {
                write!(f, ",")?;
            }
            first = false;
            if run == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{run}")?;
            }
            i += run;
        }
        Ok(())
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Parses `"45,45,43,19,3"` or the shorthand `"7^2,1^4"`; parentheses and
    /// spaces are ignored, and `"()"` is the empty partition.
    fn from_str(s: &str) -> Result<Partition> {
        let perr = |detail: String| Error::Parse { what: "partition", detail };
        let body: String = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '(' && *c != ')')
            .collect();
        if body.is_empty() {
            return Ok(Partition::empty());
        }
        let mut parts = Vec::new();
        for token in body.split(',') {
            let (part, count) = match token.split_once('^') {
                Some((p, c)) => (p, c),
                None => (token, "1"),
            };
            let part: u32 = part.parse().map_err(|_| perr(format!("bad part {token:?}")))?;
            let count: usize = count.parse().map_err(|_| perr(format!("bad multiplicity {token:?}")))?;
            if part == 0 {
                return Err(perr("parts must be positive".into()));
            }
            parts.extend(std::iter::repeat_n(part, count));
        }
        Partition::new(parts)
    }
}

impl Serialize for Partition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Restrictions applied during enumeration. All fields default to "no restriction".
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EnumerationConstraint {
    pub max_part: Option<u32>,
    /// `(modulus, allowed residues)`.
    pub residues: Option<(u32, Vec<u32>)>,
    /// Consecutive parts differ by at least this much.
    pub min_gap: Option<u32>,
    /// Two even parts may not differ by exactly 2.
    pub forbid_consecutive_evens: bool,
    /// Upper bound on the number of parts that are `<= 2`.
    pub max_parts_le2: Option<usize>,
}

impl EnumerationConstraint {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn max_part(mut self, bound: u32) -> Self {
        self.max_part = Some(bound);
        self
    }

    pub fn residues(mut self, modulus: u32, allowed: &[u32]) -> Self {
        self.residues = Some((modulus, allowed.iter().map(|r| r % modulus).collect()));
        self
    }

    pub fn min_gap(mut self, gap: u32) -> Self {
        self.min_gap = Some(gap);
        self
    }

    pub fn forbid_consecutive_evens(mut self) -> Self {
        self.forbid_consecutive_evens = true;
        self
    }

    pub fn max_parts_le2(mut self, bound: usize) -> Self {
        self.max_parts_le2 = Some(bound);
        self
    }

    /// Parts `≡ ±r (mod m)` with the given largest-part bound, if any.
    pub fn plus_minus_residue(m: u32, r: u32, max_part: Option<u32>) -> Self {
        let mut c = Self::none().residues(m, &[r, m - r]);
        c.max_part = max_part;
        c
    }

    /// Göllnitz–Gordon conditions: gaps of at least 2, no two consecutive even
    /// integers as parts, and at most `1 - i` parts not exceeding 2.
    pub fn gollnitz_gordon(i: u32) -> Self {
        Self::none()
            .min_gap(2)
            .forbid_consecutive_evens()
            .max_parts_le2(if i == 0 { 1 } else { 0 })
    }

    pub fn admits(&self, p: &Partition) -> bool {
        let mut small = 0;
        let mut prev: Option<u32> = None;
        for &q in p.parts() {
            if !self.part_allowed(prev, q, small) {
                return false;
            }
            if q <= 2 {
                small += 1;
            }
            prev = Some(q);
        }
        true
    }

    fn residue_ok(&self, q: u32) -> bool {
        match &self.residues {
            Some((m, allowed)) => allowed.contains(&(q % m)),
            None => true,
        }
    }

    fn part_allowed(&self, prev: Option<u32>, q: u32, small_so_far: usize) -> bool {
        if let Some(bound) = self.max_part {
            if q > bound {
                return false;
            }
        }
        if !self.residue_ok(q) {
            return false;
        }
        if let Some(p) = prev {
            if q > p {
                return false;
            }
            if let Some(g) = self.min_gap {
                if p - q < g {
                    return false;
                }
            }
            if self.forbid_consecutive_evens && p % 2 == 0 && q % 2 == 0 && p - q == 2 {
                return false;
            }
        }
        if let Some(bound) = self.max_parts_le2 {
            if q <= 2 && small_so_far + 1 > bound {
                return false;
            }
        }
        true
    }
}

/// Streams the partitions of `n` admitted by a constraint, in reverse
/// lexicographic order of their part sequences.
pub struct Partitions {
    n: u32,
    constraint: EnumerationConstraint,
    stack: Vec<u32>,
    sum: u32,
    small: usize,
    fresh: bool,
    done: bool,
}

impl Partitions {
    fn candidate(&self, upper: u32) -> Option<u32> {
        let prev = self.stack.last().copied();
        let mut q = upper;
        if let Some(p) = prev {
            q = q.min(p);
        }
        if let Some(b) = self.constraint.max_part {
            q = q.min(b);
        }
        while q >= 1 {
            if self.constraint.part_allowed(prev, q, self.small) {
                return Some(q);
            }
            q -= 1;
        }
        None
    }

    fn push(&mut self, q: u32) {
        self.stack.push(q);
        self.sum += q;
        if q <= 2 {
            self.small += 1;
        }
    }

    fn pop(&mut self) -> Option<u32> {
        let q = self.stack.pop()?;
        self.sum -= q;
        if q <= 2 {
            self.small -= 1;
        }
        Some(q)
    }

    /// Greedily appends the largest admissible parts; true if it reached `n`.
    fn extend(&mut self) -> bool {
        while self.sum < self.n {
            match self.candidate(self.n - self.sum) {
                Some(q) => self.push(q),
                None => return false,
            }
        }
        true
    }

    fn current(&self) -> Partition {
        Partition::from_sorted(self.stack.clone())
    }
}

impl Iterator for Partitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        if self.fresh {
            self.fresh = false;
            if self.extend() {
                return Some(self.current());
            }
        }
        loop {
            let Some(last) = self.pop() else {
                self.done = true;
                return None;
            };
            if last > 1 {
                if let Some(q) = self.candidate(last - 1) {
                    self.push(q);
                    if self.extend() {
                        return Some(self.current());
                    }
                }
            }
        }
    }
}

pub fn enumerate(n: u32, constraint: &EnumerationConstraint) -> Partitions {
    Partitions {
        n,
        constraint: constraint.clone(),
        stack: Vec::new(),
        sum: 0,
        small: 0,
        fresh: true,
        done: false,
    }
}

pub fn count(n: u32, constraint: &EnumerationConstraint) -> u64 {
    enumerate(n, constraint).count() as u64
}

pub fn conjugate(p: &Partition) -> Partition {
    p.conjugate()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StanleyClass {
    Zero,
    Two,
}

/// `(O(π) - O(π')) mod 4`, where `O` counts odd parts.
pub fn stanley_class(p: &Partition) -> StanleyClass {
    let diff = p.odd_parts() as i64 - p.conjugate_odd_parts() as i64;
    match diff.rem_euclid(4) {
        0 => StanleyClass::Zero,
        2 => StanleyClass::Two,
        odd => panic!("odd Stanley difference {odd} for {p}: O(π) and O(π') must share parity"),
    }
}

/// `p(0..=order)` from Euler's pentagonal recurrence.
pub fn p_table(order: usize) -> Vec<BigInt> {
    let mut p: Vec<BigInt> = Vec::with_capacity(order + 1);
    p.push(BigInt::from(1));
    for n in 1..=order {
        let mut acc = BigInt::zero();
        for k in 1.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > n {
                break;
            }
            let positive = k % 2 == 1;
            let g2 = k * (3 * k + 1) / 2;
            let mut term = p[n - g1].clone();
            if g2 <= n {
                term += &p[n - g2];
            }
            if positive {
                acc += term;
            } else {
                acc -= term;
            }
        }
        p.push(acc);
    }
    p
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub p0: u64,
    pub p2: u64,
}

impl ClassCounts {
    pub fn total(&self) -> u64 {
        self.p0 + self.p2
    }

    pub fn difference(&self) -> i64 {
        self.p0 as i64 - self.p2 as i64
    }
}

/// Exhaustively classifies the partitions of `n` by the Stanley statistic.
/// Refuses `n > CLASSIFY_LIMIT` unless `force` is set.
pub fn classify_counts(n: u32, force: bool) -> Result<ClassCounts> {
    if n > CLASSIFY_LIMIT && !force {
        return Err(Error::EnumerationLimit { n, limit: CLASSIFY_LIMIT });
    }
    let mut counts = ClassCounts { p0: 0, p2: 0 };
    for p in enumerate(n, &EnumerationConstraint::none()) {
        match stanley_class(&p) {
            StanleyClass::Zero => counts.p0 += 1,
            StanleyClass::Two => counts.p2 += 1,
        }
    }
    Ok(counts)
}

/// [`classify_counts`] for every `n <= n_max`, one task per `n`.
pub fn classify_range(n_max: u32, exec: Execution) -> Result<Vec<ClassCounts>> {
    if n_max > CLASSIFY_LIMIT {
        return Err(Error::EnumerationLimit { n: n_max, limit: CLASSIFY_LIMIT });
    }
    // largest n first keeps the parallel tail short
    let mut out = exec.map_range(0..n_max as usize + 1, |i| {
        let n = n_max - i as u32;
        classify_counts(n, false).expect("guarded above")
    });
    out.reverse();
    Ok(out)
}

/// Göllnitz–Gordon partitions of `n` with at most `1 - i` parts `<= 2`.
pub fn gg_count(n: u32, i: u32) -> Result<u64> {
    if i > 1 {
        return Err(crate::error::invalid(format!("Göllnitz–Gordon index must be 0 or 1, got {i}")));
    }
    Ok(count(n, &EnumerationConstraint::gollnitz_gordon(i)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(s: &str) -> Partition {
        s.parse().unwrap()
    }

    fn all(n: u32) -> Vec<Partition> {
        enumerate(n, &EnumerationConstraint::none()).collect()
    }

    #[test]
    fn enumerate_four_in_reverse_lex_order() {
        let got: Vec<String> = all(4).iter().map(|p| p.to_string()).collect();
        assert_eq!(got, ["4", "3,1", "2^2", "2,1^2", "1^4"]);
    }

    #[test]
    fn enumerate_zero_yields_empty_partition() {
        assert_eq!(all(0), vec![Partition::empty()]);
        let c = EnumerationConstraint::none().residues(8, &[3, 5]).max_part(5);
        assert_eq!(enumerate(0, &c).collect::<Vec<_>>(), vec![Partition::empty()]);
    }

    #[test]
    fn enumerate_table_column() {
        let c = EnumerationConstraint::plus_minus_residue(8, 3, Some(23));
        let got: Vec<Partition> = enumerate(19, &c).collect();
        let mut want = vec![part("19"), part("13,3,3"), part("11,5,3"), part("5,5,3,3,3")];
        want.sort_by(|a, b| b.parts().cmp(a.parts()));
        assert_eq!(got, want);
    }

    #[test]
    fn enumeration_is_strictly_decreasing_lexicographically() {
        let ps = all(12);
        for w in ps.windows(2) {
            assert!(w[0].parts() > w[1].parts());
        }
    }

    #[test]
    fn unsatisfiable_constraint_is_empty() {
        let c = EnumerationConstraint::none().residues(4, &[2]);
        assert_eq!(count(7, &c), 0);
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(part("3,1").conjugate(), part("2,1,1"));
        assert_eq!(part("2,1").conjugate(), part("2,1"));
        assert_eq!(Partition::empty().conjugate(), Partition::empty());
        for n in 0..=12 {
            for p in all(n) {
                let c = p.conjugate();
                assert_eq!(c.conjugate(), p);
                assert_eq!(c.norm(), n);
                assert_eq!(c.odd_parts(), p.conjugate_odd_parts());
                // odd-part counts of π and π' share the parity of n
                assert_eq!(p.odd_parts() % 2, n as usize % 2);
                assert_eq!(c.odd_parts() % 2, n as usize % 2);
            }
        }
    }

    #[test]
    fn stanley_class_examples() {
        assert_eq!(stanley_class(&part("1")), StanleyClass::Zero);
        assert_eq!(stanley_class(&part("2")), StanleyClass::Two);
        assert_eq!(stanley_class(&part("2,1")), StanleyClass::Zero);
        assert_eq!(stanley_class(&Partition::empty()), StanleyClass::Zero);
    }

    #[test]
    fn classify_small() {
        assert_eq!(classify_counts(3, false).unwrap(), ClassCounts { p0: 1, p2: 2 });
        assert_eq!(classify_counts(0, false).unwrap(), ClassCounts { p0: 1, p2: 0 });
        assert!(matches!(classify_counts(81, false), Err(Error::EnumerationLimit { .. })));
    }

    #[test]
    fn classify_range_policies_agree() {
        let a = classify_range(25, Execution::Sequential).unwrap();
        let b = classify_range(25, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[3], ClassCounts { p0: 1, p2: 2 });
    }

    #[test]
    fn p_table_prefix_and_enumeration() {
        let p = p_table(60);
        let small: Vec<i64> = p[..5].iter().map(|x| i64::try_from(x).unwrap()).collect();
        assert_eq!(small, [1, 1, 2, 3, 5]);
        for n in [0u32, 1, 7, 20, 35] {
            assert_eq!(p[n as usize], BigInt::from(all(n).len()));
        }
        assert_eq!(p[60], BigInt::from(count(60, &EnumerationConstraint::none())));
        assert_eq!(p[60], BigInt::from(966_467));
    }

    #[test]
    fn ramanujan_mod5() {
        let p = p_table(500);
        for n in (4..=500).step_by(5) {
            assert!((&p[n] % 5u32).is_zero(), "p({n}) not divisible by 5");
        }
    }

    #[test]
    fn gollnitz_gordon_small_counts() {
        assert_eq!(gg_count(0, 0).unwrap(), 1);
        assert_eq!(gg_count(0, 1).unwrap(), 1);
        assert_eq!(gg_count(1, 0).unwrap(), 1);
        assert_eq!(gg_count(1, 1).unwrap(), 0);
        let b: Vec<i64> = (0..4)
            .map(|k| gg_count(k, 0).unwrap() as i64 - gg_count(k, 1).unwrap() as i64)
            .collect();
        assert_eq!(b, [0, 1, 1, 0]);
        assert!(gg_count(3, 2).is_err());
    }

    #[test]
    fn admits_agrees_with_enumeration() {
        let c = EnumerationConstraint::gollnitz_gordon(0);
        let admitted = all(18).into_iter().filter(|p| c.admits(p)).count() as u64;
        assert_eq!(admitted, gg_count(18, 0).unwrap());
    }

    #[test]
    fn text_form() {
        let p = part("45,45,43,19,3");
        assert_eq!(p.to_string(), "45^2,43,19,3");
        assert_eq!(part("7^2,1^4"), Partition::new(vec![7, 7, 1, 1, 1, 1]).unwrap());
        assert_eq!(part("(1^2,17^1)").to_string(), "17,1^2");
        assert_eq!(part("()"), Partition::empty());
        assert!("3,0".parse::<Partition>().is_err());
        assert!("3,x".parse::<Partition>().is_err());
        assert!("3^y".parse::<Partition>().is_err());
    }

    #[test]
    fn statistics() {
        let p = part("85,53,45,45,43,19,3");
        assert_eq!(p.norm(), 293);
        assert_eq!(p.residue_count(3, 8), 3);
        assert_eq!(p.multiplicity(3), 1);
        assert_eq!(p.residue_count(5, 8), 4);
        assert_eq!(p.multiplicity(5), 0);
    }
}
