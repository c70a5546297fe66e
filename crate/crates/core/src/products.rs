//! Named generating functions and the identity verifiers built on them.
//!
//! Every product is assembled factor by factor from Pochhammer symbols in the
//! form it is usually displayed, with no algebraic simplification beforehand,
//! so that the verifiers really test the identities.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::report::ScanReport;
use crate::series::{Length, Pochhammer, Sign, TruncatedSeries};

/// Accumulates a quotient of Pochhammer products truncated at a fixed order.
///
/// Each binomial factor is applied in place in O(N), so a product with `k`
/// binomials costs O(kN) big-integer additions.
#[derive(Debug, Clone)]
pub struct Product {
    series: TruncatedSeries,
}

impl Product {
    pub fn new(order: usize) -> Self {
        Product {
            series: TruncatedSeries::one(order),
        }
    }

    pub fn times(mut self, p: &Pochhammer) -> Self {
        p.mul_into(&mut self.series);
        self
    }

    pub fn over(mut self, p: &Pochhammer) -> Self {
        p.div_into(&mut self.series);
        self
    }

    pub fn times_all(self, ps: &[Pochhammer]) -> Self {
        ps.iter().fold(self, |acc, p| acc.times(p))
    }

    pub fn over_all(self, ps: &[Pochhammer]) -> Self {
        ps.iter().fold(self, |acc, p| acc.over(p))
    }

    pub fn times_pow(self, p: &Pochhammer, k: u32) -> Self {
        (0..k).fold(self, |acc, _| acc.times(p))
    }

    pub fn over_pow(self, p: &Pochhammer, k: u32) -> Self {
        (0..k).fold(self, |acc, _| acc.over(p))
    }

    pub fn finish(self) -> TruncatedSeries {
        self.series
    }
}

/// `(±q^{a1}, ±q^{a2}, ...; q^step)_∞` as a list of factors.
fn inf_list(items: &[(Sign, u32)], step: u32) -> Vec<Pochhammer> {
    items
        .iter()
        .map(|&(sign, start)| Pochhammer::infinite(sign, start, step))
        .collect()
}

/// `E(q^k) = (q^k; q^k)_∞`.
pub fn euler(k: u32) -> Pochhammer {
    Pochhammer::infinite(Sign::Pos, k, k)
}

const P: Sign = Sign::Pos;
const N: Sign = Sign::Neg;

fn check_index(i: u32) -> Result<()> {
    if i > 1 {
        return Err(invalid(format!("index must be 0 or 1, got {i}")));
    }
    Ok(())
}

/// `(-q; q^2)_∞ / (q^4, -q^2, -q^2; q^4)_∞`, whose coefficients are `p0(n) - p2(n)`.
pub fn stanley_product(order: usize) -> TruncatedSeries {
    Product::new(order)
        .times(&Pochhammer::infinite(N, 1, 2))
        .over_all(&inf_list(&[(P, 4), (N, 2), (N, 2)], 4))
        .finish()
}

/// `E(q^2)^2 E(q^16)^5 / (E(q) E(q^4)^5 E(q^32)^2)`, whose coefficients are `p0(n)`.
pub fn andrews_p0(order: usize) -> TruncatedSeries {
    Product::new(order)
        .times_pow(&euler(2), 2)
        .times_pow(&euler(16), 5)
        .over(&euler(1))
        .over_pow(&euler(4), 5)
        .over_pow(&euler(32), 2)
        .finish()
}

/// `1 / (q; q)_∞`.
pub fn partition_series(order: usize) -> TruncatedSeries {
    Product::new(order).over(&euler(1)).finish()
}

/// `1 / (E(q) (q^{1+2i}, q^2, q^4, q^6, q^{7-2i}; q^8)_∞)`; the coefficient of
/// `q^n` is `c_{2n+i} = |p0(2n+i) - p2(2n+i)|`.
pub fn f_series(i: u32, order: usize) -> Result<TruncatedSeries> {
    check_index(i)?;
    Ok(Product::new(order)
        .over(&euler(1))
        .over_all(&inf_list(&[(P, 1 + 2 * i), (P, 2), (P, 4), (P, 6), (P, 7 - 2 * i)], 8))
        .finish())
}

/// `1 / (q^{1+2i}, q^4, q^{7-2i}; q^8)_∞`.
pub fn gollnitz_gordon_product(i: u32, order: usize) -> Result<TruncatedSeries> {
    check_index(i)?;
    Ok(Product::new(order)
        .over_all(&inf_list(&[(P, 1 + 2 * i), (P, 4), (P, 7 - 2 * i)], 8))
        .finish())
}

fn check_residue(m: u32, r: u32) -> Result<()> {
    if m < 2 || r == 0 || r >= m {
        return Err(invalid(format!("need 0 < r < m, got m = {m}, r = {r}")));
    }
    Ok(())
}

/// `1 / (q^r, q^{m-r}; q^m)_L`: partitions into parts `≡ ±r (mod m)` with
/// largest part at most `max(Lm - r, Lm + r - m)`.
pub fn finite_class_series(m: u32, r: u32, len: Length, order: usize) -> Result<TruncatedSeries> {
    check_residue(m, r)?;
    Ok(Product::new(order)
        .over(&Pochhammer::new(P, r, m, len)?)
        .over(&Pochhammer::new(P, m - r, m, len)?)
        .finish())
}

/// `1/(q, q^{m-1}; q^m)_L - 1/(q^r, q^{m-r}; q^m)_L`.
pub fn difference_series(m: u32, r: u32, len: Length, order: usize) -> Result<TruncatedSeries> {
    let ones = finite_class_series(m, 1, len, order)?;
    let rs = finite_class_series(m, r, len, order)?;
    Ok(ones.sub(&rs))
}

fn min_quadratic_value(s: i64, t: i64) -> i64 {
    // integer minimum of s j^2 + t j sits next to -t / 2s
    let centre = (-t) as f64 / (2 * s) as f64;
    let lo = centre.floor() as i64;
    (lo - 1..=lo + 2).map(|j| s * j * j + t * j).min().unwrap()
}

/// `Σ_{j∈Z} sign^j q^{s j^2 + t j}` truncated at `order`.
pub fn jtp_sum(s: i64, t: i64, sign: Sign, order: usize) -> Result<TruncatedSeries> {
    if s < 1 {
        return Err(invalid(format!("quadratic coefficient must be positive, got {s}")));
    }
    if min_quadratic_value(s, t) < 0 {
        return Err(invalid(format!("s j^2 + t j takes negative values for s = {s}, t = {t}")));
    }
    let reach = 1 + ((order as f64 / s as f64).sqrt().ceil() as i64) + t.abs();
    let mut out = TruncatedSeries::zero(order);
    for j in -reach..=reach {
        let e = s * j * j + t * j;
        if e as usize <= order {
            let v = if sign == Sign::Neg && j.rem_euclid(2) == 1 {
                -BigInt::one()
            } else {
                BigInt::one()
            };
            let cur = out.coeff(e as usize) + v;
            out.set(e as usize, cur);
        }
    }
    Ok(out)
}

/// Product side of the triple product for the sum in [`jtp_sum`]:
/// `(q^{2s}, -sign q^{s+t}, -sign q^{s-t}; q^{2s})_∞`. Requires `s > |t|`.
pub fn jtp_product(s: i64, t: i64, sign: Sign, order: usize) -> Result<TruncatedSeries> {
    if s < 1 || t.abs() >= s {
        return Err(invalid(format!("triple product needs s > |t|, got s = {s}, t = {t}")));
    }
    let step = (2 * s) as u32;
    let inner = sign.flip();
    Ok(Product::new(order)
        .times_all(&inf_list(
            &[(P, step), (inner, (s + t) as u32), (inner, (s - t) as u32)],
            step,
        ))
        .finish())
}

/// Coefficientwise comparison; lists the first mismatches (capped).
pub fn compare(check: &str, lhs: &TruncatedSeries, rhs: &TruncatedSeries) -> ScanReport {
    let n = lhs.order().min(rhs.order());
    let mut report = ScanReport::new(check, 0, n as u64);
    for k in 0..=n {
        if lhs.coeff(k) != rhs.coeff(k) {
            report.violation(k as u64, format!("lhs {} != rhs {}", lhs.coeff(k), rhs.coeff(k)));
        }
    }
    report
}

/// `stanley = F0(-q^2) + q F1(-q^2)`, checked on the given Stanley expansion.
///
/// Mismatch indices are exponents of the Stanley series.
pub fn verify_dissection_of(stanley: &TruncatedSeries) -> Result<ScanReport> {
    let order = stanley.order();
    let mut report = ScanReport::new("dissection", 0, order as u64);
    for i in 0..=1usize {
        if i > order {
            continue;
        }
        let part = stanley.dissect(2, i)?;
        let expected = f_series(i as u32, part.order())?.substitute_signed();
        for k in 0..=part.order() {
            if part.coeff(k) != expected.coeff(k) {
                report.violation(
                    (2 * k + i) as u64,
                    format!("stanley {} != signed F{i} {}", part.coeff(k), expected.coeff(k)),
                );
            }
        }
    }
    // violations arrive grouped by parity; list them in exponent order
    report.violations.sort_by_key(|v| v.index);
    Ok(report)
}

pub fn verify_dissection(order: usize) -> ScanReport {
    verify_dissection_of(&stanley_product(order)).expect("dissection of a well-formed series")
}

pub fn verify_jtp(s: i64, t: i64, sign: Sign, order: usize) -> Result<ScanReport> {
    let sum = jtp_sum(s, t, sign, order)?;
    let prod = jtp_product(s, t, sign, order)?;
    Ok(compare(&format!("triple-product(s={s},t={t},sign={})", sign.value()), &sum, &prod))
}

/// `F0 - F1 = (G0 - G1) / (E(q) (q^2; q^4)_∞)`.
pub fn verify_gg_factorization(order: usize) -> ScanReport {
    let lhs = f_series(0, order).unwrap().sub(&f_series(1, order).unwrap());
    let g = gollnitz_gordon_product(0, order)
        .unwrap()
        .sub(&gollnitz_gordon_product(1, order).unwrap());
    let d = Product::new(order)
        .over(&euler(1))
        .over(&Pochhammer::infinite(P, 2, 4))
        .finish();
    compare("gollnitz-gordon-factorization", &lhs, &d.mul(&g))
}

/// The chain of rewritings leading from the dissected form back to the
/// Stanley product, plus the small product identities it relies on. Each
/// entry compares two independently built expansions.
pub fn derivation_identities(order: usize) -> Vec<ScanReport> {
    let mut out = Vec::new();
    let prod = |items: &[(Sign, u32)], step: u32| Product::new(order).times_all(&inf_list(items, step)).finish();

    // E(q) = (q, q^2; q^2)_∞ and E(-q) = (-q, q^2; q^2)_∞
    let e = Product::new(order).times(&euler(1)).finish();
    out.push(compare("euler-split-by-parity", &e, &prod(&[(P, 1), (P, 2)], 2)));
    out.push(compare(
        "euler-at-minus-q",
        &e.substitute_signed(),
        &prod(&[(N, 1), (P, 2)], 2),
    ));
    // (q^4; q^4)_∞ = (q^4, q^8, q^12, q^16; q^16)_∞
    out.push(compare(
        "q4-split-mod-16",
        &Product::new(order).times(&euler(4)).finish(),
        &prod(&[(P, 4), (P, 8), (P, 12), (P, 16)], 16),
    ));
    // (-q^2, -q^6, -q^10, -q^14; q^16)_∞ = (-q^2; q^4)_∞
    out.push(compare(
        "minus-q2-split-mod-16",
        &prod(&[(N, 2), (N, 6), (N, 10), (N, 14)], 16),
        &prod(&[(N, 2)], 4),
    ));
    // (-q, -q^3; q^4)_∞ = (-q; q^2)_∞
    out.push(compare(
        "minus-q-split-mod-4",
        &prod(&[(N, 1), (N, 3)], 4),
        &prod(&[(N, 1)], 2),
    ));

    let stanley = stanley_product(order);
    // one step deeper than needed so odd orders are fully determined after q -> q^2
    let half = order / 2 + 1;
    let f0 = f_series(0, half).unwrap();
    let f1 = f_series(1, half).unwrap();
    let dissected = f0
        .substitute_signed()
        .dilate(2)
        .unwrap()
        .add(&f1.substitute_signed().dilate(2).unwrap().shift(1))
        .truncate(order);
    out.push(compare("stanley-vs-dissected-form", &stanley, &dissected));

    let over = |base: TruncatedSeries, items: &[(Sign, u32)], step: u32| {
        let mut p = Product { series: base };
        p = p.over_all(&inf_list(items, step));
        p.finish()
    };
    let one = TruncatedSeries::one(order);

    // first rewriting: 1/(-q^2, q^4; q^4) {1/(-q^2,q^4,q^8,q^12,-q^14;q^16) + q/(-q^6,q^4,q^8,q^12,-q^10;q^16)}
    let brace = over(one.clone(), &[(N, 2), (P, 4), (P, 8), (P, 12), (N, 14)], 16)
        .add(&over(one.shift(1), &[(N, 6), (P, 4), (P, 8), (P, 12), (N, 10)], 16));
    let line1 = over(brace, &[(N, 2), (P, 4)], 4);
    out.push(compare("rewrite-mod-16", &line1, &dissected));

    // second rewriting: E(q^16)/(-q^2, q^4, q^4; q^4) {1/(-q^2,-q^14;q^16) + q/(-q^6,-q^10;q^16)}
    let brace = over(one.clone(), &[(N, 2), (N, 14)], 16).add(&over(one.shift(1), &[(N, 6), (N, 10)], 16));
    let line2 = over(
        Product { series: brace }.times(&euler(16)).finish(),
        &[(N, 2), (P, 4), (P, 4)],
        4,
    );
    out.push(compare("rewrite-with-e16", &line2, &dissected));

    // denominator shared by the remaining forms: (-q^2, q^4; q^4)_∞^2
    let denom = |num: TruncatedSeries| {
        Product { series: num }
            .over_pow(&Pochhammer::infinite(N, 2, 4), 2)
            .over_pow(&Pochhammer::infinite(P, 4, 4), 2)
            .finish()
    };
    let numerator_products = prod(&[(P, 16), (N, 6), (N, 10)], 16).add(&prod(&[(P, 16), (N, 2), (N, 14)], 16).shift(1));
    out.push(compare("numerator-as-products", &denom(numerator_products.clone()), &dissected));

    let numerator_sums = jtp_sum(8, 2, P, order)
        .unwrap()
        .add(&jtp_sum(8, -6, P, order).unwrap().shift(1));
    out.push(compare("numerator-products-vs-theta-sums", &numerator_products, &numerator_sums));
    let merged = jtp_sum(2, 1, P, order).unwrap();
    out.push(compare("theta-sums-merge", &numerator_sums, &merged));
    let merged_product = prod(&[(P, 4), (N, 1), (N, 3)], 4);
    out.push(compare("merged-sum-vs-product", &merged, &merged_product));
    out.push(compare("merged-product-over-denominator", &denom(merged_product), &stanley));

    // the even and odd halves of the Stanley product before and after q -> -q
    for i in 0..=1u32 {
        if (i as usize) > order {
            continue;
        }
        let part = stanley.dissect(2, i as usize).unwrap();
        let n = part.order();
        // 1/E(-q) = 1/(-q, q^2; q^2)_∞
        let at_minus_q = Product::new(n)
            .over_all(&inf_list(&[(N, 1), (P, 2)], 2))
            .over_all(&inf_list(&[(N, 1 + 2 * i), (P, 2), (P, 4), (P, 6), (N, 7 - 2 * i)], 8))
            .finish();
        out.push(compare(&format!("half-{i}-at-minus-q"), &part, &at_minus_q));
        out.push(compare(
            &format!("half-{i}-signed-is-f{i}"),
            &at_minus_q.substitute_signed(),
            &f_series(i, n).unwrap(),
        ));
        // (1 - q) F_i = 1/((q^2; q)_∞ (q^{1+2i}, q^2, q^4, q^6, q^{7-2i}; q^8)_∞)
        let lhs = f_series(i, n).unwrap().sub(&f_series(i, n).unwrap().shift(1));
        let rhs = Product::new(n)
            .over(&Pochhammer::infinite(P, 2, 1))
            .over_all(&inf_list(&[(P, 1 + 2 * i), (P, 2), (P, 4), (P, 6), (P, 7 - 2 * i)], 8))
            .finish();
        out.push(compare(&format!("first-difference-f{i}"), &lhs, &rhs));
    }
    out.push(verify_gg_factorization(order));
    out
}

/// Stable catalog identifiers accepted by the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CatalogId {
    Stanley,
    AndrewsP0,
    F(u32),
    G(u32),
    Class { m: u32, r: u32, len: Length },
    Diff { m: u32, r: u32, len: Length },
    Jtp { s: i64, t: i64 },
}

pub const CATALOG: &[&str] = &[
    "stanley",
    "andrews_p0",
    "F0",
    "F1",
    "G0",
    "G1",
    "class(m,r,L)",
    "diff(m,r,L)",
    "jtp(s,t)",
];

impl CatalogId {
    pub fn build(&self, order: usize) -> Result<NamedSeries> {
        let series = match *self {
            CatalogId::Stanley => stanley_product(order),
            CatalogId::AndrewsP0 => andrews_p0(order),
            CatalogId::F(i) => f_series(i, order)?,
            CatalogId::G(i) => gollnitz_gordon_product(i, order)?,
            CatalogId::Class { m, r, len } => finite_class_series(m, r, len, order)?,
            CatalogId::Diff { m, r, len } => difference_series(m, r, len, order)?,
            CatalogId::Jtp { s, t } => jtp_sum(s, t, Sign::Pos, order)?,
        };
        Ok(NamedSeries { id: *self, series })
    }
}

impl fmt::Display for CatalogId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogId::Stanley => write!(f, "stanley"),
            CatalogId::AndrewsP0 => write!(f, "andrews_p0"),
            CatalogId::F(i) => write!(f, "F{i}"),
            CatalogId::G(i) => write!(f, "G{i}"),
            CatalogId::Class { m, r, len } => write!(f, "class({m},{r},{len})"),
            CatalogId::Diff { m, r, len } => write!(f, "diff({m},{r},{len})"),
            CatalogId::Jtp { s, t } => write!(f, "jtp({s},{t})"),
        }
    }
}

impl FromStr for CatalogId {
    type Err = Error;

    fn from_str(s: &str) -> Result<CatalogId> {
        let unknown = || Error::Parse {
            what: "catalog name",
            detail: format!("{s:?} is not one of {}", CATALOG.join(", ")),
        };
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        match compact.as_str() {
            "stanley" => return Ok(CatalogId::Stanley),
            "andrews_p0" => return Ok(CatalogId::AndrewsP0),
            "F0" => return Ok(CatalogId::F(0)),
            "F1" => return Ok(CatalogId::F(1)),
            "G0" => return Ok(CatalogId::G(0)),
            "G1" => return Ok(CatalogId::G(1)),
            _ => {}
        }
        let (head, rest) = compact.split_once('(').ok_or_else(unknown)?;
        let args: Vec<&str> = rest.strip_suffix(')').ok_or_else(unknown)?.split(',').collect();
        let int = |a: &str| a.parse::<u32>().map_err(|_| unknown());
        match (head, args.as_slice()) {
            ("class", [m, r, l]) => Ok(CatalogId::Class { m: int(m)?, r: int(r)?, len: l.parse()? }),
            ("diff", [m, r, l]) => Ok(CatalogId::Diff { m: int(m)?, r: int(r)?, len: l.parse()? }),
            ("jtp", [a, b]) => Ok(CatalogId::Jtp {
                s: a.parse().map_err(|_| unknown())?,
                t: b.parse().map_err(|_| unknown())?,
            }),
            _ => Err(unknown()),
        }
    }
}

impl Serialize for CatalogId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NamedSeries {
    pub id: CatalogId,
    pub series: TruncatedSeries,
}

/// Runs every identity check at `order`, one task per identity.
pub fn verify_all_identities(order: usize, exec: Execution) -> Vec<ScanReport> {
    let jobs: Vec<u8> = (0..3).collect();
    let mut groups = exec.map_slice(&jobs, |&job| match job {
        0 => vec![verify_dissection(order)],
        1 => [(1, 0), (2, 1), (8, 2), (8, -6)]
            .iter()
            .map(|&(s, t)| verify_jtp(s, t, Sign::Pos, order).unwrap())
            .collect(),
        _ => derivation_identities(order),
    });
    groups.drain(..).flatten().collect()
}
