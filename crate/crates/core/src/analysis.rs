//! Bounds, elementary inequalities, asymptotics and conjecture scans for the
//! sequence `c_n = |p0(n) - p2(n)|`.
//!
//! Exact statements (the power-sum inequality, monotonicity, signs,
//! congruences) are checked in big-integer arithmetic. Bounds involving
//! `exp` are compared in log space through [`LogValue`].

use std::f64::consts::{LN_2, PI};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use crate::report::ScanReport;

use crate::error::{invalid, Result};
use crate::partitions::{self, gg_count};
use crate::products::{andrews_p0, f_series, gollnitz_gordon_product};
use crate::report::Table;
use crate::series::TruncatedSeries;

/// Slack below which a log-space bound comparison counts as a violation.
pub const LOG_GUARD: f64 = 1e-6;

/// Relative tolerance for the floating grid checks.
pub const GRID_TOLERANCE: f64 = 1e-12;

/// Natural logarithm of a positive big integer.
///
/// The top 64 bits are converted to `f64` and the remaining bit count is added
/// as a multiple of `ln 2`, so the absolute error stays below
/// [`LogValue::ERROR_BOUND`] for any integer that fits in memory.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct LogValue(f64);

impl LogValue {
    pub const ERROR_BOUND: f64 = 1e-9;

    pub fn of(n: &BigInt) -> Option<LogValue> {
        if !n.is_positive() {
            return None;
        }
        let bits = n.bits();
        if bits <= 64 {
            return Some(LogValue((n.to_u64()? as f64).ln()));
        }
        let shift = bits - 64;
        let top = (n >> shift).to_u64()?;
        Some(LogValue((top as f64).ln() + shift as f64 * LN_2))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `a / b` as a float, exact to double precision for positive big integers.
pub fn ratio_f64(a: &BigInt, b: &BigInt) -> f64 {
    let shift = (b.bits() as i64 - a.bits() as i64 + 64).max(0) as u64;
    let q = (a << shift) / b;
    match q.to_f64() {
        Some(v) if v.is_finite() && shift <= 1000 => v * 2f64.powi(-(shift as i32)),
        _ => LogValue::of(&q).map_or(0.0, |lq| (lq.value() - shift as f64 * LN_2).exp()),
    }
}

/// `(π/2) √(13n/3)`, the exponent shared by every bound on `c_{2n+i}`.
pub fn bound_exponent(n: f64) -> f64 {
    PI / 2.0 * (13.0 * n / 3.0).sqrt()
}

/// `log` of `(π/2) √(13/12) / √n · exp((π/2) √(13n/3))`.
pub fn sharp_log_bound(n: f64) -> f64 {
    (PI / 2.0 * (13.0f64 / 12.0).sqrt() / n.sqrt()).ln() + bound_exponent(n)
}

/// Asymptotic prefactor `√(13/6) / (32 sin((2i+1)π/8))` for `c_{2n+i}`.
pub fn meinardus_constant(i: u32) -> f64 {
    (13.0f64 / 6.0).sqrt() / (32.0 * ((2 * i + 1) as f64 * PI / 8.0).sin())
}

/// `log` of `C_i / n · exp((π/2) √(13n/3))`.
pub fn meinardus_log(n: f64, i: u32) -> f64 {
    meinardus_constant(i).ln() - n.ln() + bound_exponent(n)
}

fn c_tables(n_max: usize) -> [TruncatedSeries; 2] {
    [0, 1].map(|i| f_series(i, n_max).expect("index 0 or 1"))
}

fn log_c(c: &BigInt, n: usize, i: usize) -> f64 {
    LogValue::of(c)
        .unwrap_or_else(|| panic!("c_{} must be positive", 2 * n + i))
        .value()
}

/// `log c_{2n+i} < (π/2) √(13n/3)` for `1 <= n <= N`; with `sharp` the
/// `1/√n`-refined bound is checked as well.
///
/// At `n = 0` both sides of the first bound vanish, so it starts at `n = 1`.
/// The margin is the smallest log-space slack seen.
pub fn upper_bound_check(n_max: usize, sharp: bool) -> Result<ScanReport> {
    if n_max < 1 {
        return Err(invalid("N must be at least 1"));
    }
    let name = if sharp { "upper-bound+sharp" } else { "upper-bound" };
    let mut report = ScanReport::new(name, 1, n_max as u64);
    let tables = c_tables(n_max);
    for (i, f) in tables.iter().enumerate() {
        for n in 1..=n_max {
            let lc = log_c(f.coeff(n), n, i);
            let mut bounds = vec![("basic", bound_exponent(n as f64))];
            if sharp {
                bounds.push(("sharp", sharp_log_bound(n as f64)));
            }
            for (label, b) in bounds {
                let slack = b - lc;
                report.margin(slack);
                if slack <= LOG_GUARD {
                    report.violation(
                        (2 * n + i) as u64,
                        format!("{label}: log c = {lc:.9} vs bound {b:.9}"),
                    );
                }
            }
        }
    }
    Ok(report)
}

fn reciprocal_pair(x: f64) -> (f64, f64) {
    (1.0 / x.exp_m1(), 1.0 / x)
}

fn mirrored_pair(x: f64, r: f64) -> (f64, f64) {
    (((r * x).exp() + ((8.0 - r) * x).exp()) / (8.0 * x).exp_m1(), 1.0 / (4.0 * x))
}

fn five_term_sum(x: f64) -> (f64, f64) {
    let num: f64 = [1.0, 7.0, 4.0, 2.0, 6.0].iter().map(|k| (k * x).exp()).sum();
    (num / (8.0 * x).exp_m1(), 5.0 / (8.0 * x))
}

fn strict_float(report: &mut ScanReport, label: &str, k: u64, x: f64, (lhs, rhs): (f64, f64)) {
    let slack = (rhs - lhs) / rhs.abs();
    report.margin(slack);
    if !(lhs < rhs) {
        if slack.abs() <= GRID_TOLERANCE {
            report.finding(k, format!("{label} at x = {x}: tie within rounding ({lhs:e} vs {rhs:e})"));
        } else {
            report.violation(k, format!("{label} at x = {x}: {lhs:e} >= {rhs:e}"));
        }
    }
}

/// The three exponential inequalities behind the basic bound, on the grid
/// `x = kX/steps`, `k = 1..=steps`. The margin is the smallest relative slack.
pub fn elementary_inequality_check(x_max: f64, steps: usize) -> Result<ScanReport> {
    if !(x_max > 0.0) || steps < 10 {
        return Err(invalid("need X > 0 and at least 10 steps"));
    }
    let mut report = ScanReport::new("exp-inequalities", 1, steps as u64);
    for k in 1..=steps {
        let x = k as f64 * x_max / steps as f64;
        let k = k as u64;
        strict_float(&mut report, "1/(e^x-1) < 1/x", k, x, reciprocal_pair(x));
        for r in [2.0, 3.0, 4.0] {
            strict_float(&mut report, &format!("r={r} pair < 1/4x"), k, x, mirrored_pair(x, r));
        }
        strict_float(&mut report, "five-term sum < 5/8x", k, x, five_term_sum(x));
    }
    Ok(report)
}

/// `8(2n+1)(9^n + 4^n) < 20·16^n` for `1 <= n <= N`, exactly. The margin is
/// `log(rhs/lhs)`.
pub fn power_sum_check(n_max: u32) -> Result<ScanReport> {
    if n_max < 1 {
        return Err(invalid("N must be at least 1"));
    }
    let mut report = ScanReport::new("power-sum-inequality", 1, n_max as u64);
    let (mut p9, mut p4, mut p16) = (BigInt::one(), BigInt::one(), BigInt::one());
    for n in 1..=n_max {
        p9 *= 9;
        p4 *= 4;
        p16 *= 16;
        let lhs = BigInt::from(8 * (2 * n as u64 + 1)) * (&p9 + &p4);
        let rhs = BigInt::from(20) * &p16;
        if lhs >= rhs {
            report.violation(n as u64, format!("{lhs} >= {rhs}"));
        } else {
            let slack = LogValue::of(&rhs).unwrap().value() - LogValue::of(&lhs).unwrap().value();
            report.margin(slack);
        }
    }
    Ok(report)
}

/// `c_{2(n+1)+i} >= c_{2n+i}` for `0 <= n < N`, and `c_{2n} > c_{2n+1}` for
/// `1 <= n <= N`. The tie `c_0 = c_1` is recorded as a finding.
pub fn monotonicity_check(n_max: usize) -> Result<ScanReport> {
    if n_max < 2 {
        return Err(invalid("N must be at least 2"));
    }
    let mut report = ScanReport::new("monotonicity", 0, n_max as u64);
    let tables = c_tables(n_max);
    for (i, f) in tables.iter().enumerate() {
        for n in 0..n_max {
            if f.coeff(n + 1) < f.coeff(n) {
                report.violation(
                    (2 * n + i) as u64,
                    format!("c_{} = {} < c_{} = {}", 2 * n + 2 + i, f.coeff(n + 1), 2 * n + i, f.coeff(n)),
                );
            }
        }
    }
    let [even, odd] = &tables;
    if even.coeff(0) == odd.coeff(0) {
        report.finding(0, "c_0 = c_1 = 1 (strict comparison starts at n = 1)");
    }
    for n in 1..=n_max {
        if even.coeff(n) <= odd.coeff(n) {
            report.violation(
                (2 * n) as u64,
                format!("c_{} = {} <= c_{} = {}", 2 * n, even.coeff(n), 2 * n + 1, odd.coeff(n)),
            );
        }
    }
    Ok(report)
}

fn parity_sign(n: usize) -> i32 {
    if (n / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `(-1)^⌊n/2⌋ (2 p0(n) - p(n)) > 0` for `0 <= n <= N`, together with the exact
/// identity `2 p0(n) - p(n) = (-1)^⌊n/2⌋ c_n`.
pub fn sign_pattern_check(n_max: usize) -> Result<ScanReport> {
    if n_max < 4 {
        return Err(invalid("N must be at least 4"));
    }
    let mut report = ScanReport::new("sign-pattern", 0, n_max as u64);
    let p0 = andrews_p0(n_max);
    let p = partitions::p_table(n_max);
    let tables = c_tables(n_max / 2 + 1);
    for n in 0..=n_max {
        let diff: BigInt = p0.coeff(n) * 2u32 - &p[n];
        let signed: BigInt = &diff * parity_sign(n);
        if !signed.is_positive() {
            report.violation(n as u64, format!("(-1)^{} (2 p0 - p) = {signed}", n / 2));
        }
        let c = tables[n % 2].coeff(n / 2);
        if &signed != c {
            report.violation(n as u64, format!("2 p0 - p = {diff} but c_{n} = {c}"));
        }
        let above_half = matches!(n % 4, 0 | 1);
        if (diff.is_positive()) != above_half {
            report.violation(n as u64, format!("p0 vs p/2 has the wrong side for n mod 4 = {}", n % 4));
        }
    }
    Ok(report)
}

/// `p0(5k+4) ≡ 0` and `p(5k+4) ≡ 0 (mod 5)` for `5k+4 <= N`.
pub fn congruence_check(n_max: usize) -> ScanReport {
    let mut report = ScanReport::new("mod-5-congruences", 0, n_max as u64);
    let p0 = andrews_p0(n_max);
    let p = partitions::p_table(n_max);
    let five = BigInt::from(5);
    for n in (4..=n_max).step_by(5) {
        if !(p0.coeff(n) % &five).is_zero() {
            report.violation(n as u64, format!("p0({n}) = {} is not divisible by 5", p0.coeff(n)));
        }
        if !(&p[n] % &five).is_zero() {
            report.violation(n as u64, format!("p({n}) = {} is not divisible by 5", p[n]));
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub n: usize,
    pub ratio: f64,
    pub deviation: f64,
}

/// `c_{2n} / c_{2n+1}` and its distance from `1 + √2`, for `1 <= n <= N`.
pub fn ratio_convergence(n_max: usize) -> Result<Vec<RatioRow>> {
    if n_max < 10 {
        return Err(invalid("N must be at least 10"));
    }
    let target = 1.0 + 2f64.sqrt();
    let [even, odd] = c_tables(n_max);
    Ok((1..=n_max)
        .map(|n| {
            let ratio = ratio_f64(even.coeff(n), odd.coeff(n));
            RatioRow { n, ratio, deviation: (ratio - target).abs() }
        })
        .collect())
}

/// Asserts the deviation at `N` is below that at `N/10`, and below `0.1` once
/// `N >= 1000`.
pub fn ratio_convergence_report(n_max: usize) -> Result<(ScanReport, Vec<RatioRow>)> {
    let rows = ratio_convergence(n_max)?;
    let mut report = ScanReport::new("ratio-limit", 1, n_max as u64);
    let at = |n: usize| rows[n - 1].deviation;
    let (late, early) = (at(n_max), at(n_max / 10));
    report.margin(early - late);
    if late >= early {
        report.violation(n_max as u64, format!("deviation {late:e} not below {early:e} at n = {}", n_max / 10));
    }
    if n_max >= 1000 && late >= 0.1 {
        report.violation(n_max as u64, format!("deviation {late:e} is not below 0.1"));
    }
    Ok((report, rows))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeinardusRow {
    pub n: usize,
    pub i: u32,
    pub ratio: f64,
}

/// `c_{2n+i}` divided by its Meinardus asymptotic, for `1 <= n <= N`.
pub fn meinardus_compare(n_max: usize) -> Result<Vec<MeinardusRow>> {
    if n_max < 10 {
        return Err(invalid("N must be at least 10"));
    }
    let tables = c_tables(n_max);
    let mut rows = Vec::with_capacity(2 * n_max);
    for n in 1..=n_max {
        for (i, f) in tables.iter().enumerate() {
            let lc = log_c(f.coeff(n), n, i);
            let ratio = (lc - meinardus_log(n as f64, i as u32)).exp();
            rows.push(MeinardusRow { n, i: i as u32, ratio });
        }
    }
    Ok(rows)
}

/// For each parity, the ratio at `N` must be closer to 1 than at `N/10`.
pub fn meinardus_report(n_max: usize) -> Result<(ScanReport, Vec<MeinardusRow>)> {
    let rows = meinardus_compare(n_max)?;
    let mut report = ScanReport::new("meinardus-trend", 1, n_max as u64);
    let at = |n: usize, i: u32| rows[2 * (n - 1) + i as usize].ratio;
    for i in 0..2 {
        let late = (at(n_max, i) - 1.0).abs();
        let early = (at(n_max / 10, i) - 1.0).abs();
        report.margin(early - late);
        if late >= early {
            report.violation(
                (2 * n_max) as u64 + i as u64,
                format!("i = {i}: |ratio - 1| = {late:e} at N, {early:e} at N/10"),
            );
        }
    }
    Ok((report, rows))
}

/// Scans the two closing conjectures
/// `c_{2n} < C_0/n · e^{(π/2)√(13n/3)}` (`n >= 1`) and
/// `c_{2n+1} > √(13/6)/(32 cos(π/8))/n · e^{(π/2)√(13n/3)}` (`n >= 2`).
///
/// Counterexamples are findings; the report only fails on internal errors.
/// The margin is the smallest log-space slack across both inequalities.
pub fn conjecture_scan(n_max: usize) -> Result<ScanReport> {
    if n_max < 2 {
        return Err(invalid("N must be at least 2"));
    }
    let mut report = ScanReport::new("conjectures", 1, n_max as u64);
    let [even, odd] = c_tables(n_max);
    let lower = ((13.0f64 / 6.0).sqrt() / (32.0 * (PI / 8.0).cos())).ln();
    for n in 1..=n_max {
        let nf = n as f64;
        let upper_slack = meinardus_log(nf, 0) - log_c(even.coeff(n), n, 0);
        report.margin(upper_slack);
        if upper_slack <= 0.0 {
            report.finding(2 * n as u64, format!("c_{} exceeds the conjectured upper bound by {:e} (log)", 2 * n, -upper_slack));
        }
        if n >= 2 {
            let lower_slack = log_c(odd.coeff(n), n, 1) - (lower - nf.ln() + bound_exponent(nf));
            report.margin(lower_slack);
            if lower_slack <= 0.0 {
                report.finding(
                    2 * n as u64 + 1,
                    format!("c_{} falls below the conjectured lower bound by {:e} (log)", 2 * n + 1, -lower_slack),
                );
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfRow {
    pub n: usize,
    pub ratio: f64,
    pub deviation: f64,
}

/// `p0(n)/p(n)` for `1 <= n <= N`, checking `|p0/p - 1/2| = c_n / (2 p(n))`
/// exactly and that the largest deviation on `[N/2, N]` is below the largest on
/// `[1, N/2)`.
pub fn half_ratio_check(n_max: usize) -> Result<(ScanReport, Vec<HalfRow>)> {
    if n_max < 20 {
        return Err(invalid("N must be at least 20"));
    }
    let mut report = ScanReport::new("half-limit", 1, n_max as u64);
    let p0 = andrews_p0(n_max);
    let p = partitions::p_table(n_max);
    let tables = c_tables(n_max / 2 + 1);
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let c = tables[n % 2].coeff(n / 2);
        let twice: BigInt = p0.coeff(n) * 2u32 - &p[n];
        if twice.abs() != *c {
            report.violation(n as u64, format!("|2 p0 - p| = {} but c_{n} = {c}", twice.abs()));
        }
        let ratio = ratio_f64(p0.coeff(n), &p[n]);
        let deviation = ratio_f64(c, &(&p[n] * 2));
        rows.push(HalfRow { n, ratio, deviation });
    }
    let split = n_max / 2;
    let max_on = |lo: usize, hi: usize| {
        rows[lo - 1..hi].iter().map(|r| r.deviation).fold(0.0, f64::max)
    };
    let (early, late) = (max_on(1, split - 1), max_on(split, n_max));
    report.margin(early - late);
    if late >= early {
        report.violation(n_max as u64, format!("max deviation {late:e} on the upper half, {early:e} below"));
    }
    Ok((report, rows))
}

/// `n p(n) / exp(π √(2n/3))` at every `step`-th `n`, next to `1/(4√3)`.
pub fn hardy_ramanujan_table(n_max: usize, step: usize) -> Table {
    let step = step.max(1);
    let p = partitions::p_table(n_max);
    let target = 1.0 / (4.0 * 3f64.sqrt());
    let mut t = Table::new(&["n", "scaled_p", "limit"]);
    for n in (step..=n_max).step_by(step) {
        let lp = LogValue::of(&p[n]).expect("p(n) > 0").value();
        let v = (lp + (n as f64).ln() - PI * (2.0 * n as f64 / 3.0).sqrt()).exp();
        t.push(vec![n.to_string(), format!("{v:.9}"), format!("{target:.9}")]);
    }
    t
}

/// Coefficients `b_k` of `G_0 - G_1`: `b_0 = b_3 = 0`, `b_1 = b_2 = 1`,
/// `b_k > 0` for `4 <= k <= N`.
pub fn gg_difference_check(n_max: usize) -> Result<ScanReport> {
    if n_max < 4 {
        return Err(invalid("N must be at least 4"));
    }
    let b = gollnitz_gordon_product(0, n_max)?.sub(&gollnitz_gordon_product(1, n_max)?);
    let mut report = ScanReport::new("gg-difference", 0, n_max as u64);
    for (k, want) in [(0usize, 0i64), (1, 1), (2, 1), (3, 0)] {
        if b.coeff(k) != &BigInt::from(want) {
            report.violation(k as u64, format!("b_{k} = {}, expected {want}", b.coeff(k)));
        }
    }
    for k in 4..=n_max {
        if !b.coeff(k).is_positive() {
            report.violation(k as u64, format!("b_{k} = {} is not positive", b.coeff(k)));
        }
    }
    Ok(report)
}

/// Product coefficients of `G_i` against the gap-condition enumerator.
pub fn gg_enumerator_check(n_max: u32) -> Result<ScanReport> {
    let mut report = ScanReport::new("gg-enumerator", 0, n_max as u64);
    for i in 0..2 {
        let g = gollnitz_gordon_product(i, n_max as usize)?;
        for n in 0..=n_max {
            let count = gg_count(n, i)?;
            if g.coeff(n as usize) != &BigInt::from(count) {
                report.violation(n as u64, format!("G_{i}: product {} vs enumerated {count}", g.coeff(n as usize)));
            }
        }
    }
    Ok(report)
}
