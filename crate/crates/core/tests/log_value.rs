use num_bigint::{BigInt, Sign};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use stanley::analysis::LogValue;

/// Logarithm from the leading 17 decimal digits and the decimal length.
fn decimal_log(n: &BigInt) -> f64 {
    let digits = n.to_string();
    let head = &digits[..digits.len().min(17)];
    let mantissa: f64 = head.parse().unwrap();
    mantissa.ln() + (digits.len() - head.len()) as f64 * std::f64::consts::LN_10
}

#[test]
fn million_random_integers_within_bound() {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst = 0f64;
    for _ in 0..1_000_000 {
        let mut bytes = vec![0u8; rng.gen_range(1..=128)];
        rng.fill(&mut bytes[..]);
        let n = BigInt::from_bytes_le(Sign::Plus, &bytes) + 1u32;
        let err = (LogValue::of(&n).unwrap().value() - decimal_log(&n)).abs();
        worst = worst.max(err);
    }
    assert!(worst <= LogValue::ERROR_BOUND, "worst error {worst:e}");
}

#[test]
fn exact_powers() {
    for base in [2u32, 3, 10, 97] {
        for e in [1u32, 5, 40, 300] {
            let n = num_traits::pow(BigInt::from(base), e as usize);
            let want = e as f64 * (base as f64).ln();
            let got = LogValue::of(&n).unwrap().value();
            assert!((got - want).abs() <= LogValue::ERROR_BOUND.max(want * 1e-15), "{base}^{e}");
        }
    }
}
