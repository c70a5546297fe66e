use stanley::injection::{injectivity_audit, ResidueClassSpec};
use stanley::partitions::classify_range;
use stanley::products::{stanley_product, verify_all_identities};
use stanley::{Execution, Length, TruncatedSeries};

#[test]
fn classification_agrees() {
    let seq = classify_range(40, Execution::Sequential).unwrap();
    let par = classify_range(40, Execution::Parallel).unwrap();
    assert_eq!(seq, par);
}

#[test]
fn identities_agree() {
    let seq = verify_all_identities(300, Execution::Sequential);
    let par = verify_all_identities(300, Execution::Parallel);
    assert_eq!(seq, par);
    assert!(seq.iter().all(|r| r.passed));
}

#[test]
fn audits_agree() {
    let spec = ResidueClassSpec::new(8, 3, Length::Finite(3)).unwrap();
    let seq = injectivity_audit(30, &spec, Execution::Sequential).unwrap();
    let par = injectivity_audit(30, &spec, Execution::Parallel).unwrap();
    assert_eq!(seq, par);
}

#[test]
fn products_agree() {
    let a = stanley_product(700);
    let b: TruncatedSeries = a.add(&TruncatedSeries::one(700));
    assert_eq!(a.mul_with(&b, Execution::Sequential), a.mul_with(&b, Execution::Parallel));
}
