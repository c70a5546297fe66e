//! End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
//! the process exits nonzero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use stanley::analysis::{
    congruence_check, conjecture_scan, elementary_inequality_check, gg_difference_check, gg_enumerator_check,
    power_sum_check, meinardus_report, monotonicity_check, ratio_convergence_report, sign_pattern_check,
    upper_bound_check,
};
use stanley::injection::{full_map, injectivity_audit, difference_sign_scan, MapCase, ResidueClassSpec};
use stanley::partitions::{self, classify_range};
use stanley::products::{andrews_p0, finite_class_series, stanley_product, verify_dissection, verify_gg_factorization};
use stanley::{Execution, Length, Partition, ScanReport};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn passed(r: &ScanReport) -> Result<(), String> {
    ensure(r.passed, || r.to_tsv().trim_end().replace('\n', " | "))
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:.1?}, limit {limit:?}"))?;
    Ok(took)
}

fn part(s: &str) -> Partition {
    s.parse().expect("valid partition literal")
}

fn dissection() -> Outcome {
    let start = Instant::now();
    let r = verify_dissection(2000);
    passed(&r)?;
    let took = within(start, Duration::from_secs(60))?;
    Ok(format!("N=2000 exact, {took:.1?}"))
}

fn brute_force() -> Outcome {
    let counts = classify_range(60, Execution::Parallel).map_err(|e| e.to_string())?;
    let stanley = stanley_product(60);
    let p0 = andrews_p0(60);
    for (n, c) in counts.iter().enumerate() {
        ensure(&BigInt::from(c.difference()) == stanley.coeff(n), || {
            format!("n={n}: p0-p2={} vs product {}", c.difference(), stanley.coeff(n))
        })?;
        ensure(&BigInt::from(c.p0) == p0.coeff(n), || format!("n={n}: p0={} vs product {}", c.p0, p0.coeff(n)))?;
    }
    Ok(format!("n<=60, p(60)={} partitions classified", counts[60].total()))
}

fn small_table() -> Outcome {
    let spec = ResidueClassSpec::new(8, 3, Length::Finite(3)).map_err(|e| e.to_string())?;
    let rows = [("19", "17,1^2"), ("11,5,3", "9,7,1^3"), ("13,3,3", "15,1^4"), ("5,5,3,3,3", "7^2,1^5")];
    for (input, want) in rows {
        let (image, _) = full_map(&part(input), &spec).map_err(|e| e.to_string())?;
        ensure(image == part(want), || format!("({input}) -> ({image}), expected ({want})"))?;
    }
    let domain: Vec<Partition> = partitions::enumerate(19, &spec.domain_constraint()).collect();
    let mut expected: Vec<Partition> = rows.iter().map(|(i, _)| part(i)).collect();
    expected.sort();
    let mut got = domain.clone();
    got.sort();
    ensure(got == expected, || format!("domain at 19 is {got:?}"))?;
    let a1 = finite_class_series(8, 3, Length::Finite(3), 19).map_err(|e| e.to_string())?;
    let a0 = finite_class_series(8, 1, Length::Finite(3), 19).map_err(|e| e.to_string())?;
    let codomain = partitions::count(19, &spec.codomain_constraint());
    ensure(a1.coeff(19) == &BigInt::from(4), || format!("A_3,1(19) = {}", a1.coeff(19)))?;
    ensure(a0.coeff(19) == &BigInt::from(8) && codomain == 8, || {
        format!("A_3,0(19) = {} (enumerated {codomain})", a0.coeff(19))
    })?;
    Ok("4 rows exact, A_3,1(19)=4, A_3,0(19)=8".into())
}

fn size_293_example() -> Outcome {
    let spec = ResidueClassSpec::new(8, 3, Length::Finite(11)).map_err(|e| e.to_string())?;
    let (image, trace) = full_map(&part("85,53,45,45,43,19,3"), &spec).map_err(|e| e.to_string())?;
    ensure(image == part("81,49,47,41,41,23,7,1,1,1,1"), || format!("image {image}"))?;
    ensure(trace.case == MapCase::Two, || format!("case {}", trace.case))?;
    let s = trace.stats;
    ensure((s.nu_one, s.mu_one, s.nu_top, s.mu_top) == (8, 4, 3, 1), || format!("{s:?}"))?;
    Ok(format!("image ({image}), case 2, nu1=8 mu1=4 nu7=3 mu7=1"))
}

fn audits() -> Outcome {
    let start = Instant::now();
    let mut specs = Vec::new();
    for l in [1, 2, 3, 5] {
        specs.push((8, 3, l));
    }
    for l in 1..=6 {
        specs.push((5, 2, l));
    }
    let mut cells = 0;
    for (m, r, l) in specs {
        let spec = ResidueClassSpec::new(m, r, Length::Finite(l)).map_err(|e| e.to_string())?;
        let audit = injectivity_audit(40, &spec, Execution::Parallel).map_err(|e| e.to_string())?;
        passed(&audit.report)?;
        for c in &audit.cells {
            ensure(c.images == c.conditioned && c.images == c.domain, || format!("{spec} n={}: {c:?}", c.n))?;
            if m == 8 {
                let eq = [0, 3, 5, 6].contains(&c.n);
                ensure(c.strict != eq, || format!("{spec} n={}: strict={}", c.n, c.strict))?;
            }
        }
        cells += audit.cells.len();
    }
    let took = within(start, Duration::from_secs(120))?;
    Ok(format!("10 families, {cells} cells, {took:.1?}"))
}

fn difference_signs() -> Outcome {
    for (m, r) in [(8, 3), (5, 2), (7, 3)] {
        for len in [Length::Finite(1), Length::Finite(2), Length::Infinite] {
            let rep = difference_sign_scan(m, r, len, 500).map_err(|e| e.to_string())?;
            passed(&rep)?;
            ensure(rep.findings.is_empty(), || format!("({m},{r},{len}) unexpected finding"))?;
        }
    }
    let mut firsts = Vec::new();
    for (m, r) in [(6, 2), (8, 2), (9, 3)] {
        let rep = difference_sign_scan(m, r, Length::Finite(1), 500).map_err(|e| e.to_string())?;
        passed(&rep)?;
        let first = rep.findings.first().map(|f| f.index).ok_or(format!("({m},{r},1): no negative"))?;
        firsts.push(format!("({m},{r},1)@{first}"));
        if (m, r) == (6, 2) {
            ensure(first == 4, || format!("(6,2,1) first negative at {first}"))?;
        }
    }
    Ok(format!("nonnegative to 500 for 9 cases; negatives {}", firsts.join(" ")))
}

fn bounds() -> Outcome {
    let ub = upper_bound_check(2000, true).map_err(|e| e.to_string())?;
    passed(&ub)?;
    let margin = ub.extremal_margin.unwrap_or(f64::NAN);
    ensure(margin > 1.0, || format!("log margin {margin}"))?;
    let ind = power_sum_check(1000).map_err(|e| e.to_string())?;
    passed(&ind)?;
    let grid = elementary_inequality_check(10.0, 1000).map_err(|e| e.to_string())?;
    passed(&grid)?;
    Ok(format!(
        "log margin {margin:.3}, power-sum n<=1000, grid slack {:.2e}",
        grid.extremal_margin.unwrap_or(f64::NAN)
    ))
}

fn signs_and_congruences() -> Outcome {
    passed(&sign_pattern_check(2000).map_err(|e| e.to_string())?)?;
    passed(&monotonicity_check(1000).map_err(|e| e.to_string())?)?;
    passed(&congruence_check(2000))?;
    Ok("signs n<=2000, monotone n<=1000, mod 5 to 2000".into())
}

fn gollnitz_gordon() -> Outcome {
    passed(&gg_enumerator_check(100).map_err(|e| e.to_string())?)?;
    passed(&gg_difference_check(500).map_err(|e| e.to_string())?)?;
    passed(&verify_gg_factorization(1000))?;
    Ok("enumerator n<=100, b_k to 500, factorization N=1000".into())
}

fn asymptotics() -> Outcome {
    let (ratio, rows) = ratio_convergence_report(1000).map_err(|e| e.to_string())?;
    passed(&ratio)?;
    let (mein, mrows) = meinardus_report(1500).map_err(|e| e.to_string())?;
    passed(&mein)?;
    let conj = conjecture_scan(1500).map_err(|e| e.to_string())?;
    passed(&conj)?;
    ensure(conj.findings.is_empty(), || conj.to_tsv().trim_end().replace('\n', " | "))?;
    let last = mrows.len();
    Ok(format!(
        "ratio dev {:.2e} at 1000, Meinardus ratios {:.4}/{:.4} at 1500, 0 counterexamples",
        rows[999].deviation,
        mrows[last - 2].ratio,
        mrows[last - 1].ratio
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("AC1 dissection", dissection),
        ("AC2 brute-force concordance", brute_force),
        ("AC3 golden table", small_table),
        ("AC4 size-293 example", size_293_example),
        ("AC5 injectivity audits", audits),
        ("AC6 difference signs", difference_signs),
        ("AC7 bounds", bounds),
        ("AC8 signs/monotonicity/congruences", signs_and_congruences),
        ("AC9 Gollnitz-Gordon", gollnitz_gordon),
        ("AC10 asymptotics", asymptotics),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|e| Err(format!("panicked: {:?}", e.downcast_ref::<String>())));
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS  {name:<36} {detail} [{took:.2?}]"),
            Err(detail) => {
                failures += 1;
                println!("FAIL  {name:<36} {detail} [{took:.2?}]");
            }
        }
    }
    println!("{} of 10 acceptance criteria passed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
