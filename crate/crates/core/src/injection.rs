//! An explicit injection from partitions into parts `≡ ±r (mod m)` to
//! partitions into parts `≡ ±1 (mod m)`, preserving the norm and the
//! largest-part bound.
//!
//! The map runs in three stages:
//!
//! 1. [`extract_multiples`] strips every multiple of `m` from each part, leaving
//!    a base partition over `{r, m-r}` and two nondecreasing extraction vectors.
//! 2. [`base_map`] rewrites the base over the alphabet `{1, m-1}`: each pair
//!    `r + (m-r)` becomes `1 + (m-1)`, and unpaired parts are split into ones,
//!    except that in case 3 the last two unpaired `(m-r)`s become
//!    `(m-1) + (m-2r+1)·1`.
//! 3. [`attach`] adds the extracted multiples back onto designated parts of the
//!    base image.
//!
//! The case (1, 2 or 3) is recoverable from the image through the three
//! condition clusters checked by [`verify_image_conditions`], which is what
//! makes the map injective.

use std::collections::HashMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::partitions::{self, EnumerationConstraint, Partition};
use crate::products::{difference_series, finite_class_series};
use crate::report::ScanReport;
use crate::series::Length;

/// The partition class `A^L_{m,r}`: parts `≡ ±r (mod m)` with largest part at
/// most `max(Lm - r, Lm + r - m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueClassSpec {
    pub m: u32,
    pub r: u32,
    pub len: Length,
}

impl ResidueClassSpec {
    pub fn new(m: u32, r: u32, len: Length) -> Result<Self> {
        if m < 3 {
            return Err(invalid(format!("modulus must be at least 3, got {m}")));
        }
        if r == 0 || r >= m {
            return Err(invalid(format!("need 0 < r < m, got r = {r}, m = {m}")));
        }
        if len == Length::Finite(0) {
            return Err(invalid("L must be positive"));
        }
        Ok(ResidueClassSpec { m, r, len })
    }

    pub fn complement(&self) -> u32 {
        self.m - self.r
    }

    /// `r ∤ (m - r)` and `(m - r) ∤ r`: the hypothesis under which the
    /// conditioned codomain count equals the domain count.
    pub fn hypothesis_holds(&self) -> bool {
        let (r, s) = (self.r, self.complement());
        s % r != 0 && r % s != 0
    }

    pub fn domain_bound(&self) -> Option<u32> {
        let l = self.len.finite()?;
        let (m, r) = (self.m, self.r);
        Some((l * m - r).max(l * m + r - m))
    }

    pub fn codomain_bound(&self) -> Option<u32> {
        self.len.finite().map(|l| l * self.m - 1)
    }

    pub fn domain_constraint(&self) -> EnumerationConstraint {
        EnumerationConstraint::plus_minus_residue(self.m, self.r, self.domain_bound())
    }

    pub fn codomain_constraint(&self) -> EnumerationConstraint {
        EnumerationConstraint::plus_minus_residue(self.m, 1, self.codomain_bound())
    }

    /// Checks membership in the domain class, naming the first offending part.
    pub fn check_domain(&self, p: &Partition) -> Result<()> {
        let (m, r) = (self.m, self.r);
        for &part in p.parts() {
            let res = part % m;
            if res != r && res != m - r {
                return Err(Error::ResidueMismatch { part, m, r });
            }
        }
        if let (Some(bound), Some(top)) = (self.domain_bound(), p.largest()) {
            if top > bound {
                return Err(Error::PartTooLarge { part: top, bound });
            }
        }
        Ok(())
    }

    fn check_map_defined(&self) -> Result<()> {
        if 2 * self.r >= self.m {
            return Err(invalid(format!(
                "the map is defined for 2r < m; use r = {} for the same class",
                self.complement()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for ResidueClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(m={}, r={}, L={})", self.m, self.r, self.len)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extraction {
    pub base: Partition,
    /// Multipliers of `m` removed from parts `≡ r`, nondecreasing.
    pub v_r: Vec<u32>,
    /// Multipliers of `m` removed from parts `≡ m - r`, nondecreasing.
    pub v_mr: Vec<u32>,
}

/// Writes each part as `p0 + m k` with `p0 ∈ {r, m - r}`.
pub fn extract_multiples(p: &Partition, m: u32, r: u32) -> Result<Extraction> {
    if m == 0 || r == 0 || r >= m {
        return Err(invalid(format!("need 0 < r < m, got r = {r}, m = {m}")));
    }
    let s = m - r;
    let mut base = Vec::with_capacity(p.len());
    let (mut v_r, mut v_mr) = (Vec::new(), Vec::new());
    for &part in p.parts() {
        let res = part % m;
        let k = part / m;
        if res == r {
            base.push(r);
            v_r.push(k);
        } else if res == s {
            base.push(s);
            v_mr.push(k);
        } else {
            return Err(Error::ResidueMismatch { part, m, r });
        }
    }
    v_r.sort_unstable();
    v_mr.sort_unstable();
    Ok(Extraction {
        base: Partition::new(base)?,
        v_r,
        v_mr,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum MapCase {
    /// At least as many `r`s as `(m-r)`s.
    One,
    /// More `(m-r)`s, and `r ∤ (m-r)(b-a)`.
    Two,
    /// More `(m-r)`s, and `r | (m-r)(b-a)`.
    Three,
}

impl From<MapCase> for u8 {
    fn from(c: MapCase) -> u8 {
        match c {
            MapCase::One => 1,
            MapCase::Two => 2,
            MapCase::Three => 3,
        }
    }
}

impl TryFrom<u8> for MapCase {
    type Error = String;
    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(MapCase::One),
            2 => Ok(MapCase::Two),
            3 => Ok(MapCase::Three),
            _ => Err(format!("case label must be 1, 2 or 3, got {v}")),
        }
    }
}

impl fmt::Display for MapCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", u8::from(*self))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Pair,
    Rewrite,
    /// The `(m-1)` produced by rewriting the last two unpaired parts in case 3.
    LastTwo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasePart {
    pub value: u32,
    pub origin: Origin,
}

/// Image of a base partition, with parts kept in creation order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseImage {
    pub m: u32,
    pub case: MapCase,
    pub pairs: usize,
    /// Value of the unpaired parts (`r` or `m - r`) and how many there were.
    pub unpaired_kind: u32,
    pub unpaired: usize,
    pub parts: Vec<BasePart>,
}

impl BaseImage {
    pub fn partition(&self) -> Partition {
        Partition::new(self.parts.iter().map(|p| p.value).collect()).expect("positive parts")
    }

    /// Attachment targets for the multiples extracted from parts `≡ r` and
    /// `≡ m - r`, as indices into `parts`.
    fn targets(&self) -> (Vec<usize>, Vec<usize>) {
        let top = self.m - 1;
        let select = |value: u32| -> Vec<usize> {
            self.parts
                .iter()
                .enumerate()
                .filter(|(_, p)| p.value == value && p.origin != Origin::LastTwo)
                .map(|(i, _)| i)
                .collect()
        };
        match self.case {
            MapCase::One => (select(1), select(top)),
            MapCase::Two | MapCase::Three => (select(top), select(1)),
        }
    }
}

/// Rewrites a partition over `{r, m - r}` into one over `{1, m - 1}` of equal norm.
pub fn base_map(base: &Partition, m: u32, r: u32) -> Result<BaseImage> {
    if r == 0 || 2 * r >= m {
        return Err(invalid(format!("base map needs 0 < 2r < m, got r = {r}, m = {m}")));
    }
    let s = m - r;
    for &part in base.parts() {
        if part != r && part != s {
            return Err(Error::ResidueMismatch { part, m, r });
        }
    }
    let a = base.multiplicity(r);
    let b = base.multiplicity(s);
    let case = if a >= b {
        MapCase::One
    } else if (s as usize * (b - a)) % r as usize != 0 {
        MapCase::Two
    } else {
        MapCase::Three
    };
    let pairs = a.min(b);
    let (unpaired_kind, unpaired) = if a >= b { (r, a - b) } else { (s, b - a) };
    if case == MapCase::Three && unpaired < 2 {
        return Err(invalid(format!(
            "case 3 needs two unpaired parts, found {unpaired}; (m, r) = ({m}, {r}) has r | (m - r)"
        )));
    }

    let mut parts = Vec::with_capacity(base.len() * s as usize);
    for _ in 0..pairs {
        parts.push(BasePart { value: 1, origin: Origin::Pair });
        parts.push(BasePart { value: m - 1, origin: Origin::Pair });
    }
    let split = if case == MapCase::Three { unpaired - 2 } else { unpaired };
    for _ in 0..split * unpaired_kind as usize {
        parts.push(BasePart { value: 1, origin: Origin::Rewrite });
    }
    if case == MapCase::Three {
        // 2(m - r) = (m - 1) + (m - 2r + 1)·1
        parts.push(BasePart { value: m - 1, origin: Origin::LastTwo });
        for _ in 0..(m + 1 - 2 * r) {
            parts.push(BasePart { value: 1, origin: Origin::Rewrite });
        }
    }
    let image = BaseImage { m, case, pairs, unpaired_kind, unpaired, parts };
    let norm: u32 = image.parts.iter().map(|p| p.value).sum();
    if norm != base.norm() {
        return Err(Error::Invariant(format!("base map changed the norm {} -> {norm}", base.norm())));
    }
    Ok(image)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorKind {
    R,
    Mr,
}

/// One extracted multiple `m * value` added onto base part `target`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attachment {
    pub vector: VectorKind,
    pub component: usize,
    pub value: u32,
    pub target: usize,
}

/// Adds `m * v` components back onto the base image.
///
/// Components are taken in nondecreasing order and the k-th one goes to the
/// k-th eligible target in creation order (pair-created parts first).
pub fn attach(image: &BaseImage, v_r: &[u32], v_mr: &[u32]) -> Result<(Partition, Vec<Attachment>)> {
    let m = image.m;
    let (r_targets, mr_targets) = image.targets();
    if v_r.len() > r_targets.len() || v_mr.len() > mr_targets.len() {
        return Err(Error::Invariant(format!(
            "case {}: {} + {} components for {} + {} targets",
            image.case,
            v_r.len(),
            v_mr.len(),
            r_targets.len(),
            mr_targets.len()
        )));
    }
    let mut values: Vec<u32> = image.parts.iter().map(|p| p.value).collect();
    let mut log = Vec::with_capacity(v_r.len() + v_mr.len());
    for (kind, vector, targets) in [(VectorKind::R, v_r, &r_targets), (VectorKind::Mr, v_mr, &mr_targets)] {
        let mut sorted = vector.to_vec();
        sorted.sort_unstable();
        for (component, (&value, &target)) in sorted.iter().zip(targets.iter()).enumerate() {
            values[target] += m * value;
            log.push(Attachment { vector: kind, component, value, target });
        }
    }
    Ok((Partition::new(values)?, log))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ImageCluster {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii")]
    II,
    #[serde(rename = "iii")]
    III,
}

impl ImageCluster {
    pub fn for_case(case: MapCase) -> ImageCluster {
        match case {
            MapCase::One => ImageCluster::I,
            MapCase::Two => ImageCluster::II,
            MapCase::Three => ImageCluster::III,
        }
    }
}

impl fmt::Display for ImageCluster {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ImageCluster::I => "i",
            ImageCluster::II => "ii",
            ImageCluster::III => "iii",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionFailure {
    /// A part is not `≡ ±1 (mod m)`.
    NotInCodomain { part: u32 },
    TooLarge { part: u32, bound: u32 },
    /// Fewer parts `≡ 1` than parts `≡ -1`.
    Imbalanced { nu_one: usize, nu_top: usize },
    /// Balanced, but none of the three clusters holds.
    NoCluster { difference: usize },
}

impl fmt::Display for ConditionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditionFailure::NotInCodomain { part } => write!(f, "part {part} is not ±1 mod m"),
            ConditionFailure::TooLarge { part, bound } => write!(f, "part {part} exceeds {bound}"),
            ConditionFailure::Imbalanced { nu_one, nu_top } => {
                write!(f, "nu(1) = {nu_one} < nu(m-1) = {nu_top}")
            }
            ConditionFailure::NoCluster { difference } => {
                write!(f, "no condition cluster holds for nu(1) - nu(m-1) = {difference}")
            }
        }
    }
}

/// The residue statistics the image conditions are phrased in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageStats {
    pub nu_one: usize,
    pub nu_top: usize,
    pub mu_one: usize,
    pub mu_top: usize,
}

impl ImageStats {
    pub fn of(p: &Partition, m: u32) -> Self {
        ImageStats {
            nu_one: p.residue_count(1, m),
            nu_top: p.residue_count(m - 1, m),
            mu_one: p.multiplicity(1),
            mu_top: p.multiplicity(m - 1),
        }
    }
}

/// Decides which condition cluster (if any) a codomain partition satisfies.
///
/// With `d = ν(1) - ν(m-1) ≥ 0` and `s = m - r`:
/// (i) `r | d`, `r μ(1) ≥ (r-1) d`;
/// (ii) `s | d`, `r ∤ d`, `s μ(1) ≥ (s-1) d`;
/// (iii) `d ≡ -m (mod lcm(r, s))`, `μ(m-1) > 0`, `s μ(1) ≥ (s-1) d - r`.
pub fn verify_image_conditions(
    image: &Partition,
    spec: &ResidueClassSpec,
) -> std::result::Result<ImageCluster, ConditionFailure> {
    let m = spec.m;
    for &part in image.parts() {
        let res = part % m;
        if res != 1 && res != m - 1 {
            return Err(ConditionFailure::NotInCodomain { part });
        }
    }
    if let (Some(bound), Some(top)) = (spec.codomain_bound(), image.largest()) {
        if top > bound {
            return Err(ConditionFailure::TooLarge { part: top, bound });
        }
    }
    let st = ImageStats::of(image, m);
    if st.nu_one < st.nu_top {
        return Err(ConditionFailure::Imbalanced { nu_one: st.nu_one, nu_top: st.nu_top });
    }
    let d = (st.nu_one - st.nu_top) as i64;
    let r = spec.r as i64;
    let s = spec.complement() as i64;
    let mu1 = st.mu_one as i64;
    if d % r == 0 && r * mu1 >= (r - 1) * d {
        return Ok(ImageCluster::I);
    }
    if d % s == 0 && d % r != 0 && s * mu1 >= (s - 1) * d {
        return Ok(ImageCluster::II);
    }
    let l = r.lcm(&s);
    if (d + m as i64).rem_euclid(l) == 0 && st.mu_top > 0 && s * mu1 >= (s - 1) * d - r {
        return Ok(ImageCluster::III);
    }
    Err(ConditionFailure::NoCluster { difference: d as usize })
}

/// Full provenance of one application of the map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapTrace {
    pub input: Partition,
    pub spec: ResidueClassSpec,
    pub case: MapCase,
    pub pair_count: usize,
    pub unpaired_kind: u32,
    pub unpaired_count: usize,
    /// Unpaired parts split entirely into ones.
    pub rewritten_to_ones: usize,
    pub v_r: Vec<u32>,
    pub v_mr: Vec<u32>,
    pub base: Partition,
    pub base_image: Partition,
    pub attachments: Vec<Attachment>,
    pub image: Partition,
    pub stats: ImageStats,
    pub condition: Option<ImageCluster>,
}

/// Maps a domain partition to the codomain and records every step.
pub fn full_map(p: &Partition, spec: &ResidueClassSpec) -> Result<(Partition, MapTrace)> {
    spec.check_map_defined()?;
    spec.check_domain(p)?;
    let ex = extract_multiples(p, spec.m, spec.r)?;
    let base_image = base_map(&ex.base, spec.m, spec.r)?;
    let (image, attachments) = attach(&base_image, &ex.v_r, &ex.v_mr)?;
    if image.norm() != p.norm() {
        return Err(Error::Invariant(format!("map changed the norm {} -> {}", p.norm(), image.norm())));
    }
    let rewritten_to_ones = match base_image.case {
        MapCase::Three => base_image.unpaired - 2,
        _ => base_image.unpaired,
    };
    let trace = MapTrace {
        input: p.clone(),
        spec: *spec,
        case: base_image.case,
        pair_count: base_image.pairs,
        unpaired_kind: base_image.unpaired_kind,
        unpaired_count: base_image.unpaired,
        rewritten_to_ones,
        v_r: ex.v_r,
        v_mr: ex.v_mr,
        base: ex.base,
        base_image: base_image.partition(),
        attachments,
        stats: ImageStats::of(&image, spec.m),
        condition: verify_image_conditions(&image, spec).ok(),
        image: image.clone(),
    };
    Ok((image, trace))
}

/// Integers below 49 that are not `7a + b` with `a > b`, `0 <= b < 7`, and
/// are not among the equality cases, grouped by the shape of their witness.
const WITNESS_ONES: &[u32] = &[1, 2, 4, 8, 11, 13, 16, 17, 19, 26, 32, 34, 41];
const WITNESS_ONE_SEVEN: &[u32] = &[9, 10, 12, 24, 25, 27, 40];
const WITNESS_SPECIAL: &[(u32, u32, u32)] = &[(18, 2, 4), (20, 2, 6), (33, 4, 5), (48, 4, 20)];
/// Sizes where the two classes have equal counts for every `L`.
pub const EQUALITY_CASES: &[u32] = &[0, 3, 5, 6];

fn sevens_and_ones(sevens: u32, ones: u32) -> Partition {
    let mut parts = vec![7; sevens as usize];
    parts.extend(std::iter::repeat_n(1, ones as usize));
    Partition::from_sorted(parts)
}

/// A partition of `n` into parts `≡ ±1 (mod 8)` outside the image of the
/// `(8, 3, L)` map, or `None` for the equality cases `n ∈ {0, 3, 5, 6}`.
pub fn strictness_witness(n: u32, spec: &ResidueClassSpec) -> Result<Option<Partition>> {
    if spec.m != 8 || spec.r != 3 {
        return Err(invalid(format!("strictness witnesses are tabulated for (m, r) = (8, 3), got {spec}")));
    }
    let (q, rem) = (n / 7, n % 7);
    if q > rem {
        return Ok(Some(sevens_and_ones(q, rem)));
    }
    if WITNESS_ONES.contains(&n) {
        return Ok(Some(sevens_and_ones(0, n)));
    }
    if WITNESS_ONE_SEVEN.contains(&n) {
        return Ok(Some(sevens_and_ones(1, n - 7)));
    }
    if let Some(&(_, sevens, ones)) = WITNESS_SPECIAL.iter().find(|w| w.0 == n) {
        return Ok(Some(sevens_and_ones(sevens, ones)));
    }
    if EQUALITY_CASES.contains(&n) {
        return Ok(None);
    }
    Err(Error::Invariant(format!("no witness rule covers n = {n}")))
}

/// Counts for one size `n` of an injectivity audit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditCell {
    pub n: u32,
    pub domain: u64,
    pub codomain: u64,
    /// Codomain partitions satisfying one of the condition clusters.
    pub conditioned: u64,
    pub images: u64,
    pub strict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditMode {
    /// The map was applied to every domain partition.
    Injection,
    /// The divisibility hypothesis fails; only the coefficient scan ran.
    Inequality,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub spec: ResidueClassSpec,
    pub mode: AuditMode,
    pub report: ScanReport,
    pub cells: Vec<AuditCell>,
}

fn coefficient_u64(c: &num_bigint::BigInt) -> u64 {
    c.to_u64().expect("class counts are small and nonnegative")
}

fn audit_cell(n: u32, spec: &ResidueClassSpec, domain_expected: u64, codomain_expected: u64) -> (AuditCell, ScanReport) {
    let mut report = ScanReport::new(format!("audit-cell {spec}"), n as u64, n as u64);
    let idx = n as u64;
    let mut images: HashMap<Partition, Partition> = HashMap::new();
    let mut domain = 0u64;
    for p in partitions::enumerate(n, &spec.domain_constraint()) {
        domain += 1;
        let (image, trace) = match full_map(&p, spec) {
            Ok(v) => v,
            Err(e) => {
                report.violation(idx, format!("map failed on {p}: {e}"));
                continue;
            }
        };
        if image.norm() != n {
            report.violation(idx, format!("{p} -> {image} changes the norm"));
        }
        match verify_image_conditions(&image, spec) {
            Ok(cluster) if cluster == ImageCluster::for_case(trace.case) => {}
            Ok(cluster) => report.violation(
                idx,
                format!("{p} -> {image}: case {} landed in cluster {cluster}", trace.case),
            ),
            Err(why) => report.violation(idx, format!("{p} -> {image}: {why}")),
        }
        if let Some(prev) = images.insert(image.clone(), p.clone()) {
            report.violation(idx, format!("{prev} and {p} both map to {image}"));
        }
    }
    let mut codomain = 0u64;
    let mut conditioned = 0u64;
    for t in partitions::enumerate(n, &spec.codomain_constraint()) {
        codomain += 1;
        if verify_image_conditions(&t, spec).is_ok() {
            conditioned += 1;
            if !images.contains_key(&t) {
                report.violation(idx, format!("{t} satisfies the conditions but is not an image"));
            }
        }
    }
    if domain != domain_expected {
        report.violation(idx, format!("enumerated {domain} domain partitions, series says {domain_expected}"));
    }
    if codomain != codomain_expected {
        report.violation(idx, format!("enumerated {codomain} codomain partitions, series says {codomain_expected}"));
    }
    if conditioned != domain {
        report.violation(idx, format!("{conditioned} conditioned codomain partitions vs {domain} domain partitions"));
    }
    let strict = codomain > domain;
    if spec.m == 8 && spec.r == 3 {
        let expect_strict = !EQUALITY_CASES.contains(&n);
        if strict != expect_strict {
            report.violation(idx, format!("strictness {strict}, expected {expect_strict} ({codomain} vs {domain})"));
        }
        match strictness_witness(n, spec) {
            Ok(Some(w)) => {
                if !spec.codomain_constraint().admits(&w) || w.norm() != n {
                    report.violation(idx, format!("witness {w} is not a codomain partition of {n}"));
                } else if verify_image_conditions(&w, spec).is_ok() {
                    report.violation(idx, format!("witness {w} satisfies the image conditions"));
                }
            }
            Ok(None) => {}
            Err(e) => report.violation(idx, e.to_string()),
        }
    }
    let cell = AuditCell {
        n,
        domain,
        codomain,
        conditioned,
        images: images.len() as u64,
        strict,
    };
    (cell, report)
}

/// Maps every domain partition of every `n <= n_max` and checks norm
/// preservation, injectivity, the image conditions, the count identities
/// against the product expansions and, for `(8, 3)`, exact strictness.
///
/// When the divisibility hypothesis fails the map is not expected to exist;
/// the audit then falls back to [`difference_sign_scan`].
pub fn injectivity_audit(n_max: u32, spec: &ResidueClassSpec, exec: Execution) -> Result<AuditReport> {
    if !spec.hypothesis_holds() {
        let report = difference_sign_scan(spec.m, spec.r, spec.len, n_max as usize)?;
        return Ok(AuditReport { spec: *spec, mode: AuditMode::Inequality, report, cells: Vec::new() });
    }
    spec.check_map_defined()?;
    let order = n_max as usize;
    let dom = finite_class_series(spec.m, spec.r, spec.len, order)?;
    let cod = finite_class_series(spec.m, 1, spec.len, order)?;
    let results = exec.map_range(0..order + 1, |n| {
        audit_cell(n as u32, spec, coefficient_u64(dom.coeff(n)), coefficient_u64(cod.coeff(n)))
    });
    let mut report = ScanReport::new(format!("injectivity-audit {spec}"), 0, n_max as u64);
    let mut cells = Vec::with_capacity(results.len());
    for (cell, r) in results {
        report.absorb(&r);
        cells.push(cell);
    }
    report.range = (0, n_max as u64);
    Ok(AuditReport { spec: *spec, mode: AuditMode::Injection, report, cells })
}

/// Scans `1/(q, q^{m-1}; q^m)_L - 1/(q^r, q^{m-r}; q^m)_L` up to `order`.
///
/// When `r ∤ (m-r)` and `(m-r) ∤ r` every coefficient must be nonnegative;
/// otherwise a negative coefficient must show up, and the first one is
/// recorded as a finding. Disagreement with that prediction is a violation.
pub fn difference_sign_scan(m: u32, r: u32, len: Length, order: usize) -> Result<ScanReport> {
    if len == Length::Finite(0) {
        return Err(invalid("L must be positive"));
    }
    if !(1 < r && r + 1 < m) {
        return Err(invalid(format!("need 1 < r < m - 1, got m = {m}, r = {r}")));
    }
    let spec = ResidueClassSpec::new(m, r, len)?;
    let predicted_nonnegative = spec.hypothesis_holds();
    let diff = difference_series(m, r, len, order)?;
    let mut report = ScanReport::new(format!("difference-sign {spec}"), 0, order as u64);
    let mut first_negative = None;
    for (n, c) in diff.coeffs().iter().enumerate() {
        if let Some(v) = c.to_f64() {
            report.margin(v);
        }
        if c.is_negative() {
            if first_negative.is_none() {
                first_negative = Some(n);
            }
            if predicted_nonnegative {
                report.violation(n as u64, format!("coefficient {c} is negative"));
            }
        }
    }
    if !predicted_nonnegative {
        match first_negative {
            Some(n) => report.finding(
                n as u64,
                format!("first negative coefficient {} (predicted: r | (m-r) or (m-r) | r)", diff.coeff(n)),
            ),
            None => report.violation(
                order as u64,
                format!("no negative coefficient up to {order}, though the divisibility test predicts one"),
            ),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(s: &str) -> Partition {
        s.parse().unwrap()
    }

    fn spec(m: u32, r: u32, l: u32) -> ResidueClassSpec {
        ResidueClassSpec::new(m, r, Length::Finite(l)).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(ResidueClassSpec::new(2, 1, Length::Infinite).is_err());
        assert!(ResidueClassSpec::new(8, 8, Length::Infinite).is_err());
        assert!(ResidueClassSpec::new(8, 3, Length::Finite(0)).is_err());
        assert!(spec(8, 3, 1).hypothesis_holds());
        assert!(spec(5, 2, 1).hypothesis_holds());
        assert!(!spec(6, 2, 1).hypothesis_holds());
        assert!(!spec(9, 3, 1).hypothesis_holds());
        assert_eq!(spec(8, 3, 3).domain_bound(), Some(21));
        assert_eq!(spec(8, 3, 3).codomain_bound(), Some(23));
    }

    #[test]
    fn extraction_examples() {
        let ex = extract_multiples(&part("85,53,45,45,43,19,3"), 8, 3).unwrap();
        assert_eq!(ex.base, part("5^4,3^3"));
        assert_eq!(ex.v_r, [0, 2, 5]);
        assert_eq!(ex.v_mr, [5, 5, 6, 10]);

        let ex = extract_multiples(&part("5,3,3"), 8, 3).unwrap();
        assert!(ex.v_r.iter().chain(&ex.v_mr).all(|&k| k == 0));

        let ex = extract_multiples(&part("19"), 8, 3).unwrap();
        assert_eq!((ex.base, ex.v_r, ex.v_mr), (part("3"), vec![2], vec![]));

        assert!(matches!(
            extract_multiples(&part("4"), 8, 3),
            Err(Error::ResidueMismatch { part: 4, .. })
        ));
    }

    #[test]
    fn base_map_examples() {
        let b = base_map(&part("5,3,3"), 8, 3).unwrap();
        assert_eq!((b.partition(), b.case), (part("7,1^4"), MapCase::One));
        let b = base_map(&part("5,5,3,3,3"), 8, 3).unwrap();
        assert_eq!((b.partition(), b.case), (part("7^2,1^5"), MapCase::One));
        let b = base_map(&part("5^4,3^3"), 8, 3).unwrap();
        assert_eq!((b.partition(), b.case), (part("7^3,1^8"), MapCase::Two));
        // b - a = 3: the last two fives become 7 + 1 + 1 + 1
        let b = base_map(&part("5^3"), 8, 3).unwrap();
        assert_eq!(b.case, MapCase::Three);
        assert_eq!(b.partition(), part("7,1^8"));
        assert!(base_map(&part("5,4"), 8, 3).is_err());
    }

    #[test]
    fn attach_examples() {
        let b = base_map(&part("5^4,3^3"), 8, 3).unwrap();
        let (img, log) = attach(&b, &[0, 2, 5], &[5, 5, 6, 10]).unwrap();
        assert_eq!(img, part("81,49,47,41,41,23,7,1,1,1,1"));
        assert_eq!(log.len(), 7);

        let (img, _) = attach(&b, &[0, 0, 0], &[0, 0, 0, 0]).unwrap();
        assert_eq!(img, b.partition());

        let b = base_map(&part("3"), 8, 3).unwrap();
        assert_eq!(b.partition(), part("1,1,1"));
        let (img, _) = attach(&b, &[2], &[]).unwrap();
        assert_eq!(img, part("17,1,1"));
    }

    #[test]
    fn attach_rejects_insufficient_targets() {
        let b = base_map(&part("3"), 8, 3).unwrap();
        assert!(matches!(attach(&b, &[1, 1, 1, 1], &[]), Err(Error::Invariant(_))));
        assert!(matches!(attach(&b, &[], &[1]), Err(Error::Invariant(_))));
    }

    #[test]
    fn case_three_bare_part_keeps_no_attachment() {
        // base (5^3): a = 0, b = 3; every vector component lands on ones
        let s = spec(8, 3, 4);
        let (img, trace) = full_map(&part("29,21,13"), &s).unwrap();
        assert_eq!(trace.case, MapCase::Three);
        assert!(img.multiplicity(7) > 0);
        assert_eq!(verify_image_conditions(&img, &s), Ok(ImageCluster::III));
    }

    #[test]
    fn size_293_example() {
        let s = spec(8, 3, 11);
        let (img, trace) = full_map(&part("85,53,45,45,43,19,3"), &s).unwrap();
        assert_eq!(img, part("81,49,47,41,41,23,7,1,1,1,1"));
        assert_eq!(img.to_string(), "81,49,47,41^2,23,7,1^4");
        assert_eq!(trace.case, MapCase::Two);
        assert_eq!(trace.stats, ImageStats { nu_one: 8, nu_top: 3, mu_one: 4, mu_top: 1 });
        assert_eq!(trace.condition, Some(ImageCluster::II));
        assert_eq!(img.norm(), 293);
    }

    #[test]
    fn table_rows() {
        let s = spec(8, 3, 3);
        for (input, want) in [("19", "17,1^2"), ("11,5,3", "9,7,1^3"), ("13,3,3", "15,1^4"), ("5,5,3,3,3", "7^2,1^5")] {
            let (img, _) = full_map(&part(input), &s).unwrap();
            assert_eq!(img.to_string(), want, "{input}");
        }
    }

    #[test]
    fn full_map_rejects_bad_input() {
        let s = spec(8, 3, 1);
        assert!(matches!(full_map(&part("4"), &s), Err(Error::ResidueMismatch { part: 4, .. })));
        assert!(matches!(full_map(&part("11"), &s), Err(Error::PartTooLarge { part: 11, bound: 5 })));
        assert!(full_map(&part("3"), &spec(8, 5, 1)).is_err());
    }

    #[test]
    fn condition_examples() {
        let s = spec(8, 3, 3);
        assert_eq!(verify_image_conditions(&part("7^2,1^5"), &s), Ok(ImageCluster::I));
        assert!(matches!(
            verify_image_conditions(&part("7,7,1"), &s),
            Err(ConditionFailure::Imbalanced { nu_one: 1, nu_top: 2 })
        ));
        assert!(matches!(
            verify_image_conditions(&part("3"), &s),
            Err(ConditionFailure::NotInCodomain { part: 3 })
        ));
        assert!(matches!(
            verify_image_conditions(&part("1^19"), &s),
            Err(ConditionFailure::NoCluster { difference: 19 })
        ));
    }

    #[test]
    fn witness_examples() {
        let s = spec(8, 3, 1);
        assert_eq!(strictness_witness(19, &s).unwrap(), Some(part("1^19")));
        assert_eq!(strictness_witness(18, &s).unwrap(), Some(part("7^2,1^4")));
        assert_eq!(strictness_witness(3, &s).unwrap(), None);
        assert_eq!(strictness_witness(9, &s).unwrap(), Some(part("7,1^2")));
        assert_eq!(strictness_witness(50, &s).unwrap(), Some(part("7^7,1")));
        assert!(strictness_witness(5, &spec(5, 2, 1)).is_err());
    }

    #[test]
    fn witness_rules_cover_every_size() {
        let s = spec(8, 3, 1);
        for n in 0..400 {
            let w = strictness_witness(n, &s).unwrap();
            assert_eq!(w.is_none(), EQUALITY_CASES.contains(&n), "n = {n}");
            if let Some(w) = w {
                assert_eq!(w.norm(), n);
                assert!(verify_image_conditions(&w, &s).is_err(), "witness {w} for {n}");
            }
        }
    }

    #[test]
    fn small_audit() {
        let a = injectivity_audit(25, &spec(8, 3, 2), Execution::Sequential).unwrap();
        assert!(a.report.passed, "{}", a.report.to_tsv());
        assert_eq!(a.mode, AuditMode::Injection);
        let b = injectivity_audit(25, &spec(8, 3, 2), Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn audit_of_gcd_two_modulus() {
        // (10, 4): gcd(r, m - r) = 2, neither divides the other
        let a = injectivity_audit(30, &spec(10, 4, 3), Execution::Parallel).unwrap();
        assert!(a.report.passed, "{}", a.report.to_tsv());
    }

    #[test]
    fn audit_falls_back_when_hypothesis_fails() {
        let a = injectivity_audit(20, &spec(6, 2, 1), Execution::Parallel).unwrap();
        assert_eq!(a.mode, AuditMode::Inequality);
        assert!(a.report.passed);
        assert_eq!(a.report.findings[0].index, 4);
    }

    #[test]
    fn difference_sign_examples() {
        let r = difference_sign_scan(8, 3, Length::Infinite, 400).unwrap();
        assert!(r.passed && r.findings.is_empty());
        let r = difference_sign_scan(6, 2, Length::Finite(1), 50).unwrap();
        assert!(r.passed);
        assert_eq!(r.findings[0].index, 4);
        assert!(difference_sign_scan(7, 3, Length::Finite(2), 200).unwrap().passed);
        assert!(difference_sign_scan(8, 1, Length::Finite(2), 20).is_err());
        assert!(difference_sign_scan(8, 7, Length::Finite(2), 20).is_err());
        assert!(difference_sign_scan(8, 3, Length::Finite(0), 20).is_err());
    }

    #[test]
    fn trace_serializes() {
        let (_, trace) = full_map(&part("19"), &spec(8, 3, 3)).unwrap();
        let js = serde_json::to_value(&trace).unwrap();
        assert_eq!(js["image"], "17,1^2");
        assert_eq!(js["case"], 1);
        assert_eq!(js["condition"], "i");
        let back: MapTrace = serde_json::from_value(js).unwrap();
        assert_eq!(back, trace);
    }
}
