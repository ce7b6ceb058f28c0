//! Unique-length (Graham) classification, the exhaustive sweep over all
//! size-`n` multisets, the three example families, and the two-valued
//! zero-sum sweep.

use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::residue::{is_canonical_mult, Modulus, ResidueSequence};
use crate::spectrum::{self, small};
use crate::structure::is_zero_sum_free;

/// How the zero-sum lengths of a sequence look.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GrahamVerdict {
    NoZeroSum,
    /// Every nonempty zero-sum subsequence has exactly this length.
    Unique(usize),
    /// At least two distinct lengths, ascending.
    Multiple(Vec<usize>),
}

impl GrahamVerdict {
    fn from_lengths(lengths: Vec<usize>) -> Self {
        match lengths.as_slice() {
            [] => GrahamVerdict::NoZeroSum,
            [r] => GrahamVerdict::Unique(*r),
            _ => GrahamVerdict::Multiple(lengths),
        }
    }

    pub fn is_unique(&self) -> bool {
        matches!(self, GrahamVerdict::Unique(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            GrahamVerdict::NoZeroSum => "nozerosum",
            GrahamVerdict::Unique(_) => "unique",
            GrahamVerdict::Multiple(_) => "multiple",
        }
    }

    pub fn r(&self) -> Option<usize> {
        match self {
            GrahamVerdict::Unique(r) => Some(*r),
            _ => None,
        }
    }

    pub fn lengths(&self) -> Vec<usize> {
        match self {
            GrahamVerdict::NoZeroSum => vec![],
            GrahamVerdict::Unique(r) => vec![*r],
            GrahamVerdict::Multiple(ls) => ls.clone(),
        }
    }
}

impl fmt::Display for GrahamVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrahamVerdict::NoZeroSum => f.write_str("NoZeroSum"),
            GrahamVerdict::Unique(r) => write!(f, "Unique({r})"),
            GrahamVerdict::Multiple(ls) => {
                let ls: Vec<String> = ls.iter().map(|l| l.to_string()).collect();
                write!(f, "Multiple({{{}}})", ls.join(","))
            }
        }
    }
}

pub fn is_graham(seq: &ResidueSequence) -> GrahamVerdict {
    GrahamVerdict::from_lengths(spectrum::zero_sum_lengths(seq))
}

/// One JSON Lines record describing a sequence and its verdict.
pub fn sequence_record(seq: &ResidueSequence, verdict: &GrahamVerdict) -> serde_json::Value {
    json!({
        "n": seq.n(),
        "seq": seq,
        "verdict": verdict.label(),
        "r": verdict.r(),
        "lengths": verdict.lengths(),
        "distinct": seq.distinct_count(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Only examine orbit representatives under multiplication by units.
    pub canonical: bool,
    /// Skip multisets with at most two distinct values.
    pub prune_two_valued: bool,
    /// Multisets per work unit, in enumeration order.
    pub chunk_size: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            canonical: true,
            prune_two_valued: true,
            chunk_size: 1 << 14,
        }
    }
}

/// A sequence with a unique zero-sum length found during a sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrahamFinding {
    pub seq: ResidueSequence,
    pub r: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub n: usize,
    pub options: VerifyOptions,
    /// Every size-`n` multiset the enumeration passed over.
    pub total: u128,
    pub skipped_two_valued: u128,
    pub skipped_noncanonical: u128,
    /// Multisets whose verdict was actually computed.
    pub examined: u128,
    /// Examined multisets with a `Unique` verdict, in enumeration order.
    pub graham: Vec<GrahamFinding>,
    /// The subset of `graham` with three or more distinct values.
    pub counterexamples: Vec<ResidueSequence>,
    pub wall_time: Duration,
}

impl VerificationReport {
    pub fn is_clean(&self) -> bool {
        self.counterexamples.is_empty()
    }

    /// Summary record. Timing is left out when `with_timing` is false so
    /// reports from different runs can be compared byte for byte.
    pub fn summary_record(&self, with_timing: bool) -> serde_json::Value {
        let mut rec = json!({
            "kind": "report",
            "n": self.n,
            "canonical": self.options.canonical,
            "pruned": self.options.prune_two_valued,
            "total": self.total.to_string(),
            "skipped_two_valued": self.skipped_two_valued.to_string(),
            "skipped_noncanonical": self.skipped_noncanonical.to_string(),
            "examined": self.examined.to_string(),
            "graham_found": self.graham.len(),
            "counterexamples": self.counterexamples,
        });
        if with_timing {
            rec["wall_time_ms"] = json!(self.wall_time.as_secs_f64() * 1e3);
        }
        rec
    }

    /// One record per Graham sequence found, then the summary record.
    pub fn to_jsonl(&self, with_timing: bool) -> String {
        let mut out = String::new();
        for g in &self.graham {
            out.push_str(&sequence_record(&g.seq, &GrahamVerdict::Unique(g.r)).to_string());
            out.push('\n');
        }
        out.push_str(&self.summary_record(with_timing).to_string());
        out.push('\n');
        out
    }
}

/// `C(a, b)`, exact in `u128` for the sizes the sweep can reach.
pub fn binomial(a: u64, b: u64) -> u128 {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let mut r: u128 = 1;
    for i in 0..b {
        r = r * (a - i) as u128 / (i + 1) as u128;
    }
    r
}

/// Number of size-`n` multisets over `[0, n-1]`, and how many of them have
/// at least three distinct values.
pub fn count_search_space(n: Modulus) -> (u128, u128) {
    let n = n.get() as u64;
    let total = binomial(2 * n - 1, n);
    let one_valued = n as u128;
    let two_valued = binomial(n, 2) * (n as u128 - 1);
    (total, total - one_valued - two_valued)
}

/// Nondecreasing tuples of length `k` over `[lo, n-1]`.
fn count_tuples(n: usize, lo: usize, k: usize) -> u128 {
    if k == 0 {
        return 1;
    }
    if lo >= n {
        return 0;
    }
    binomial((n - lo + k - 1) as u64, k as u64)
}

/// The tuple at position `rank` in lexicographic order.
fn unrank(n: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut tuple = Vec::with_capacity(k);
    let mut lo = 0;
    for i in 0..k {
        let rest = k - i - 1;
        let mut v = lo;
        loop {
            let c = count_tuples(n, v, rest);
            if rank < c {
                break;
            }
            rank -= c;
            v += 1;
        }
        tuple.push(v);
        lo = v;
    }
    tuple
}

/// Advances to the next nondecreasing tuple; false after the last one.
fn advance(tuple: &mut [usize], n: usize) -> bool {
    let Some(i) = tuple.iter().rposition(|&v| v + 1 < n) else {
        return false;
    };
    let v = tuple[i] + 1;
    tuple[i..].iter_mut().for_each(|x| *x = v);
    true
}

#[derive(Debug, Default)]
struct ChunkResult {
    total: u128,
    skipped_two_valued: u128,
    skipped_noncanonical: u128,
    examined: u128,
    graham: Vec<GrahamFinding>,
}

fn sweep_chunk(n: Modulus, options: &VerifyOptions, start: u128, count: u128) -> ChunkResult {
    let nn = n.get();
    let mut out = ChunkResult::default();
    let mut tuple = unrank(nn, nn, start);
    let mut mult = vec![0usize; nn];
    let mut scratch = vec![0usize; nn];
    for step in 0..count {
        if step > 0 && !advance(&mut tuple, nn) {
            break;
        }
        out.total += 1;
        let distinct = 1 + tuple.windows(2).filter(|w| w[0] != w[1]).count();
        if options.prune_two_valued && distinct < 3 {
            out.skipped_two_valued += 1;
            continue;
        }
        mult.iter_mut().for_each(|c| *c = 0);
        for &v in &tuple {
            mult[v] += 1;
        }
        if options.canonical && !is_canonical_mult(&mult, &mut scratch) {
            out.skipped_noncanonical += 1;
            continue;
        }
        out.examined += 1;
        let unique = match small::zero_sum_mask_mult(&mult, nn, true) {
            Some(mask) if mask.count_ones() == 1 => Some(mask.trailing_zeros() as usize),
            Some(_) => None,
            None => {
                let seq = ResidueSequence::from_residues(n, &tuple);
                is_graham(&seq).r()
            }
        };
        if let Some(r) = unique {
            out.graham.push(GrahamFinding {
                seq: ResidueSequence::from_residues(n, &tuple),
                r,
            });
        }
    }
    out
}

/// Classifies every size-`n` multiset over `[0, n-1]` and collects those
/// with a unique zero-sum length; any of them with three or more distinct
/// values is a counterexample to the two-value bound.
///
/// The enumeration is cut into fixed-size chunks of the lexicographic order
/// and spread over `workers` threads. Chunks are merged by index, so the
/// report does not depend on the worker count.
pub fn verify_theorem(
    n: Modulus,
    workers: usize,
    options: VerifyOptions,
) -> Result<VerificationReport> {
    if options.chunk_size == 0 {
        return Err(Error::HypothesisViolated(
            "chunk size must be positive".into(),
        ));
    }
    let started = Instant::now();
    let (total, _) = count_search_space(n);
    let chunk = options.chunk_size as u128;
    let chunks = total.div_ceil(chunk);
    let run = |c: u128| sweep_chunk(n, &options, c * chunk, chunk.min(total - c * chunk));
    let results: Vec<ChunkResult> = if workers <= 1 {
        (0..chunks).map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
        let idx: Vec<u128> = (0..chunks).collect();
        pool.install(|| idx.into_par_iter().map(run).collect())
    };

    let mut report = VerificationReport {
        n: n.get(),
        options,
        total: 0,
        skipped_two_valued: 0,
        skipped_noncanonical: 0,
        examined: 0,
        graham: Vec::new(),
        counterexamples: Vec::new(),
        wall_time: Duration::ZERO,
    };
    for r in results {
        report.total += r.total;
        report.skipped_two_valued += r.skipped_two_valued;
        report.skipped_noncanonical += r.skipped_noncanonical;
        report.examined += r.examined;
        report.graham.extend(r.graham);
    }
    report.counterexamples = report
        .graham
        .iter()
        .filter(|g| g.seq.distinct_count() >= 3)
        .map(|g| g.seq.clone())
        .collect();
    report.wall_time = started.elapsed();
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum FamilyParams {
    X { x: usize },
    Q { q: usize },
    QR { q: usize, r: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyInstance {
    pub family: u8,
    pub n: usize,
    pub params: FamilyParams,
    pub seq: ResidueSequence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyVerdict {
    pub instance: FamilyInstance,
    pub verdict: GrahamVerdict,
    /// Whether the verdict is `Unique`, as the family is claimed to be.
    pub matches_claim: bool,
}

impl FamilyVerdict {
    pub fn record(&self) -> serde_json::Value {
        let mut rec = sequence_record(&self.instance.seq, &self.verdict);
        rec["family"] = json!(self.instance.family);
        rec["params"] = json!(self.instance.params);
        rec["matches_claim"] = json!(self.matches_claim);
        rec
    }
}

/// The three printed families of sequences with a unique zero-sum length:
///
/// 1. `1^{n-1} x` for every `x` in `[0, n-1]`;
/// 2. `1^{n-2} (q+1)^2` when `n = 2q + 1`;
/// 3. `2^{q+r} 1^{q-r}` when `n = 2q`, for odd `r` with `q - r >= 1`.
pub fn family_sequences(n: Modulus) -> Result<Vec<FamilyInstance>> {
    let nn = n.get();
    if nn < 2 {
        return Err(Error::DegenerateModulus(nn));
    }
    let mut out = Vec::new();
    for x in 0..nn {
        let mut mult = vec![0; nn];
        mult[1] += nn - 1;
        mult[x] += 1;
        out.push(FamilyInstance {
            family: 1,
            n: nn,
            params: FamilyParams::X { x },
            seq: ResidueSequence::from_mult_unchecked(n, mult),
        });
    }
    if nn % 2 == 1 {
        let q = (nn - 1) / 2;
        let mut mult = vec![0; nn];
        mult[1] = nn - 2;
        mult[q + 1] += 2;
        out.push(FamilyInstance {
            family: 2,
            n: nn,
            params: FamilyParams::Q { q },
            seq: ResidueSequence::from_mult_unchecked(n, mult),
        });
    } else {
        let q = nn / 2;
        for r in (1..q).step_by(2) {
            let mut mult = vec![0; nn];
            mult[2] = q + r;
            mult[1] = q - r;
            out.push(FamilyInstance {
                family: 3,
                n: nn,
                params: FamilyParams::QR { q, r },
                seq: ResidueSequence::from_mult_unchecked(n, mult),
            });
        }
    }
    Ok(out)
}

/// Runs every family instance for `n` in `[n_min, n_max]` through
/// [`is_graham`]. Instances that are not `Unique` are reported with
/// `matches_claim = false`.
pub fn check_families(n_min: usize, n_max: usize) -> Result<Vec<FamilyVerdict>> {
    if n_min < 2 || n_min > n_max {
        return Err(Error::HypothesisViolated(format!(
            "need 2 <= n_min <= n_max, got [{n_min}, {n_max}]"
        )));
    }
    let mut out = Vec::new();
    for n in n_min..=n_max {
        for instance in family_sequences(Modulus::new(n)?)? {
            let verdict = is_graham(&instance.seq);
            let matches_claim = verdict.is_unique();
            out.push(FamilyVerdict {
                instance,
                verdict,
                matches_claim,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaCReport {
    pub n: usize,
    pub checked: usize,
    /// Two-valued sequences of length `n - 1` with no zero-sum subsequence.
    pub failures: Vec<ResidueSequence>,
}

/// Every sequence of `n - 1` terms taking exactly two distinct values.
pub fn lemma_c_sweep(n: Modulus) -> Result<LemmaCReport> {
    let nn = n.get();
    if nn < 2 {
        return Err(Error::DegenerateModulus(nn));
    }
    let mut checked = 0;
    let mut failures = Vec::new();
    for a in 0..nn {
        for b in a + 1..nn {
            for ca in 1..nn.saturating_sub(1) {
                let mut mult = vec![0; nn];
                mult[a] = ca;
                mult[b] = nn - 1 - ca;
                let seq = ResidueSequence::from_mult_unchecked(n, mult);
                checked += 1;
                if is_zero_sum_free(&seq) {
                    failures.push(seq);
                }
            }
        }
    }
    Ok(LemmaCReport {
        n: nn,
        checked,
        failures,
    })
}

pub fn verify_lemma_c(n: Modulus) -> Result<bool> {
    Ok(lemma_c_sweep(n)?.failures.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn md(n: usize) -> Modulus {
        Modulus::new(n).unwrap()
    }

    fn seq(values: &[i64], n: usize) -> ResidueSequence {
        ResidueSequence::new(values, md(n)).unwrap()
    }

    #[test]
    fn graham_examples() {
        assert_eq!(
            is_graham(&seq(&[1, 1, 1, 1, 3], 5)),
            GrahamVerdict::Unique(3)
        );
        assert_eq!(
            is_graham(&seq(&[1, 1, 1, 1, 1, 4, 4], 7)),
            GrahamVerdict::Unique(4)
        );
        assert_eq!(
            is_graham(&seq(&[1, 2, 3, 3], 4)),
            GrahamVerdict::Multiple(vec![2, 3])
        );
        assert_eq!(is_graham(&seq(&[3, 3], 7)), GrahamVerdict::NoZeroSum);
        assert_eq!(
            GrahamVerdict::Multiple(vec![2, 3]).to_string(),
            "Multiple({2,3})"
        );
    }

    #[test]
    fn search_space_counts() {
        assert_eq!(count_search_space(md(4)), (35, 13));
        assert_eq!(count_search_space(md(1)), (1, 0));
        assert_eq!(count_search_space(md(2)), (3, 0));
    }

    #[test]
    fn search_space_matches_enumeration() {
        for n in 1..=7 {
            let mut t = vec![0; n];
            let (mut total, mut ge3) = (1u128, 0u128);
            let distinct = |t: &[usize]| 1 + t.windows(2).filter(|w| w[0] != w[1]).count();
            if distinct(&t) >= 3 {
                ge3 += 1;
            }
            while advance(&mut t, n) {
                total += 1;
                if distinct(&t) >= 3 {
                    ge3 += 1;
                }
            }
            assert_eq!(count_search_space(md(n)), (total, ge3), "n = {n}");
        }
    }

    #[test]
    fn unrank_walks_the_order() {
        let n = 5;
        let mut t = vec![0; n];
        let mut rank = 0u128;
        loop {
            assert_eq!(unrank(n, n, rank), t);
            rank += 1;
            if !advance(&mut t, n) {
                break;
            }
        }
        assert_eq!(rank, count_search_space(md(n)).0);
    }

    #[test]
    fn verify_small_moduli() {
        let r = verify_theorem(md(1), 1, VerifyOptions::default()).unwrap();
        assert_eq!((r.total, r.examined), (1, 0));
        assert!(r.is_clean());
        for n in [5, 8] {
            let r = verify_theorem(md(n), 1, VerifyOptions::default()).unwrap();
            assert!(r.is_clean(), "n = {n}: {:?}", r.counterexamples);
            assert_eq!(r.total, count_search_space(md(n)).0);
            assert_eq!(
                r.total,
                r.skipped_two_valued + r.skipped_noncanonical + r.examined
            );
        }
    }

    #[test]
    fn unpruned_sweep_finds_family_one() {
        let opts = VerifyOptions {
            canonical: false,
            prune_two_valued: false,
            chunk_size: 7,
        };
        let r = verify_theorem(md(6), 2, opts).unwrap();
        assert_eq!(r.examined, r.total);
        // 1^5 x for every x
        for x in 0..6 {
            let mut v = vec![1i64; 5];
            v.push(x);
            let s = seq(&v, 6);
            assert!(r.graham.iter().any(|g| g.seq == s), "missing {s:?}");
        }
        assert!(r.is_clean());
    }

    #[test]
    fn family_generation() {
        let f5 = family_sequences(md(5)).unwrap();
        assert_eq!(f5.iter().filter(|f| f.family == 1).count(), 5);
        assert_eq!(f5.iter().filter(|f| f.family == 3).count(), 0);
        let fam2: Vec<_> = f5.iter().filter(|f| f.family == 2).collect();
        assert_eq!(fam2.len(), 1);
        assert_eq!(fam2[0].seq, seq(&[1, 1, 1, 3, 3], 5));

        let f6 = family_sequences(md(6)).unwrap();
        assert!(f6
            .iter()
            .any(|f| f.family == 3 && f.seq == seq(&[2, 2, 2, 2, 1, 1], 6)));

        let f2 = family_sequences(md(2)).unwrap();
        assert_eq!(
            f2.iter().map(|f| f.seq.clone()).collect::<Vec<_>>(),
            vec![seq(&[1, 0], 2), seq(&[1, 1], 2)]
        );
    }

    #[test]
    fn family_checks() {
        let v = check_families(5, 7).unwrap();
        let f1 = v
            .iter()
            .find(|f| f.instance.n == 5 && f.instance.params == FamilyParams::X { x: 3 })
            .unwrap();
        assert_eq!(f1.verdict, GrahamVerdict::Unique(3));
        assert!(f1.matches_claim);
        let f2 = v
            .iter()
            .find(|f| f.instance.n == 7 && f.instance.family == 2)
            .unwrap();
        assert_eq!(f2.verdict, GrahamVerdict::Unique(4));
        let f3 = v
            .iter()
            .find(|f| f.instance.n == 6 && f.instance.family == 3)
            .unwrap();
        assert_eq!(f3.verdict, GrahamVerdict::Multiple(vec![3, 4]));
        assert!(!f3.matches_claim);
        assert!(check_families(1, 3).is_err());
        assert!(check_families(5, 4).is_err());
    }

    #[test]
    fn lemma_c_examples() {
        assert!(verify_lemma_c(md(6)).unwrap());
        let r2 = lemma_c_sweep(md(2)).unwrap();
        assert_eq!(r2.checked, 0);
        assert!(r2.failures.is_empty());
        assert!(verify_lemma_c(md(12)).unwrap());
    }

    #[test]
    fn report_jsonl_shape() {
        let opts = VerifyOptions {
            canonical: true,
            prune_two_valued: false,
            chunk_size: 64,
        };
        let r = verify_theorem(md(4), 1, opts).unwrap();
        let text = r.to_jsonl(false);
        let lines: Vec<serde_json::Value> = text
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(lines.len(), r.graham.len() + 1);
        assert_eq!(lines.last().unwrap()["kind"], "report");
        assert!(lines.last().unwrap().get("wall_time_ms").is_none());
        assert_eq!(lines[0]["verdict"], "unique");
    }
}
