//! Zero-sum-free structure: short zero-sum witnesses, unit-rescaling
//! certificates for long zero-sum-free sequences, pruned enumeration of
//! zero-sum-free multisets, and the greedy constructions for sequences of
//! the shape `1^v a_1 ... a_t`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::residue::{units, Modulus, ResidueSequence, SubseqWitness};
use crate::spectrum::{self, compute_spectrum};

pub fn is_zero_sum_free(seq: &ResidueSequence) -> bool {
    spectrum::zero_sum_lengths_early(seq).is_empty()
}

/// A nonempty zero-sum subsequence of length at most `h(S)` for a sequence of
/// exactly `n` terms.
///
/// Picks the shortest such subsequence, breaking ties by the lexicographically
/// least sorted value tuple.
pub fn find_short_zero_sum(seq: &ResidueSequence) -> Result<SubseqWitness> {
    if seq.len() != seq.n() {
        return Err(Error::HypothesisViolated(format!(
            "short zero-sum search needs exactly n = {} terms, got {}",
            seq.n(),
            seq.len()
        )));
    }
    let shortest = compute_spectrum(seq)
        .zero_sum_lengths()
        .first()
        .copied()
        .ok_or_else(|| Error::Internal(format!("{seq:?} has no zero-sum subsequence")))?;
    if shortest > seq.h_max() {
        return Err(Error::Internal(format!(
            "shortest zero-sum subsequence of {seq:?} has length {shortest} > h = {}",
            seq.h_max()
        )));
    }
    spectrum::find_lex_least_witness(seq, 0, shortest)
}

/// Unit `m` and the least positive residues `b_i` of `m * a_i`, with
/// `b_1 + ... + b_t < n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZsfCertificate {
    pub n: usize,
    pub t: usize,
    pub m: usize,
    /// Sorted ascending.
    pub b: Vec<usize>,
    pub total: u64,
}

impl ZsfCertificate {
    /// Checks the certificate against `seq` without trusting how it was made.
    pub fn validate(&self, seq: &ResidueSequence) -> Result<()> {
        let fail = |why: String| {
            Err(Error::HypothesisViolated(format!(
                "certificate {self}: {why}"
            )))
        };
        let n = seq.modulus();
        if self.n != n.get() {
            return fail(format!(
                "modulus {} differs from sequence modulus {n}",
                self.n
            ));
        }
        if !n.is_unit(self.m as i64) {
            return fail(format!("{} is not a unit", self.m));
        }
        if self.t != seq.len() || self.b.len() != self.t {
            return fail(format!("expected {} terms", seq.len()));
        }
        if self.b.iter().any(|&b| b == 0 || b >= self.n) {
            return fail("a term lies outside [1, n-1]".into());
        }
        let sum: u64 = self.b.iter().map(|&b| b as u64).sum();
        if sum != self.total || self.total >= self.n as u64 {
            return fail(format!("total {sum} is not below n"));
        }
        let image = seq.rescale(self.m as i64)?;
        if image != ResidueSequence::from_residues(n, &self.b) {
            return fail(format!("b does not match {}*S = {image}", self.m));
        }
        Ok(())
    }
}

impl fmt::Display for ZsfCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m={} b=(", self.m)?;
        for (i, b) in self.b.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ") total={} (mod {})", self.total, self.n)
    }
}

/// Finds the unit rescaling that turns a long zero-sum-free sequence into
/// positive integers with sum below `n`.
///
/// Every unit is scanned. The certificate with the smallest total wins, ties
/// going to the smallest `m`.
pub fn theorem_d_certificate(seq: &ResidueSequence) -> Result<ZsfCertificate> {
    let n = seq.n();
    let t = seq.len();
    if seq.multiplicity(0) > 0 {
        return Err(Error::HypothesisViolated(format!("{seq:?} contains 0")));
    }
    if 2 * t < n + 1 {
        return Err(Error::HypothesisViolated(format!(
            "need at least (n+1)/2 terms, got {t} for n = {n}"
        )));
    }
    if !is_zero_sum_free(seq) {
        return Err(Error::HypothesisViolated(format!(
            "{seq:?} has a zero-sum subsequence"
        )));
    }
    // n >= 2 here: t >= 1 and no term is 0.
    let mut best: Option<(u64, usize)> = None;
    for m in units(seq.modulus())? {
        let total: u64 = seq
            .mult()
            .iter()
            .enumerate()
            .map(|(v, &c)| ((v * m) % n) as u64 * c as u64)
            .sum();
        if total < n as u64 && best.is_none_or(|(bt, _)| total < bt) {
            best = Some((total, m));
        }
    }
    let (total, m) = best.ok_or_else(|| Error::TheoremDFailure {
        n,
        seq: seq.to_string(),
    })?;
    let b = seq.rescale(m as i64)?.to_sorted_vec();
    Ok(ZsfCertificate { n, t, m, b, total })
}

/// Largest modulus [`ZsfEnumerator`] supports (one `u128` of residues).
pub const ZSF_MAX_N: usize = 128;

/// Depth-first stream of the zero-sum-free multisets over `[1, n-1]`.
///
/// Multisets are visited as nondecreasing tuples in lexicographic order. A
/// branch is cut as soon as its multiset has a zero-sum subsequence, or when
/// the residues still unreached leave too little room to grow to `min_len`:
/// each term added to a zero-sum-free sequence reaches at least one new sum.
///
/// The current value stack doubles as a cursor; [`ZsfEnumerator::resume`]
/// continues strictly after it.
#[derive(Debug, Clone)]
pub struct ZsfEnumerator {
    n: usize,
    min_len: usize,
    mask: u128,
    path: Vec<usize>,
    // reach[k]: sums of all subsequences of path[..k], empty one included
    reach: Vec<u128>,
    next_try: usize,
    started: bool,
}

pub fn enumerate_zsf(n: Modulus, min_len: usize) -> Result<ZsfEnumerator> {
    ZsfEnumerator::new(n, min_len)
}

impl ZsfEnumerator {
    pub fn new(n: Modulus, min_len: usize) -> Result<Self> {
        let n = n.get();
        if !(2..=ZSF_MAX_N).contains(&n) {
            return Err(Error::HypothesisViolated(format!(
                "zero-sum-free enumeration supports 2 <= n <= {ZSF_MAX_N}, got {n}"
            )));
        }
        let mask = if n == 128 {
            u128::MAX
        } else {
            (1u128 << n) - 1
        };
        Ok(ZsfEnumerator {
            n,
            min_len,
            mask,
            path: Vec::new(),
            reach: vec![1],
            next_try: 1,
            started: false,
        })
    }

    /// Restarts after `cursor`, a path previously reported by
    /// [`cursor`](Self::cursor).
    pub fn resume(n: Modulus, min_len: usize, cursor: &[usize]) -> Result<Self> {
        let mut it = Self::new(n, min_len)?;
        let mut last = 1;
        for &v in cursor {
            if v < last || v >= it.n {
                return Err(Error::HypothesisViolated(format!(
                    "cursor {cursor:?} is not a nondecreasing tuple over [1, {}]",
                    it.n - 1
                )));
            }
            let r = *it.reach.last().unwrap();
            let Some(next) = it.extend(r, v) else {
                return Err(Error::HypothesisViolated(format!(
                    "cursor {cursor:?} is not zero-sum-free"
                )));
            };
            it.path.push(v);
            it.reach.push(next);
            last = v;
        }
        it.next_try = last;
        it.started = true;
        Ok(it)
    }

    pub fn cursor(&self) -> &[usize] {
        &self.path
    }

    /// Cursor in text form: the value stack, comma separated.
    pub fn cursor_string(&self) -> String {
        format_cursor(&self.path)
    }

    #[inline]
    fn rotate(&self, r: u128, v: usize) -> u128 {
        ((r << v) | (r >> (self.n - v))) & self.mask
    }

    /// Reach set after appending `v`, or `None` if that creates a zero sum.
    #[inline]
    fn extend(&self, r: u128, v: usize) -> Option<u128> {
        // a new zero sum appears iff -v was already reachable
        if r >> (self.n - v) & 1 == 1 {
            return None;
        }
        Some(r | self.rotate(r, v))
    }
}

impl Iterator for ZsfEnumerator {
    type Item = ResidueSequence;

    fn next(&mut self) -> Option<ResidueSequence> {
        let n = self.n;
        if !self.started {
            self.started = true;
            if self.min_len == 0 {
                return Some(ResidueSequence::from_residues(Modulus::new(n).ok()?, &[]));
            }
        }
        loop {
            let r = *self.reach.last().unwrap();
            let len = self.path.len() + 1;
            let mut found = None;
            for v in self.next_try..n {
                if let Some(next) = self.extend(r, v) {
                    let room = n - next.count_ones() as usize;
                    if len + room >= self.min_len {
                        found = Some((v, next));
                        break;
                    }
                }
            }
            match found {
                Some((v, next)) => {
                    self.path.push(v);
                    self.reach.push(next);
                    self.next_try = v;
                    if len >= self.min_len {
                        let modulus = Modulus::new(n).ok()?;
                        return Some(ResidueSequence::from_residues(modulus, &self.path));
                    }
                }
                None => {
                    let v = self.path.pop()?;
                    self.reach.pop();
                    self.next_try = v + 1;
                }
            }
        }
    }
}

pub fn format_cursor(path: &[usize]) -> String {
    path.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn parse_cursor(text: &str) -> Result<Vec<usize>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::HypothesisViolated(format!("bad cursor term {t:?}")))
        })
        .collect()
}

/// A sequence `1^v a_1 ... a_t` of positive integers together with the gap
/// parameter `j`, satisfying `v + t >= (n+1)/2`, `t >= 1`,
/// `2 <= a_1 <= ... <= a_t` and `v + sum(a) <= n - j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lemma31Instance {
    n: usize,
    j: usize,
    v: usize,
    a: Vec<usize>,
}

impl Lemma31Instance {
    pub fn new(n: usize, j: usize, v: usize, a: Vec<usize>) -> Result<Self> {
        let bad = |why: &str| {
            Err(Error::HypothesisViolated(format!(
                "instance n={n} j={j} v={v} a={a:?}: {why}"
            )))
        };
        if n == 0 {
            return Err(Error::InvalidModulus);
        }
        if j == 0 {
            return bad("j must be positive");
        }
        if a.is_empty() {
            return bad("need t >= 1");
        }
        if a[0] < 2 || a.windows(2).any(|w| w[0] > w[1]) {
            return bad("a must be nondecreasing with a_1 >= 2");
        }
        if 2 * (v + a.len()) < n + 1 {
            return bad("need v + t >= (n+1)/2");
        }
        let total = v + a.iter().sum::<usize>();
        if total + j > n {
            return bad("need v + sum(a) <= n - j");
        }
        Ok(Lemma31Instance { n, j, v, a })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn a(&self) -> &[usize] {
        &self.a
    }

    /// `v + a_1 + ... + a_t`.
    pub fn total(&self) -> usize {
        self.v + self.a.iter().sum::<usize>()
    }

    /// The full sequence `1^v a_1 ... a_t` as residues mod `n`.
    pub fn to_sequence(&self) -> ResidueSequence {
        let mut values = vec![1; self.v];
        values.extend_from_slice(&self.a);
        ResidueSequence::from_residues(self.modulus(), &values)
    }

    fn modulus(&self) -> Modulus {
        Modulus::new(self.n).expect("validated at construction")
    }

    /// The given `a` terms plus `ones` copies of 1.
    fn witness(&self, a_terms: &[usize], ones: usize) -> SubseqWitness {
        let mut values = vec![1; ones];
        values.extend_from_slice(a_terms);
        SubseqWitness::from_residues(self.modulus(), &values)
    }
}

/// `v >= a_t + ... + a_{t-j+1} - j + 1`. When `j > t` all of `a` is summed.
pub fn lemma31_check_i(inst: &Lemma31Instance) -> bool {
    let t = inst.a.len();
    let top: usize = inst.a[t - inst.j.min(t)..].iter().sum();
    inst.v + inst.j > top
}

/// A subsequence with true sum exactly `k` and at least two terms, for any
/// `k` in `[2, v + sum(a)]`.
///
/// For `k <= a_t` this is `1^k`; otherwise the longest prefix of `a` with sum
/// at most `k`, padded with ones.
pub fn lemma31_construct_ii(inst: &Lemma31Instance, k: usize) -> Result<SubseqWitness> {
    if !(2..=inst.total()).contains(&k) {
        return Err(Error::HypothesisViolated(format!(
            "k = {k} outside [2, {}]",
            inst.total()
        )));
    }
    let a = &inst.a;
    let a_t = *a.last().unwrap();
    let (prefix, pad) = if k <= a_t {
        (0, k)
    } else {
        let (len, sum) = longest_prefix(a, k);
        (len, k - sum)
    };
    if pad > inst.v {
        return Err(Error::Internal(format!(
            "needs {pad} ones but v = {}",
            inst.v
        )));
    }
    Ok(inst.witness(&a[..prefix], pad))
}

/// Two subsequences with true sum exactly `k` and different lengths, longer
/// one first, for `k` in `[a_1, v + a_2 + ... + a_t]`. Requires
/// `v + sum(a) <= n - 2`.
pub fn lemma31_construct_iii(
    inst: &Lemma31Instance,
    k: usize,
) -> Result<(SubseqWitness, SubseqWitness)> {
    let a = &inst.a;
    let t = a.len();
    if inst.total() + 2 > inst.n {
        return Err(Error::HypothesisViolated(format!(
            "need v + sum(a) <= n - 2, got {} with n = {}",
            inst.total(),
            inst.n
        )));
    }
    let hi = inst.total() - a[0];
    if !(a[0]..=hi).contains(&k) {
        return Err(Error::HypothesisViolated(format!(
            "k = {k} outside [{}, {hi}]",
            a[0]
        )));
    }
    let ones = |count: usize| -> Result<usize> {
        if count > inst.v {
            Err(Error::Internal(format!(
                "needs {count} ones but v = {}",
                inst.v
            )))
        } else {
            Ok(count)
        }
    };
    if t == 1 {
        // trade a_1 for a_1 ones
        let long = inst.witness(&[], ones(k)?);
        let short = inst.witness(&a[..1], ones(k - a[0])?);
        return Ok((long, short));
    }
    let (s, sum_s) = longest_prefix(a, k);
    if s == t {
        let long = inst.witness(&a[1..], ones(k - (sum_s - a[0]))?);
        let short = inst.witness(a, ones(k - sum_s)?);
        Ok((long, short))
    } else {
        let sum_before = sum_s - a[s - 1];
        let long = inst.witness(&a[..s - 1], ones(k - sum_before)?);
        let short = inst.witness(&a[..s], ones(k - sum_s)?);
        Ok((long, short))
    }
}

/// Largest `l` with `a_1 + ... + a_l <= k`, and that prefix sum.
fn longest_prefix(a: &[usize], k: usize) -> (usize, usize) {
    let mut sum = 0;
    for (i, &x) in a.iter().enumerate() {
        if sum + x > k {
            return (i, sum);
        }
        sum += x;
    }
    (a.len(), sum)
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

    fn sorted(w: &SubseqWitness) -> Vec<usize> {
        w.as_sequence().to_sorted_vec()
    }

    #[test]
    fn zero_sum_free_examples() {
        assert!(is_zero_sum_free(&seq(&[3, 3, 3, 3], 7)));
        assert!(!is_zero_sum_free(&seq(&[2, 2], 4)));
        assert!(!is_zero_sum_free(&seq(&[1, 1, 1, 1, 3], 5)));
        assert!(is_zero_sum_free(&seq(&[], 5)));
    }

    #[test]
    fn short_zero_sum_examples() {
        let w = find_short_zero_sum(&seq(&[1, 3, 2, 2], 4)).unwrap();
        assert_eq!(sorted(&w), vec![1, 3]);
        let w = find_short_zero_sum(&seq(&[0, 1, 2, 3, 4], 5)).unwrap();
        assert_eq!(sorted(&w), vec![0]);
        let w = find_short_zero_sum(&seq(&[1; 6], 6)).unwrap();
        assert_eq!(sorted(&w), vec![1; 6]);
        assert!(matches!(
            find_short_zero_sum(&seq(&[1, 1], 4)),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn certificate_examples() {
        let c = theorem_d_certificate(&seq(&[3, 3, 3, 3], 7)).unwrap();
        assert_eq!((c.m, c.b.clone(), c.total), (5, vec![1, 1, 1, 1], 4));
        let c = theorem_d_certificate(&seq(&[1, 1, 1], 5)).unwrap();
        assert_eq!((c.m, c.b.clone(), c.total), (1, vec![1, 1, 1], 3));
        let c = theorem_d_certificate(&seq(&[5, 5, 5, 5], 6)).unwrap();
        assert_eq!((c.m, c.b.clone(), c.total), (5, vec![1, 1, 1, 1], 4));
        c.validate(&seq(&[5, 5, 5, 5], 6)).unwrap();
        assert_eq!(
            serde_json::to_string(&c).unwrap(),
            r#"{"n":6,"t":4,"m":5,"b":[1,1,1,1],"total":4}"#
        );
    }

    #[test]
    fn certificate_preconditions() {
        for bad in [seq(&[0, 1, 1], 5), seq(&[1, 1], 5), seq(&[2, 2, 2], 4)] {
            assert!(matches!(
                theorem_d_certificate(&bad),
                Err(Error::HypothesisViolated(_))
            ));
        }
    }

    #[test]
    fn certificate_validation_rejects_tampering() {
        let t = seq(&[3, 3, 3, 3], 7);
        let good = theorem_d_certificate(&t).unwrap();
        let mut c = good.clone();
        c.m = 1;
        assert!(c.validate(&t).is_err());
        let mut c = good.clone();
        c.total = 5;
        assert!(c.validate(&t).is_err());
        let mut c = good;
        c.b = vec![1, 1, 2];
        assert!(c.validate(&t).is_err());
    }

    fn zsf_tuples(n: usize, min_len: usize) -> Vec<Vec<usize>> {
        enumerate_zsf(md(n), min_len)
            .unwrap()
            .map(|s| s.to_sorted_vec())
            .collect()
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(zsf_tuples(3, 2), vec![vec![1, 1], vec![2, 2]]);
        assert_eq!(zsf_tuples(2, 1), vec![vec![1]]);
        assert_eq!(zsf_tuples(4, 3), vec![vec![1, 1, 1], vec![3, 3, 3]]);
        assert_eq!(zsf_tuples(3, 0).len(), 5);
        assert!(enumerate_zsf(md(1), 0).is_err());
    }

    #[test]
    fn enumerate_resume_continues_after_cursor() {
        let all: Vec<_> = enumerate_zsf(md(9), 3).unwrap().collect();
        let mut it = enumerate_zsf(md(9), 3).unwrap();
        for _ in 0..17 {
            it.next();
        }
        let cursor = parse_cursor(&it.cursor_string()).unwrap();
        let rest: Vec<_> = ZsfEnumerator::resume(md(9), 3, &cursor).unwrap().collect();
        assert_eq!(rest, all[17..].to_vec());
        assert!(ZsfEnumerator::resume(md(9), 3, &[3, 6]).is_err());
        assert!(ZsfEnumerator::resume(md(9), 3, &[4, 3]).is_err());
    }

    fn inst(n: usize, j: usize, v: usize, a: &[usize]) -> Lemma31Instance {
        Lemma31Instance::new(n, j, v, a.to_vec()).unwrap()
    }

    #[test]
    fn lemma31_instance_validation() {
        assert!(Lemma31Instance::new(14, 0, 6, vec![3, 4]).is_err());
        assert!(Lemma31Instance::new(14, 1, 6, vec![]).is_err());
        assert!(Lemma31Instance::new(14, 1, 6, vec![4, 3]).is_err());
        assert!(Lemma31Instance::new(14, 1, 6, vec![1, 3]).is_err());
        assert!(Lemma31Instance::new(14, 1, 2, vec![3, 4]).is_err());
        assert!(Lemma31Instance::new(14, 5, 6, vec![3, 4]).is_err());
        assert_eq!(inst(14, 1, 6, &[3, 4]).to_sequence().to_string(), "1^6,3,4");
    }

    #[test]
    fn check_i_examples() {
        assert!(lemma31_check_i(&inst(14, 1, 6, &[3, 4])));
        assert!(lemma31_check_i(&inst(14, 2, 7, &[2, 3])));
        assert!(lemma31_check_i(&inst(5, 1, 2, &[2])));
    }

    #[test]
    fn construct_ii_examples() {
        let i = inst(14, 1, 6, &[3, 4]);
        assert_eq!(sorted(&lemma31_construct_ii(&i, 2).unwrap()), vec![1, 1]);
        assert_eq!(
            sorted(&lemma31_construct_ii(&i, 9).unwrap()),
            vec![1, 1, 3, 4]
        );
        assert_eq!(
            sorted(&lemma31_construct_ii(&i, 4).unwrap()),
            vec![1, 1, 1, 1]
        );
        assert!(lemma31_construct_ii(&i, 1).is_err());
        assert!(lemma31_construct_ii(&i, 14).is_err());
    }

    #[test]
    fn construct_iii_examples() {
        let i = inst(15, 2, 6, &[3, 4]);
        let (l, s) = lemma31_construct_iii(&i, 7).unwrap();
        assert_eq!((sorted(&l), sorted(&s)), (vec![1, 1, 1, 4], vec![3, 4]));
        let (l, s) = lemma31_construct_iii(&i, 3).unwrap();
        assert_eq!((sorted(&l), sorted(&s)), (vec![1, 1, 1], vec![3]));
        let (l, s) = lemma31_construct_iii(&i, 10).unwrap();
        assert_eq!(
            (sorted(&l), sorted(&s)),
            (vec![1, 1, 1, 1, 1, 1, 4], vec![1, 1, 1, 3, 4])
        );
        assert!(lemma31_construct_iii(&i, 2).is_err());
        assert!(lemma31_construct_iii(&i, 11).is_err());
        // v + sum(a) = n - 1 is outside part (iii)
        assert!(lemma31_construct_iii(&inst(14, 1, 6, &[3, 4]), 5).is_err());
    }

    #[test]
    fn construct_iii_single_term() {
        let i = inst(9, 2, 5, &[2]);
        for k in 2..=5 {
            let (l, s) = lemma31_construct_iii(&i, k).unwrap();
            assert_eq!(l.sigma(), k as u64);
            assert_eq!(s.sigma(), k as u64);
            assert!(l.len() > s.len());
        }
    }
}
