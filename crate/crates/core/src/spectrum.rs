//! Reachability of (sum residue, length) pairs by subsequences.
//!
//! Each residue row is a bitset over lengths `0..=L`. Inserting one term `v`
//! updates every row at once: `row[s] |= row[s - v] << 1`. Terms are inserted
//! copy by copy in ascending value order.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::residue::{Modulus, ResidueSequence, SubseqWitness};

/// Largest sequence the brute-force oracle accepts.
pub const ORACLE_MAX_LEN: usize = 20;

/// Which `(s, l)` pairs some subsequence achieves: sum `≡ s (mod n)` and
/// exactly `l` terms. Length 0 is included so the empty subsequence shows up
/// as `(0, 0)`.
#[derive(Clone, PartialEq, Eq)]
pub struct LengthSpectrum {
    modulus: Modulus,
    len: usize,
    words: usize,
    bits: Vec<u64>,
}

impl LengthSpectrum {
    fn empty(modulus: Modulus, len: usize) -> Self {
        let words = len / 64 + 1;
        let mut bits = vec![0u64; modulus.get() * words];
        bits[0] = 1;
        LengthSpectrum {
            modulus,
            len,
            words,
            bits,
        }
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    /// Length of the parent sequence.
    pub fn parent_len(&self) -> usize {
        self.len
    }

    fn row(&self, s: usize) -> &[u64] {
        &self.bits[s * self.words..(s + 1) * self.words]
    }

    pub fn achievable(&self, residue: usize, len: usize) -> bool {
        residue < self.modulus.get()
            && len <= self.len
            && self.row(residue)[len / 64] >> (len % 64) & 1 == 1
    }

    /// Achievable lengths for one residue, ascending (includes 0 for row 0).
    pub fn lengths(&self, residue: usize) -> Vec<usize> {
        let row = self.row(residue);
        (0..=self.len)
            .filter(|&l| row[l / 64] >> (l % 64) & 1 == 1)
            .collect()
    }

    /// Lengths of nonempty subsequences summing to 0 mod n.
    pub fn zero_sum_lengths(&self) -> Vec<usize> {
        self.lengths(0).into_iter().filter(|&l| l > 0).collect()
    }

    /// Inserts one more term. `scratch` is reused across calls.
    fn insert(&mut self, value: usize, scratch: &mut Vec<u64>) {
        let n = self.modulus.get();
        let w = self.words;
        scratch.clear();
        scratch.extend_from_slice(&self.bits);
        for s in 0..n {
            let src = (s + n - value) % n;
            let from = &scratch[src * w..(src + 1) * w];
            let to = &mut self.bits[s * w..(s + 1) * w];
            let mut carry = 0u64;
            for k in 0..w {
                to[k] |= (from[k] << 1) | carry;
                carry = from[k] >> 63;
            }
        }
    }

    fn zero_row_bits(&self) -> usize {
        // nonempty lengths only
        self.row(0)
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum::<usize>()
            - 1
    }

    pub fn to_record(&self) -> SpectrumRecord {
        SpectrumRecord {
            n: self.modulus.get(),
            len: self.len,
            lengths: (0..self.modulus.get()).map(|s| self.lengths(s)).collect(),
        }
    }
}

impl std::fmt::Debug for LengthSpectrum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut m = f.debug_map();
        for s in 0..self.modulus.get() {
            m.entry(&s, &self.lengths(s));
        }
        m.finish()
    }
}

/// JSON shape of a spectrum: `{"n":..,"L":..,"lengths":[[..],..]}` with one
/// sorted length array per residue.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpectrumRecord {
    pub n: usize,
    #[serde(rename = "L")]
    pub len: usize,
    pub lengths: Vec<Vec<usize>>,
}

fn build(seq: &ResidueSequence, stop_after_zero_lengths: Option<usize>) -> LengthSpectrum {
    let mut spec = LengthSpectrum::empty(seq.modulus(), seq.len());
    let mut scratch = Vec::with_capacity(spec.bits.len());
    for v in seq.values() {
        spec.insert(v, &mut scratch);
        if let Some(limit) = stop_after_zero_lengths {
            if spec.zero_row_bits() >= limit {
                break;
            }
        }
    }
    spec
}

/// Exact spectrum by the reachable-set DP.
pub fn compute_spectrum(seq: &ResidueSequence) -> LengthSpectrum {
    build(seq, None)
}

pub fn zero_sum_lengths(seq: &ResidueSequence) -> Vec<usize> {
    if let Some(mask) = small::zero_sum_mask(seq, false) {
        return small::mask_lengths(mask);
    }
    compute_spectrum(seq).zero_sum_lengths()
}

/// Like [`zero_sum_lengths`] but may return as soon as two distinct lengths
/// are known. The result is exact whenever it has fewer than two entries.
pub fn zero_sum_lengths_early(seq: &ResidueSequence) -> Vec<usize> {
    if let Some(mask) = small::zero_sum_mask(seq, true) {
        return small::mask_lengths(mask);
    }
    build(seq, Some(2)).zero_sum_lengths()
}

/// Enumerates all `2^L` subsequences of the expanded sequence. Test oracle.
pub fn naive_spectrum(seq: &ResidueSequence) -> Result<LengthSpectrum> {
    let len = seq.len();
    if len > ORACLE_MAX_LEN {
        return Err(Error::OracleTooLarge {
            len,
            max: ORACLE_MAX_LEN,
        });
    }
    let n = seq.n();
    let items: Vec<usize> = seq.values().collect();
    let mut spec = LengthSpectrum::empty(seq.modulus(), len);
    for mask in 0u32..(1u32 << len) {
        let mut sum = 0usize;
        for (i, &v) in items.iter().enumerate() {
            if mask >> i & 1 == 1 {
                sum += v;
            }
        }
        let s = sum % n;
        let l = mask.count_ones() as usize;
        spec.bits[s * spec.words + l / 64] |= 1 << (l % 64);
    }
    Ok(spec)
}

/// A subsequence with sum `≡ residue (mod n)` and exactly `len` terms.
///
/// Walks the ascending insertion order backwards, rebuilding the prefix
/// spectrum at each step. A term is skipped whenever the shorter prefix can
/// still reach the target, so smaller values are preferred.
pub fn find_witness(seq: &ResidueSequence, residue: usize, len: usize) -> Result<SubseqWitness> {
    let n = seq.n();
    let not_achievable = Error::NotAchievable { n, residue, len };
    if residue >= n || !compute_spectrum(seq).achievable(residue, len) {
        return Err(not_achievable);
    }
    let items: Vec<usize> = seq.values().collect();
    let mut target = (residue, len);
    let mut picked = Vec::with_capacity(len);
    for i in (0..items.len()).rev() {
        if target.1 == 0 {
            break;
        }
        let prefix = ResidueSequence::from_residues(seq.modulus(), &items[..i]);
        if compute_spectrum(&prefix).achievable(target.0, target.1) {
            continue;
        }
        let v = items[i];
        picked.push(v);
        target = ((target.0 + n - v) % n, target.1 - 1);
    }
    if target != (0, 0) {
        return Err(Error::Internal(format!(
            "witness reconstruction for ({residue}, {len}) in {seq} stopped at {target:?}"
        )));
    }
    Ok(SubseqWitness::from_residues(seq.modulus(), &picked))
}

/// The subsequence with sum `≡ residue` and `len` terms whose sorted value
/// tuple is lexicographically least.
///
/// Greedy over the ascending terms: take a term whenever the remaining target
/// is still reachable by the terms after it.
pub fn find_lex_least_witness(
    seq: &ResidueSequence,
    residue: usize,
    len: usize,
) -> Result<SubseqWitness> {
    let n = seq.n();
    if residue >= n || len > seq.len() {
        return Err(Error::NotAchievable { n, residue, len });
    }
    let items: Vec<usize> = seq.values().collect();
    // suffix[i] = spectrum of items[i..]
    let mut suffix = Vec::with_capacity(items.len() + 1);
    let mut cur = LengthSpectrum::empty(seq.modulus(), items.len());
    let mut scratch = Vec::new();
    suffix.push(cur.clone());
    for &v in items.iter().rev() {
        cur.insert(v, &mut scratch);
        suffix.push(cur.clone());
    }
    suffix.reverse();
    if !suffix[0].achievable(residue, len) {
        return Err(Error::NotAchievable { n, residue, len });
    }
    let mut target = (residue, len);
    let mut picked = Vec::with_capacity(len);
    for (i, &v) in items.iter().enumerate() {
        if target.1 == 0 {
            break;
        }
        let rest = ((target.0 + n - v) % n, target.1 - 1);
        if suffix[i + 1].achievable(rest.0, rest.1) {
            picked.push(v);
            target = rest;
        }
    }
    debug_assert_eq!(target, (0, 0));
    Ok(SubseqWitness::from_residues(seq.modulus(), &picked))
}

/// Single-word fast path for `n <= 64` and `L <= 63`, used by the sweeps.
pub(crate) mod small {
    use crate::residue::ResidueSequence;

    pub const MAX_N: usize = 64;

    /// Bitmask of zero-sum lengths (bit 0 cleared). `None` when the sequence
    /// is too large for one word per residue.
    #[inline]
    pub fn zero_sum_mask(seq: &ResidueSequence, early: bool) -> Option<u64> {
        zero_sum_mask_mult(seq.mult(), seq.len(), early)
    }

    /// Same as [`zero_sum_mask`] over a raw multiplicity vector of length
    /// `n` whose entries sum to `len`.
    #[inline]
    pub fn zero_sum_mask_mult(mult: &[usize], len: usize, early: bool) -> Option<u64> {
        let n = mult.len();
        if n > MAX_N || len > 63 {
            return None;
        }
        let mut rows = [0u64; MAX_N];
        let mut old = [0u64; MAX_N];
        rows[0] = 1;
        for (v, &c) in mult.iter().enumerate() {
            for _ in 0..c {
                old[..n].copy_from_slice(&rows[..n]);
                let mut src = n - v;
                if src == n {
                    src = 0;
                }
                for row in rows.iter_mut().take(n) {
                    *row |= old[src] << 1;
                    src += 1;
                    if src == n {
                        src = 0;
                    }
                }
                if early && (rows[0] & !1).count_ones() >= 2 {
                    return Some(rows[0] & !1);
                }
            }
        }
        Some(rows[0] & !1)
    }

    pub fn mask_lengths(mask: u64) -> Vec<usize> {
        (0..64).filter(|&l| mask >> l & 1 == 1).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(values: &[i64], n: usize) -> ResidueSequence {
        ResidueSequence::new(values, Modulus::new(n).unwrap()).unwrap()
    }

    #[test]
    fn spectrum_small_example() {
        // all 8 subsequences of {1,1,2} mod 4, enumerated by hand
        let sp = compute_spectrum(&seq(&[1, 1, 2], 4));
        assert_eq!(sp.lengths(0), vec![0, 3]);
        assert_eq!(sp.lengths(1), vec![1]);
        assert_eq!(sp.lengths(2), vec![1, 2]);
        assert_eq!(sp.lengths(3), vec![2]);
    }

    #[test]
    fn spectrum_empty() {
        let sp = compute_spectrum(&seq(&[], 5));
        assert_eq!(sp.lengths(0), vec![0]);
        for s in 1..5 {
            assert!(sp.lengths(s).is_empty());
        }
        assert!(!sp.achievable(0, 1));
        assert!(!sp.achievable(7, 0));
    }

    #[test]
    fn spectrum_family_one_instance() {
        let sp = compute_spectrum(&seq(&[1, 1, 1, 1, 3], 5));
        assert_eq!(sp.lengths(0), vec![0, 3]);
    }

    #[test]
    fn zero_sum_length_examples() {
        assert_eq!(zero_sum_lengths(&seq(&[1, 1, 1, 1, 3], 5)), vec![3]);
        assert_eq!(zero_sum_lengths(&seq(&[1, 2, 3, 3], 4)), vec![2, 3]);
        assert_eq!(zero_sum_lengths(&seq(&[1, 1, 1, 1, 1], 5)), vec![5]);
    }

    #[test]
    fn naive_examples() {
        let s = seq(&[1, 1, 2], 4);
        assert_eq!(naive_spectrum(&s).unwrap(), compute_spectrum(&s));
        assert_eq!(
            naive_spectrum(&seq(&[2, 2], 4)).unwrap().lengths(0),
            vec![0, 2]
        );
        assert_eq!(
            naive_spectrum(&seq(&[0], 3)).unwrap().lengths(0),
            vec![0, 1]
        );
        let big = ResidueSequence::new(&[1; 21], Modulus::new(30).unwrap()).unwrap();
        assert_eq!(
            naive_spectrum(&big),
            Err(Error::OracleTooLarge { len: 21, max: 20 })
        );
    }

    #[test]
    fn witness_examples() {
        let s = seq(&[1, 1, 2], 4);
        assert_eq!(find_witness(&s, 0, 3).unwrap().as_sequence(), &s);
        assert_eq!(find_witness(&s, 2, 1).unwrap().as_sequence(), &seq(&[2], 4));
        assert_eq!(
            find_witness(&s, 0, 1),
            Err(Error::NotAchievable {
                n: 4,
                residue: 0,
                len: 1
            })
        );
        assert!(find_witness(&s, 9, 1).is_err());
        // prefers small values: {1,1} over {2} is not a length choice, but for
        // length 2 with sum 2 the only option is {1,1}
        assert_eq!(
            find_witness(&s, 2, 2).unwrap().as_sequence(),
            &seq(&[1, 1], 4)
        );
    }

    #[test]
    fn multiword_rows() {
        // L = 70 needs two words per row
        let n = Modulus::new(71).unwrap();
        let s = ResidueSequence::new(&[1; 70], n).unwrap();
        let sp = compute_spectrum(&s);
        assert!(sp.zero_sum_lengths().is_empty());
        assert!(sp.achievable(70, 70));
        assert!(sp.achievable(65, 65));
        let t = s.with_value(1).unwrap();
        assert_eq!(zero_sum_lengths(&t), vec![71]);
        let w = find_witness(&t, 0, 71).unwrap();
        assert_eq!(w.len(), 71);
    }

    #[test]
    fn early_exit_agrees_when_short() {
        let s = seq(&[1, 2, 3, 3], 4);
        assert_eq!(zero_sum_lengths_early(&s).len(), 2);
        let u = seq(&[1, 1, 1, 1, 3], 5);
        assert_eq!(zero_sum_lengths_early(&u), vec![3]);
    }

    #[test]
    fn spectrum_record_json() {
        let rec = compute_spectrum(&seq(&[1, 1, 2], 4)).to_record();
        assert_eq!(
            serde_json::to_string(&rec).unwrap(),
            r#"{"n":4,"L":3,"lengths":[[0,3],[1],[1,2],[2]]}"#
        );
    }

    fn arb_seq(max_n: usize, max_len: usize) -> impl Strategy<Value = ResidueSequence> {
        (1..=max_n).prop_flat_map(move |n| {
            prop::collection::vec(0..n as i64, 0..=max_len).prop_map(move |vals| {
                ResidueSequence::new(&vals, Modulus::new(n).unwrap()).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn dp_matches_oracle(s in arb_seq(10, 12)) {
            prop_assert_eq!(compute_spectrum(&s), naive_spectrum(&s).unwrap());
        }

        #[test]
        fn fast_path_matches_dp(s in arb_seq(20, 20)) {
            let full = compute_spectrum(&s).zero_sum_lengths();
            prop_assert_eq!(zero_sum_lengths(&s), full.clone());
            let early = zero_sum_lengths_early(&s);
            if early.len() < 2 {
                prop_assert_eq!(early, full);
            } else {
                prop_assert!(early.iter().all(|l| full.contains(l)));
            }
        }

        #[test]
        fn lex_least_witness_is_least(s in arb_seq(6, 8)) {
            // compare against the least tuple among all 2^L subsets
            let items = s.to_sorted_vec();
            let n = s.n();
            for r in 0..n {
                for l in 0..=s.len() {
                    let best = (0u32..1 << items.len())
                        .filter(|m| m.count_ones() as usize == l)
                        .map(|m| items.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, &v)| v).collect::<Vec<_>>())
                        .filter(|t| t.iter().sum::<usize>() % n == r)
                        .min();
                    let got = find_lex_least_witness(&s, r, l).ok().map(|w| w.as_sequence().to_sorted_vec());
                    prop_assert_eq!(got, best);
                }
            }
        }

        #[test]
        fn adding_a_term_is_monotone(s in arb_seq(9, 8), extra in 0usize..9) {
            let v = extra % s.n();
            let a = compute_spectrum(&s);
            let b = compute_spectrum(&s.with_value(v).unwrap());
            for r in 0..s.n() {
                for l in 0..=s.len() {
                    if a.achievable(r, l) {
                        prop_assert!(b.achievable(r, l));
                    }
                }
            }
        }

        #[test]
        fn every_witness_validates(s in arb_seq(9, 10)) {
            let sp = compute_spectrum(&s);
            for r in 0..s.n() {
                for l in 0..=s.len() {
                    match find_witness(&s, r, l) {
                        Ok(w) => {
                            prop_assert!(sp.achievable(r, l));
                            prop_assert!(s.contains(w.as_sequence()));
                            prop_assert_eq!(w.sigma() % s.n() as u64, r as u64);
                            prop_assert_eq!(w.len(), l);
                        }
                        Err(_) => prop_assert!(!sp.achievable(r, l)),
                    }
                }
            }
        }
    }
}
