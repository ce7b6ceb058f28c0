//! Residue multisets over the cyclic group of order `n`.
//!
//! A [`ResidueSequence`] is stored as a dense multiplicity vector indexed by
//! residue, so two sequences holding the same values in any order compare
//! equal. Everything here is immutable after construction.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// The group order `n` (always at least 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Modulus(usize);

impl Modulus {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidModulus);
        }
        Ok(Modulus(n))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    /// Reduces an arbitrary integer into `[0, n - 1]`.
    #[inline]
    pub fn reduce(self, x: i64) -> usize {
        x.rem_euclid(self.0 as i64) as usize
    }

    pub fn is_unit(self, m: i64) -> bool {
        gcd(self.reduce(m), self.0) == 1
    }

    /// Multiplicative inverse of a unit, if `m` is one.
    pub fn inverse(self, m: i64) -> Option<usize> {
        let n = self.0 as i64;
        let (mut r0, mut r1) = (n, m.rem_euclid(n));
        let (mut s0, mut s1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        (r0 == 1).then(|| s0.rem_euclid(n) as usize)
    }
}

impl TryFrom<usize> for Modulus {
    type Error = Error;

    fn try_from(n: usize) -> Result<Self> {
        Modulus::new(n)
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// All `m` in `[1, n - 1]` coprime to `n`, ascending.
pub fn units(n: Modulus) -> Result<Vec<usize>> {
    let n = n.get();
    if n <= 1 {
        return Err(Error::DegenerateModulus(n));
    }
    Ok((1..n).filter(|&m| gcd(m, n) == 1).collect())
}

/// A multiset of residues modulo `n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ResidueSequence {
    modulus: Modulus,
    mult: Vec<usize>,
    len: usize,
}

impl ResidueSequence {
    /// Builds a sequence from a list of values, each of which must already
    /// lie in `[0, n - 1]`.
    pub fn new(values: &[i64], n: Modulus) -> Result<Self> {
        let mut mult = vec![0; n.get()];
        for &value in values {
            if value < 0 || value as u64 >= n.get() as u64 {
                return Err(Error::InvalidValue { value, n: n.get() });
            }
            mult[value as usize] += 1;
        }
        Ok(Self::from_mult_unchecked(n, mult))
    }

    /// Builds a sequence from a multiplicity vector of length `n`.
    pub fn from_mult(n: Modulus, mult: Vec<usize>) -> Result<Self> {
        if mult.len() != n.get() {
            return Err(Error::HypothesisViolated(format!(
                "multiplicity vector has {} entries, expected {}",
                mult.len(),
                n
            )));
        }
        Ok(Self::from_mult_unchecked(n, mult))
    }

    pub(crate) fn from_mult_unchecked(modulus: Modulus, mult: Vec<usize>) -> Self {
        debug_assert_eq!(mult.len(), modulus.get());
        let len = mult.iter().sum();
        ResidueSequence { modulus, mult, len }
    }

    /// Builds a sequence from values already known to be residues.
    pub(crate) fn from_residues(modulus: Modulus, values: &[usize]) -> Self {
        let mut mult = vec![0; modulus.get()];
        for &v in values {
            mult[v] += 1;
        }
        Self::from_mult_unchecked(modulus, mult)
    }

    pub fn empty(n: Modulus) -> Self {
        Self::from_mult_unchecked(n, vec![0; n.get()])
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.modulus.get()
    }

    #[inline]
    pub fn mult(&self) -> &[usize] {
        &self.mult
    }

    #[inline]
    pub fn multiplicity(&self, value: usize) -> usize {
        self.mult.get(value).copied().unwrap_or(0)
    }

    /// Number of terms, counted with multiplicity.
    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The true integer sum of the terms, not reduced modulo `n`.
    pub fn sigma(&self) -> u64 {
        self.mult
            .iter()
            .enumerate()
            .map(|(v, &c)| v as u64 * c as u64)
            .sum()
    }

    /// Sum of the terms reduced modulo `n`.
    pub fn sum_residue(&self) -> usize {
        (self.sigma() % self.n() as u64) as usize
    }

    /// Largest multiplicity of any single value (0 when empty).
    pub fn h_max(&self) -> usize {
        self.mult.iter().copied().max().unwrap_or(0)
    }

    pub fn distinct_count(&self) -> usize {
        self.mult.iter().filter(|&&c| c > 0).count()
    }

    /// Terms in nondecreasing order, repeated by multiplicity.
    pub fn values(&self) -> impl Iterator<Item = usize> + '_ {
        self.mult
            .iter()
            .enumerate()
            .flat_map(|(v, &c)| std::iter::repeat_n(v, c))
    }

    pub fn to_sorted_vec(&self) -> Vec<usize> {
        self.values().collect()
    }

    /// `m * S`: every term multiplied by the unit `m` and reduced.
    pub fn rescale(&self, m: i64) -> Result<Self> {
        let modulus = self.modulus;
        if !modulus.is_unit(m) {
            return Err(Error::NotAUnit { m, n: self.n() });
        }
        let m = modulus.reduce(m);
        let n = self.n();
        let mut mult = vec![0; n];
        for (v, &c) in self.mult.iter().enumerate() {
            mult[(v * m) % n] += c;
        }
        Ok(Self::from_mult_unchecked(modulus, mult))
    }

    /// True when `other` is a sub-multiset of `self` over the same modulus.
    pub fn contains(&self, other: &ResidueSequence) -> bool {
        self.modulus == other.modulus && self.mult.iter().zip(&other.mult).all(|(a, b)| b <= a)
    }

    /// `S T^{-1}`: the sequence left after deleting the sub-multiset `other`.
    pub fn without(&self, other: &ResidueSequence) -> Result<Self> {
        if !self.contains(other) {
            return Err(Error::HypothesisViolated(format!(
                "{other} is not a subsequence of {self}"
            )));
        }
        let mult = self
            .mult
            .iter()
            .zip(&other.mult)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self::from_mult_unchecked(self.modulus, mult))
    }

    /// `S` with one more copy of `value`.
    pub fn with_value(&self, value: usize) -> Result<Self> {
        if value >= self.n() {
            return Err(Error::InvalidValue {
                value: value as i64,
                n: self.n(),
            });
        }
        let mut mult = self.mult.clone();
        mult[value] += 1;
        Ok(Self::from_mult_unchecked(self.modulus, mult))
    }

    /// Lexicographically least sorted value tuple over the unit orbit.
    pub fn canonicalize(&self) -> Result<CanonicalForm> {
        let mut best = self.clone();
        for m in units(self.modulus)?.into_iter().skip(1) {
            let image = self.rescale(m as i64)?;
            if cmp_sorted(&image.mult, &best.mult) == Ordering::Less {
                best = image;
            }
        }
        Ok(CanonicalForm(best))
    }

    /// Whether `self` is already the representative of its unit orbit.
    /// Cheaper than [`canonicalize`](Self::canonicalize): stops at the first
    /// smaller image and allocates one scratch vector.
    pub fn is_canonical(&self) -> bool {
        let mut image = vec![0usize; self.n()];
        is_canonical_mult(&self.mult, &mut image)
    }
}

/// Orbit-representative test on a raw multiplicity vector; `image` is scratch
/// space of the same length.
pub(crate) fn is_canonical_mult(mult: &[usize], image: &mut [usize]) -> bool {
    let n = mult.len();
    if n <= 2 {
        return true;
    }
    for m in 2..n {
        if gcd(m, n) != 1 {
            continue;
        }
        image.iter_mut().for_each(|c| *c = 0);
        for (v, &c) in mult.iter().enumerate() {
            image[(v * m) % n] += c;
        }
        if cmp_sorted(image, mult) == Ordering::Less {
            return false;
        }
    }
    true
}

/// Compares the nondecreasing value tuples of two multiplicity vectors of
/// equal total length.
pub(crate) fn cmp_sorted(a: &[usize], b: &[usize]) -> Ordering {
    // Walk both expansions in lockstep; the first value where the counts
    // differ decides: the side holding more copies of the smaller value is
    // lexicographically smaller at that position.
    let (mut i, mut j) = (0, 0);
    let (mut ra, mut rb) = (0usize, 0usize);
    loop {
        while ra == 0 && i < a.len() {
            ra = a[i];
            if ra == 0 {
                i += 1;
            }
        }
        while rb == 0 && j < b.len() {
            rb = b[j];
            if rb == 0 {
                j += 1;
            }
        }
        match (ra == 0, rb == 0) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        if i != j {
            return i.cmp(&j);
        }
        let step = ra.min(rb);
        ra -= step;
        rb -= step;
        if ra == 0 {
            i += 1;
        }
        if rb == 0 {
            j += 1;
        }
    }
}

impl PartialOrd for ResidueSequence {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by modulus, then by the sorted value tuple.
impl Ord for ResidueSequence {
    fn cmp(&self, other: &Self) -> Ordering {
        self.modulus
            .cmp(&other.modulus)
            .then_with(|| self.values().cmp(other.values()))
    }
}

/// Formats as the shared text format, e.g. `1^6,3,4`. The empty sequence
/// formats as the empty string.
impl fmt::Display for ResidueSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, &c) in self.mult.iter().enumerate().filter(|(_, &c)| c > 0) {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            if c == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{c}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ResidueSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}] mod {}", self.modulus)
    }
}

impl Serialize for ResidueSequence {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.values())
    }
}

/// A sub-multiset picked out of some parent sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct SubseqWitness(ResidueSequence);

impl SubseqWitness {
    pub fn new(seq: ResidueSequence) -> Self {
        SubseqWitness(seq)
    }

    pub(crate) fn from_residues(n: Modulus, values: &[usize]) -> Self {
        SubseqWitness(ResidueSequence::from_residues(n, values))
    }

    pub fn as_sequence(&self) -> &ResidueSequence {
        &self.0
    }

    pub fn into_sequence(self) -> ResidueSequence {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sigma(&self) -> u64 {
        self.0.sigma()
    }

    pub fn residue(&self) -> usize {
        self.0.sum_residue()
    }

    /// Re-checks containment in `parent`, the sum residue, and the length.
    pub fn validate(&self, parent: &ResidueSequence, residue: usize, len: usize) -> Result<()> {
        if !parent.contains(&self.0) {
            return Err(Error::HypothesisViolated(format!(
                "witness {} is not contained in {}",
                self.0, parent
            )));
        }
        if self.residue() != residue % parent.n() || self.len() != len {
            return Err(Error::HypothesisViolated(format!(
                "witness {} has sum {} and length {}, expected {} and {}",
                self.0,
                self.residue(),
                self.len(),
                residue,
                len
            )));
        }
        Ok(())
    }
}

impl fmt::Display for SubseqWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Orbit representative under multiplication by units.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct CanonicalForm(ResidueSequence);

impl CanonicalForm {
    pub fn as_sequence(&self) -> &ResidueSequence {
        &self.0
    }

    pub fn into_sequence(self) -> ResidueSequence {
        self.0
    }

    pub fn to_tuple(&self) -> Vec<usize> {
        self.0.to_sorted_vec()
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
