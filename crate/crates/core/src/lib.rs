//! Exact zero-sum subsequence analysis over the cyclic group `Z/nZ`.
//!
//! * [`residue`]: residue multisets, unit rescaling, orbit representatives.
//! * [`spectrum`]: which (sum residue, length) pairs subsequences reach.
//! * [`structure`]: zero-sum-free structure, certificates and constructions.
//! * [`verify`]: unique-length classification and exhaustive sweeps.
//! * [`cli`]: the `zslab` command-line front end.

pub mod cli;
pub mod error;
pub mod residue;
pub mod sampling;
pub mod spectrum;
pub mod structure;
pub mod verify;

pub use error::{Error, Result};
pub use residue::{units, CanonicalForm, Modulus, ResidueSequence, SubseqWitness};
pub use spectrum::{
    compute_spectrum, find_witness, naive_spectrum, zero_sum_lengths, LengthSpectrum,
};
pub use structure::{
    enumerate_zsf, find_short_zero_sum, is_zero_sum_free, lemma31_check_i, lemma31_construct_ii,
    lemma31_construct_iii, theorem_d_certificate, Lemma31Instance, ZsfCertificate, ZsfEnumerator,
};
pub use verify::{
    check_families, count_search_space, family_sequences, is_graham, verify_lemma_c,
    verify_theorem, FamilyVerdict, GrahamVerdict, VerificationReport, VerifyOptions,
};
