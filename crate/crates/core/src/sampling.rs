//! Seeded random generators shared by the `selftest` subcommand and the test
//! suites.

use rand::Rng;

use crate::residue::{Modulus, ResidueSequence};
use crate::structure::Lemma31Instance;

/// A uniformly random list of `len` residues modulo `n`.
pub fn random_sequence<R: Rng>(rng: &mut R, n: Modulus, len: usize) -> ResidueSequence {
    let values: Vec<usize> = (0..len).map(|_| rng.gen_range(0..n.get())).collect();
    ResidueSequence::from_residues(n, &values)
}

/// Draws a valid `1^v a_1 ... a_t` instance with `n` in `[3, max_n]`.
///
/// Samples `(n, j, t, v)` and then spreads the remaining budget over the `a`
/// terms, retrying until every hypothesis holds.
pub fn random_lemma31_instance<R: Rng>(rng: &mut R, max_n: usize) -> Lemma31Instance {
    assert!(max_n >= 3);
    loop {
        let n = rng.gen_range(3..=max_n);
        let j = rng.gen_range(1..=3.min(n / 2).max(1));
        let t = rng.gen_range(1..=(n / 2).max(1));
        // v + t >= (n+1)/2
        let v_min = (n + 2) / 2 - t.min((n + 2) / 2);
        let Some(budget) = n.checked_sub(j + v_min + 2 * t) else {
            continue;
        };
        let extra_v = rng.gen_range(0..=budget);
        let v = v_min + extra_v;
        let mut slack = budget - extra_v;
        let mut a = vec![2; t];
        for x in a.iter_mut() {
            if slack == 0 {
                break;
            }
            let add = rng.gen_range(0..=slack);
            *x += add;
            slack -= add;
        }
        a.sort_unstable();
        if let Ok(inst) = Lemma31Instance::new(n, j, v, a) {
            return inst;
        }
    }
}
