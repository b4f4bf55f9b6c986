//! Majority-rule matching decoder for transversal bit-flip errors on
//! the periodic bulk code, with Monte Carlo failure-rate estimation.
//!
//! A flip on site k toggles the two adjacent coupling terms, so the
//! syndrome is the cyclic XOR of neighboring flip indicators. On a ring
//! the two error sets consistent with a syndrome are complements of
//! each other; the decoder picks the lighter one, which is the global
//! majority rule, and fails exactly when more than half the sites
//! flipped.

use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Syndrome of a flip configuration: indicator of each coupling term
/// (site k, site k+1 cyclic) anticommuting with the applied flips.
pub fn syndrome_of(flips: &[bool]) -> Vec<bool> {
    let n = flips.len();
    (0..n).map(|k| flips[k] != flips[(k + 1) % n]).collect()
}

/// Correction set from a syndrome: the lighter of the two consistent
/// flip configurations. Returns site indices (0-based).
pub fn decode_syndrome(syndrome: &[bool]) -> Result<Vec<usize>> {
    let n = syndrome.len();
    if n == 0 {
        return Err(Error::Malformed("empty syndrome".into()));
    }
    if syndrome.iter().filter(|&&s| s).count() % 2 != 0 {
        return Err(Error::Malformed("odd number of syndrome defects".into()));
    }
    // integrate the defect pattern: candidate with site 0 unflipped
    let mut cand = vec![false; n];
    for k in 1..n {
        cand[k] = cand[k - 1] != syndrome[k - 1];
    }
    let weight = cand.iter().filter(|&&c| c).count();
    let take_complement = 2 * weight > n;
    Ok((0..n)
        .filter(|&k| cand[k] != take_complement)
        .collect())
}

/// Whether correction plus actual errors amount to a logical flip.
pub fn is_logical_failure(flips: &[bool], correction: &[usize]) -> bool {
    let mut residual = flips.to_vec();
    for &k in correction {
        residual[k] = !residual[k];
    }
    // consistent corrections leave either nothing or a full flip
    residual.iter().all(|&r| r)
}

#[derive(Debug, Clone, Serialize)]
pub struct DecoderMonteCarlo {
    pub n_sites: usize,
    pub p: f64,
    pub samples: u64,
    pub failures: u64,
    pub failure_rate: f64,
    /// Binomial standard error of the estimate.
    pub std_error: f64,
    pub seed: u64,
}

/// Samples i.i.d. flips at rate `p` and decodes each configuration.
pub fn decoder_monte_carlo(n: usize, p: f64, samples: u64, seed: u64) -> Result<DecoderMonteCarlo> {
    if n == 0 || !(0.0..=1.0).contains(&p) {
        return Err(Error::Malformed("bad Monte Carlo parameters".into()));
    }
    let failures: u64 = (0..samples)
        .into_par_iter()
        .map(|idx| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed ^ (idx.wrapping_mul(0x9e37_79b9_7f4a_7c15)));
            let flips: Vec<bool> = (0..n).map(|_| rng.gen::<f64>() < p).collect();
            let syn = syndrome_of(&flips);
            let corr = decode_syndrome(&syn).expect("even defect count by construction");
            u64::from(is_logical_failure(&flips, &corr))
        })
        .sum();
    let rate = failures as f64 / samples as f64;
    Ok(DecoderMonteCarlo {
        n_sites: n,
        p,
        samples,
        failures,
        failure_rate: rate,
        std_error: (rate * (1.0 - rate) / samples as f64).sqrt(),
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_errors_give_empty_correction() {
        let syn = syndrome_of(&[false; 7]);
        assert!(syn.iter().all(|&s| !s));
        assert!(decode_syndrome(&syn).unwrap().is_empty());
    }

    #[test]
    fn single_error_is_located_exactly() {
        let mut flips = vec![false; 9];
        flips[4] = true;
        let corr = decode_syndrome(&syndrome_of(&flips)).unwrap();
        assert_eq!(corr, vec![4]);
        assert!(!is_logical_failure(&flips, &corr));
    }

    #[test]
    fn majority_violation_is_a_logical_flip() {
        // 5 of 7 sites flipped: decoder picks the complement and fails
        let flips = vec![true, true, true, false, true, true, false];
        let corr = decode_syndrome(&syndrome_of(&flips)).unwrap();
        assert!(is_logical_failure(&flips, &corr));
    }

    #[test]
    fn failure_rate_brackets_one_half() {
        let low = decoder_monte_carlo(101, 0.3, 20_000, 7).unwrap();
        let high = decoder_monte_carlo(101, 0.7, 20_000, 7).unwrap();
        assert!(low.failure_rate + 3.0 * low.std_error < 0.5);
        assert!(high.failure_rate - 3.0 * high.std_error > 0.5);
    }

    #[test]
    fn decoding_is_deterministic_in_the_seed() {
        let a = decoder_monte_carlo(31, 0.2, 5_000, 11).unwrap();
        let b = decoder_monte_carlo(31, 0.2, 5_000, 11).unwrap();
        assert_eq!(a.failures, b.failures);
    }
}
