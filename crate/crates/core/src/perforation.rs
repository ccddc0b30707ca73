//! The perforation statistic `phi = H_1 ln 2 + H_2 ln 3 + ... + H_n ln p_n`
//! and its decoder.
//!
//! Logarithms are natural: `e^phi = 2^H_1 3^H_2 ... p_n^H_n`, so the Betti
//! sequence is recovered by exponentiating and factoring.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::persistence::{persistent_betti, BettiSequence, PersistenceDiagram};

pub const MAX_PRIME_INDEX: usize = 1000;
pub const DEFAULT_DECODE_TOLERANCE: f64 = 1e-6;
/// `e^700` is close to the largest finite double.
pub const MAX_DECODABLE_PHI: f64 = 700.0;

/// Above this, `e^phi` is no longer reliably the nearest integer to the
/// encoded product and decoding switches to a lattice search.
const EXACT_PRODUCT_LIMIT: f64 = 1e12;
const SEARCH_PRIMES: usize = 8;
const SEARCH_BUDGET: u64 = 50_000_000;

fn primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        // The 1000th prime is 7919.
        let limit = 8000;
        let mut composite = vec![false; limit + 1];
        let mut out = Vec::with_capacity(MAX_PRIME_INDEX);
        for p in 2..=limit {
            if composite[p] {
                continue;
            }
            out.push(p as u64);
            let mut m = p * p;
            while m <= limit {
                composite[m] = true;
                m += p;
            }
        }
        out.truncate(MAX_PRIME_INDEX);
        out
    })
}

/// The `n`-th prime, one-based.
pub fn nth_prime(n: usize) -> Result<u64> {
    if n == 0 || n > MAX_PRIME_INDEX {
        return Err(Error::OutOfRange(n));
    }
    Ok(primes()[n - 1])
}

fn ln_prime(index: usize) -> f64 {
    (primes()[index] as f64).ln()
}

/// Threshold and dimension cap a perforation value was computed under.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub threshold: f64,
    pub max_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerforationValue {
    pub phi: f64,
    pub betti: BettiSequence,
    pub fingerprint: Option<Fingerprint>,
}

/// Sum in index order; the decoder relies on reproducing it bit for bit.
fn weighted_log_sum(counts: &[usize]) -> f64 {
    counts
        .iter()
        .enumerate()
        .fold(0.0, |acc, (i, &c)| acc + c as f64 * ln_prime(i))
}

/// # Panics
/// If the sequence has more than 1000 dimensions.
pub fn perforation(betti: &BettiSequence) -> PerforationValue {
    assert!(
        betti.0.len() <= MAX_PRIME_INDEX,
        "perforation is defined for at most {MAX_PRIME_INDEX} homology dimensions"
    );
    PerforationValue {
        phi: weighted_log_sum(&betti.0),
        betti: betti.clone(),
        fingerprint: None,
    }
}

/// Thresholds `diagram` and computes the perforation of the surviving bars.
pub fn diagram_perforation(diagram: &PersistenceDiagram, threshold: f64) -> PerforationValue {
    let betti = persistent_betti(diagram, threshold);
    PerforationValue {
        fingerprint: Some(Fingerprint {
            threshold,
            max_dim: diagram.max_dim,
        }),
        ..perforation(&betti)
    }
}

/// Recovers the Betti sequence encoded by `phi`.
///
/// For `e^phi <= 1e12` this rounds `e^phi` to the nearest integer, checks it
/// against `tolerance` (relative), and factors it over the first 1000 primes.
/// Larger values cannot be rounded exactly in double precision; they are
/// matched against exponent vectors over the first eight primes, shortest
/// support first.
pub fn decode_perforation(phi: f64, tolerance: f64) -> Result<BettiSequence> {
    if !(phi >= 0.0 && phi.is_finite()) {
        return Err(Error::InvalidArgument(format!("phi must be finite and >= 0, got {phi}")));
    }
    if !(tolerance >= 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be >= 0, got {tolerance}")));
    }
    if phi > MAX_DECODABLE_PHI {
        return Err(Error::NotEncodable(format!(
            "phi {phi} exceeds the decodable range (<= {MAX_DECODABLE_PHI})"
        )));
    }
    let product = phi.exp();
    if product <= EXACT_PRODUCT_LIMIT {
        decode_by_factoring(product, tolerance)
    } else {
        decode_by_search(phi, tolerance)
    }
}

fn decode_by_factoring(product: f64, tolerance: f64) -> Result<BettiSequence> {
    let rounded = product.round();
    if (product - rounded).abs() > tolerance * rounded {
        return Err(Error::NotEncodable(format!(
            "e^phi = {product} is not within tolerance of an integer"
        )));
    }
    let mut rest = rounded as u64;
    let mut counts = Vec::new();
    for (i, &p) in primes().iter().enumerate() {
        if rest == 1 {
            break;
        }
        let mut c = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            c += 1;
        }
        if c > 0 {
            counts.resize(i + 1, 0);
            counts[i] = c;
        }
    }
    if rest != 1 {
        return Err(Error::NotEncodable(format!(
            "{rounded} has a prime factor beyond the {MAX_PRIME_INDEX}th prime"
        )));
    }
    Ok(BettiSequence(counts))
}

struct Search {
    phi: f64,
    counts: Vec<usize>,
    best: Option<(f64, Vec<usize>)>,
    visited: u64,
}

impl Search {
    /// Enumerates exponents for primes `index..` given a fixed tail; the
    /// exponent of 2 is solved for directly.
    fn walk(&mut self, index: usize, partial: f64) -> Result<()> {
        self.visited += 1;
        if self.visited > SEARCH_BUDGET {
            return Err(Error::NotEncodable("decoding search budget exceeded".into()));
        }
        if index == 0 {
            let guess = ((self.phi - partial) / ln_prime(0)).round().max(0.0) as usize;
            for c in guess.saturating_sub(1)..=guess + 1 {
                self.counts[0] = c;
                let residual = (weighted_log_sum(&self.counts) - self.phi).abs();
                if self.best.as_ref().is_none_or(|(r, _)| residual < *r) {
                    self.best = Some((residual, self.counts.clone()));
                }
            }
            self.counts[0] = 0;
            return Ok(());
        }
        let ln_p = ln_prime(index);
        let top = index + 1 == self.counts.len();
        let mut c = usize::from(top);
        while partial + c as f64 * ln_p <= self.phi * (1.0 + 1e-9) {
            self.counts[index] = c;
            self.walk(index - 1, partial + c as f64 * ln_p)?;
            c += 1;
        }
        self.counts[index] = 0;
        Ok(())
    }
}

fn decode_by_search(phi: f64, tolerance: f64) -> Result<BettiSequence> {
    // The true encoding reproduces phi up to a few rounding steps.
    let tight = 64.0 * f64::EPSILON * phi;
    let mut overall: Option<(f64, Vec<usize>)> = None;
    for len in 1..=SEARCH_PRIMES {
        let mut search = Search {
            phi,
            counts: vec![0; len],
            best: None,
            visited: 0,
        };
        if len == 1 {
            search.walk(0, 0.0)?;
            // The single-prime walk does not force a nonzero exponent.
            if let Some((_, c)) = &search.best {
                if c[0] == 0 {
                    search.best = None;
                }
            }
        } else {
            search.walk(len - 1, 0.0)?;
        }
        if let Some((residual, counts)) = search.best {
            if residual <= tight {
                return Ok(BettiSequence(counts));
            }
            if overall.as_ref().is_none_or(|(r, _)| residual < *r) {
                overall = Some((residual, counts));
            }
        }
    }
    match overall {
        Some((residual, counts)) if residual.exp_m1().abs() <= tolerance => Ok(BettiSequence(counts)),
        _ => Err(Error::NotEncodable(format!(
            "no product of the first {SEARCH_PRIMES} primes matches phi {phi} within tolerance"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_primes() {
        assert_eq!(nth_prime(1).unwrap(), 2);
        assert_eq!(nth_prime(2).unwrap(), 3);
        assert_eq!(nth_prime(1000).unwrap(), 7919);
        assert_eq!(nth_prime(0), Err(Error::OutOfRange(0)));
        assert_eq!(nth_prime(1001), Err(Error::OutOfRange(1001)));
    }

    #[test]
    fn empty_sequences_have_zero_perforation() {
        assert_eq!(perforation(&BettiSequence(vec![])).phi, 0.0);
        assert_eq!(perforation(&BettiSequence(vec![0, 0])).phi, 0.0);
    }

    #[test]
    fn decode_zero_is_empty() {
        assert_eq!(decode_perforation(0.0, 1e-6).unwrap(), BettiSequence(vec![]));
    }

    #[test]
    fn decode_torus() {
        let phi = 2.0 * 2f64.ln() + 3f64.ln();
        assert_eq!(decode_perforation(phi, 1e-6).unwrap(), BettiSequence(vec![2, 1]));
    }

    #[test]
    fn decode_rejects_non_integral_products() {
        // e^phi = 12.5
        assert!(matches!(
            decode_perforation(12.5f64.ln(), 1e-6),
            Err(Error::NotEncodable(_))
        ));
    }

    #[test]
    fn decode_rejects_large_prime_factors() {
        // 7927 is the 1001st prime.
        assert!(matches!(
            decode_perforation(7927f64.ln(), 1e-9),
            Err(Error::NotEncodable(_))
        ));
        let last = BettiSequence([vec![0; 999], vec![1]].concat());
        assert_eq!(decode_perforation(perforation(&last).phi, 1e-9).unwrap(), last);
    }

    #[test]
    fn decode_guards() {
        assert!(matches!(decode_perforation(-1.0, 1e-6), Err(Error::InvalidArgument(_))));
        assert!(matches!(decode_perforation(f64::NAN, 1e-6), Err(Error::InvalidArgument(_))));
        assert!(matches!(decode_perforation(701.0, 1e-6), Err(Error::NotEncodable(_))));
    }

    #[test]
    fn decode_large_single_dimension_counts() {
        for k in [40usize, 100, 500, 1000] {
            let b = BettiSequence(vec![k]);
            assert_eq!(decode_perforation(perforation(&b).phi, 1e-6).unwrap(), b);
        }
    }

    #[test]
    fn decode_large_mixed_sequences() {
        for counts in [vec![10, 10, 10, 10], vec![0, 0, 0, 12], vec![30, 0, 5], vec![3, 1, 4, 1, 5, 9]] {
            let b = BettiSequence(counts);
            assert_eq!(decode_perforation(perforation(&b).phi, 1e-6).unwrap(), b);
        }
    }

    #[test]
    fn diagram_perforation_records_fingerprint() {
        let d = PersistenceDiagram {
            bars: vec![crate::persistence::Bar { dim: 1, birth: 0.0, death: 1.0 }],
            max_dim: 2,
            max_epsilon: 1.0,
            n_points: 4,
            top_cycles: vec![],
        };
        let v = diagram_perforation(&d, 0.1);
        assert_eq!(v.betti, BettiSequence(vec![1, 0]));
        assert_eq!(v.phi, 2f64.ln());
        assert_eq!(v.fingerprint, Some(Fingerprint { threshold: 0.1, max_dim: 2 }));
    }
}
