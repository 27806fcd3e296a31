//! Ground-truth oracles for the longest alternating subsequence statistic.
//!
//! The pattern is descent-first, `w[i1] > w[i2] < w[i3] > ...`; a single
//! element is an alternating subsequence of length 1.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exactgf::{DistTable, Provenance};
use crate::numcore::Rational;
use crate::{invalid, Result};

/// Largest `n` accepted by [`brute_force_distribution`].
pub const MAX_BRUTE_FORCE_N: usize = 9;
/// Largest `n` accepted by the `2^n` subset oracle.
pub const MAX_EXHAUSTIVE_N: usize = 24;
/// Trials per independently seeded Monte Carlo stream.
pub const SAMPLE_CHUNK: u64 = 8192;

/// A permutation of `1..=n` in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    entries: Vec<u32>,
}

impl Permutation {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        let n = entries.len();
        let mut seen = vec![false; n];
        for &e in &entries {
            let idx = (e as usize).wrapping_sub(1);
            if idx >= n {
                return Err(invalid(format!("entry {e} out of range 1..={n}")));
            }
            if std::mem::replace(&mut seen[idx], true) {
                return Err(invalid(format!("entry {e} repeated")));
            }
        }
        Ok(Self { entries })
    }

    pub fn identity(n: usize) -> Self {
        Self { entries: (1..=n as u32).collect() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }
}

/// Longest alternating subsequence by the quadratic two-state DP.
pub fn as_length_dp(w: &Permutation) -> usize {
    longest_alternating_dp(w.entries())
}

/// Same value as [`as_length_dp`] in one linear pass.
pub fn as_length_linear(w: &Permutation) -> usize {
    longest_alternating_linear(w.entries())
}

/// `2^n` subset enumeration; the slowest and most direct oracle.
pub fn as_length_exhaustive(w: &Permutation) -> Result<usize> {
    longest_alternating_exhaustive(w.entries())
}

/// DP over positions. `odd[i]` is the best length of an alternating
/// subsequence ending at `i` with odd length (next step must descend),
/// `even[i]` the same with even length (next step must ascend).
pub fn longest_alternating_dp<T: Ord>(seq: &[T]) -> usize {
    let n = seq.len();
    let mut odd = vec![0usize; n];
    let mut even = vec![0usize; n];
    let mut best = 0;
    for i in 0..n {
        odd[i] = 1;
        for j in 0..i {
            if seq[j] > seq[i] && odd[j] > 0 {
                even[i] = even[i].max(odd[j] + 1);
            }
            if seq[j] < seq[i] && even[j] > 0 {
                odd[i] = odd[i].max(even[j] + 1);
            }
        }
        best = best.max(odd[i]).max(even[i]);
    }
    best
}

/// Greedy scan over local extrema: while waiting for a descent keep the
/// highest value seen, while waiting for an ascent keep the lowest.
pub fn longest_alternating_linear<T: Ord>(seq: &[T]) -> usize {
    let Some(mut last) = seq.first() else {
        return 0;
    };
    let mut len = 1;
    let mut want_descent = true;
    for x in &seq[1..] {
        let extends = if want_descent { x < last } else { x > last };
        if extends {
            len += 1;
            want_descent = !want_descent;
        }
        // On a non-extending step the new value is a better endpoint anyway.
        last = x;
    }
    len
}

pub fn longest_alternating_exhaustive<T: Ord>(seq: &[T]) -> Result<usize> {
    let n = seq.len();
    if n > MAX_EXHAUSTIVE_N {
        return Err(invalid(format!("exhaustive oracle limited to n <= {MAX_EXHAUSTIVE_N}, got {n}")));
    }
    let mut best = 0;
    let mut picked = Vec::with_capacity(n);
    for mask in 0u32..(1u32 << n) {
        let len = mask.count_ones() as usize;
        if len <= best {
            continue;
        }
        picked.clear();
        picked.extend((0..n).filter(|i| mask >> i & 1 == 1).map(|i| &seq[i]));
        let ok = picked
            .windows(2)
            .enumerate()
            .all(|(pos, w)| if pos % 2 == 0 { w[0] > w[1] } else { w[0] < w[1] });
        if ok {
            best = len;
        }
    }
    Ok(best)
}

/// Visit every permutation of `0..n` (Heap's algorithm).
fn for_each_permutation(n: usize, mut visit: impl FnMut(&[u32])) {
    let mut a: Vec<u32> = (1..=n as u32).collect();
    let mut c = vec![0usize; n];
    visit(&a);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            visit(&a);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Exact `p_n(k)` for `k = 0..=n` by enumerating all of `S_n`.
pub fn brute_force_distribution(n: usize) -> Result<DistTable> {
    if n > MAX_BRUTE_FORCE_N {
        return Err(invalid(format!("brute force limited to n <= {MAX_BRUTE_FORCE_N}, got {n}")));
    }
    let mut counts = vec![0u64; n + 1];
    if n == 0 {
        counts[0] = 1;
    } else {
        for_each_permutation(n, |w| counts[longest_alternating_dp(w)] += 1);
    }
    let total: u64 = counts.iter().sum();
    let mut running = 0u64;
    let cdf = counts
        .iter()
        .map(|&c| {
            running += c;
            Rational::new(BigInt::from(running), BigInt::from(total))
        })
        .collect();
    DistTable::new(n, cdf, Provenance::BruteForce)
}

/// Histogram of `as_n` over `m` seeded uniform permutations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSummary {
    pub n: usize,
    pub m: u64,
    pub seed: u64,
    pub histogram: BTreeMap<usize, u64>,
    pub mean: f64,
    /// Population variance of the sample (divides by `m`).
    pub variance: f64,
}

impl EmpiricalSummary {
    pub fn from_histogram(n: usize, seed: u64, histogram: BTreeMap<usize, u64>) -> Self {
        let m: u64 = histogram.values().sum();
        let mf = m as f64;
        let mean = histogram.iter().map(|(&k, &c)| k as f64 * c as f64).sum::<f64>() / mf;
        let variance = histogram
            .iter()
            .map(|(&k, &c)| (k as f64 - mean).powi(2) * c as f64)
            .sum::<f64>()
            / mf;
        Self { n, m, seed, histogram, mean, variance }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Monte Carlo summary of `as_n` over `m` permutations.
///
/// Trials are split into chunks of [`SAMPLE_CHUNK`]; chunk `c` shuffles
/// with its own ChaCha8 stream `(seed, c)`, so the result depends only on
/// `(n, m, seed)` and not on how chunks are scheduled across threads.
pub fn sample_summary(n: usize, m: u64, seed: u64) -> Result<EmpiricalSummary> {
    if n == 0 {
        return Err(invalid("sample_summary needs n >= 1"));
    }
    if m == 0 {
        return Err(invalid("sample_summary needs m >= 1"));
    }
    let chunks = m.div_ceil(SAMPLE_CHUNK);
    let partials: Vec<Vec<u64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let trials = SAMPLE_CHUNK.min(m - c * SAMPLE_CHUNK);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let mut w: Vec<u32> = (1..=n as u32).collect();
            let mut hist = vec![0u64; n + 1];
            for _ in 0..trials {
                w.shuffle(&mut rng);
                hist[longest_alternating_linear(&w)] += 1;
            }
            hist
        })
        .collect();
    let mut total = vec![0u64; n + 1];
    for part in &partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    let histogram = total
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .collect();
    Ok(EmpiricalSummary::from_histogram(n, seed, histogram))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::rat;

    fn p(v: &[u32]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    #[test]
    fn small_cases() {
        for (w, want) in [(&[2, 1, 3][..], 3), (&[], 0), (&[1, 2, 3], 1), (&[1, 3, 2], 2), (&[1], 1)] {
            let w = p(w);
            assert_eq!(as_length_dp(&w), want, "{w:?}");
            assert_eq!(as_length_linear(&w), want, "{w:?}");
            assert_eq!(as_length_exhaustive(&w).unwrap(), want, "{w:?}");
        }
    }

    #[test]
    fn rejects_malformed() {
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert!(Permutation::new(vec![0, 1]).is_err());
        assert!(Permutation::new(vec![1, 3]).is_err());
    }

    #[test]
    fn brute_force_small_rows() {
        let t1 = brute_force_distribution(1).unwrap();
        assert_eq!(t1.cdf(), &[rat(0, 1), rat(1, 1)]);
        let t2 = brute_force_distribution(2).unwrap();
        assert_eq!(t2.cdf(), &[rat(0, 1), rat(1, 2), rat(1, 1)]);
        let t3 = brute_force_distribution(3).unwrap();
        assert_eq!(t3.cdf(), &[rat(0, 1), rat(1, 6), rat(2, 3), rat(1, 1)]);
        assert_eq!(t3.moments().0, rat(13, 6));
        assert_eq!(brute_force_distribution(0).unwrap().cdf(), &[rat(1, 1)]);
        assert!(brute_force_distribution(10).is_err());
    }

    #[test]
    fn heap_visits_every_permutation_once() {
        let mut seen = std::collections::HashSet::new();
        for_each_permutation(5, |w| assert!(seen.insert(w.to_vec())));
        assert_eq!(seen.len(), 120);
    }

    #[test]
    fn single_element_histogram() {
        let s = sample_summary(1, 1000, 7).unwrap();
        assert_eq!(s.histogram, BTreeMap::from([(1, 1000)]));
        assert_eq!(s.mean, 1.0);
        assert_eq!(s.variance, 0.0);
    }

    #[test]
    fn summary_is_seed_deterministic() {
        let a = sample_summary(30, 20_000, 99).unwrap();
        let b = sample_summary(30, 20_000, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.histogram.values().sum::<u64>(), 20_000);
        let c = sample_summary(30, 20_000, 100).unwrap();
        assert_ne!(a.histogram, c.histogram);
    }

    #[test]
    fn summary_json_shape() {
        let s = sample_summary(3, 10, 1).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s.to_json().unwrap()).unwrap();
        for key in ["n", "m", "seed", "histogram", "mean", "variance"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        let back: EmpiricalSummary = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
    }
}
