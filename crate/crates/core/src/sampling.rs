//! Deterministic quasi-random sampling.

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Radical inverse of `index` in `base`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while index > 0 {
        r += f * (index % base) as f64;
        index /= base;
        f *= inv;
    }
    r
}

/// First `n` points of the Halton sequence in `[0, 1)^dims`, skipping the
/// origin.
pub fn halton(n: usize, dims: usize) -> Vec<Vec<f64>> {
    assert!(dims <= PRIMES.len(), "at most {} Halton dimensions", PRIMES.len());
    (1..=n as u64).map(|i| PRIMES[..dims].iter().map(|&b| radical_inverse(i, b)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_two_prefix() {
        let xs: Vec<f64> = (1..5).map(|i| radical_inverse(i, 2)).collect();
        assert_eq!(xs, vec![0.5, 0.25, 0.75, 0.125]);
    }

    #[test]
    fn points_lie_in_the_unit_cube() {
        for p in halton(500, 3) {
            assert!(p.iter().all(|x| (0.0..1.0).contains(x)));
        }
    }
}
