use rand::Rng;
use rand_distr::{Distribution, Gamma, Geometric, Poisson};

/// Largest `k` sampled as an explicit sum of geometric draws.
const DIRECT_SUM_LIMIT: u64 = 64;

/// Number of Bernoulli(`p`) trials needed to collect `k` successes.
///
/// Small `k` sums `k` geometric waiting times. Larger `k` draws the failure
/// count from its gamma-Poisson mixture, which keeps the cost constant in `k`.
pub fn negative_binomial_sample<R: Rng + ?Sized>(rng: &mut R, k: u64, p: f64) -> u64 {
    assert!(k >= 1, "negative binomial needs k >= 1");
    assert!(p > 0.0 && p <= 1.0, "success probability must lie in (0, 1], got {p}");
    if p == 1.0 {
        return k;
    }
    if k <= DIRECT_SUM_LIMIT {
        let geo = Geometric::new(p).expect("p in (0, 1)");
        return k + (0..k).map(|_| geo.sample(rng)).sum::<u64>();
    }
    let rate = Gamma::new(k as f64, (1.0 - p) / p)
        .expect("gamma parameters are positive")
        .sample(rng);
    if !(rate > 0.0) {
        return k;
    }
    let failures = Poisson::new(rate)
        .expect("poisson rate is positive and finite")
        .sample(rng);
    k + failures as u64
}

/// Number of attempts until the first delivery, at least 1.
pub(crate) fn attempts_sample<R: Rng + ?Sized>(rng: &mut R, p: f64) -> u64 {
    if p == 1.0 {
        return 1;
    }
    1 + Geometric::new(p).expect("p in (0, 1)").sample(rng)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::sim::stats::Welford;

    fn moments(k: u64, p: f64, draws: usize, seed: u64) -> (Welford, Welford) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut m, mut sq) = (Welford::default(), Welford::default());
        for _ in 0..draws {
            let x = negative_binomial_sample(&mut rng, k, p) as f64;
            m.push(x);
            sq.push(x * x);
        }
        (m, sq)
    }

    #[test]
    fn certain_success_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(negative_binomial_sample(&mut rng, 7, 1.0), 7);
        assert_eq!(negative_binomial_sample(&mut rng, 700, 1.0), 700);
        assert_eq!(attempts_sample(&mut rng, 1.0), 1);
    }

    #[test]
    fn geometric_special_case_mean() {
        let (m, _) = moments(1, 0.25, 1_000_000, 2);
        assert!(
            (m.mean() - 4.0).abs() < 4.0 * m.std_err(),
            "{} +- {}",
            m.mean(),
            m.std_err()
        );
    }

    #[test]
    fn small_k_mean() {
        let (m, _) = moments(3, 0.5, 1_000_000, 3);
        assert!(
            (m.mean() - 6.0).abs() < 4.0 * m.std_err(),
            "{} +- {}",
            m.mean(),
            m.std_err()
        );
    }

    #[test]
    fn both_methods_share_first_two_moments() {
        // Either side of the method switch: mean k/p and E[X^2] = k(1-p)/p^2 + (k/p)^2.
        for (k, p) in [(64, 0.3), (65, 0.3), (1000, 0.8), (250_000, 0.05)] {
            let (m, sq) = moments(k, p, 200_000, k);
            let kf = k as f64;
            let mean = kf / p;
            let second = kf * (1.0 - p) / (p * p) + mean * mean;
            assert!(
                (m.mean() - mean).abs() < 4.0 * m.std_err(),
                "k={k} mean {} vs {mean}",
                m.mean()
            );
            assert!(
                (sq.mean() - second).abs() < 4.0 * sq.std_err(),
                "k={k} second {} vs {second}",
                sq.mean()
            );
        }
    }

    #[test]
    fn never_below_k() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for k in [1, 5, 64, 65, 1000] {
            for _ in 0..1000 {
                assert!(negative_binomial_sample(&mut rng, k, 0.9) >= k);
            }
        }
    }
}
