//! Smallest-prime-factor sieve and the factorization helpers built on it.
//!
//! The sieve is computed once and shared; factorization of any n <= bound is
//! then an O(log n) walk.

/// Smallest-prime-factor table for 0..=bound. `spf[n] = 0` for n < 2,
/// `spf[p] = p` for primes.
#[derive(Debug, Clone)]
pub struct SpfSieve {
    spf: Vec<u32>,
}

impl SpfSieve {
    pub fn new(bound: usize) -> Self {
        let mut spf = vec![0u32; bound + 1];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..=bound {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                if p > si {
                    break;
                }
                let ip = i * p as usize;
                if ip > bound {
                    break;
                }
                spf[ip] = p;
            }
        }
        SpfSieve { spf }
    }

    pub fn bound(&self) -> usize {
        self.spf.len() - 1
    }

    #[inline]
    pub fn smallest_factor(&self, n: usize) -> u32 {
        self.spf[n]
    }

    #[inline]
    pub fn is_prime(&self, n: usize) -> bool {
        n >= 2 && self.spf[n] == n as u32
    }

    pub fn primes(&self) -> Vec<u32> {
        (2..=self.bound())
            .filter(|&n| self.is_prime(n))
            .map(|n| n as u32)
            .collect()
    }

    /// (p, e) pairs of n, smallest prime first.
    pub fn factorize(&self, mut n: usize) -> Vec<(u32, u32)> {
        assert!(n >= 1 && n <= self.bound());
        let mut out = Vec::new();
        while n > 1 {
            let p = self.spf[n];
            let mut e = 0;
            while n % p as usize == 0 {
                n /= p as usize;
                e += 1;
            }
            out.push((p, e));
        }
        out
    }

    /// Splits n as (p^e, rest) where p is the smallest prime factor of n.
    /// Requires n >= 2.
    #[inline]
    pub fn split_prime_power(&self, n: usize) -> (usize, usize) {
        let p = self.spf[n] as usize;
        let mut pe = p;
        let mut rest = n / p;
        while rest % p == 0 {
            rest /= p;
            pe *= p;
        }
        (pe, rest)
    }

    /// All divisors of n, ascending.
    pub fn divisors(&self, n: usize) -> Vec<u64> {
        let mut divs: Vec<u64> = vec![1];
        for (p, e) in self.factorize(n) {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p as u64;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

/// Primes up to bound without keeping the factor table.
pub fn primes_up_to(bound: usize) -> Vec<u32> {
    if bound < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; bound + 1];
    let mut out = Vec::new();
    for n in 2..=bound {
        if !composite[n] {
            out.push(n as u32);
            let mut m = n * n;
            while m <= bound {
                composite[m] = true;
                m += n;
            }
        }
    }
    out
}

/// Table of the k-fold divisor function d_k(n) for n <= bound, built
/// multiplicatively: d_k(p^e) = C(e + k - 1, k - 1).
pub fn divisor_count_table(k: u32, bound: usize, sieve: &SpfSieve) -> Vec<f64> {
    assert!(sieve.bound() >= bound);
    let mut table = vec![0.0f64; bound + 1];
    if bound >= 1 {
        table[1] = 1.0;
    }
    for n in 2..=bound {
        let (pe, rest) = sieve.split_prime_power(n);
        if rest == 1 {
            let e = pe_exponent(pe, sieve.smallest_factor(n) as usize);
            table[n] = binomial(e + k as u64 - 1, k as u64 - 1) as f64;
        } else {
            table[n] = table[pe] * table[rest];
        }
    }
    table
}

fn pe_exponent(mut pe: usize, p: usize) -> u64 {
    let mut e = 0;
    while pe > 1 {
        pe /= p;
        e += 1;
    }
    e
}

/// Binomial coefficient, exact for the small arguments the divisor tables use.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spf_marks_primes_and_factors() {
        let s = SpfSieve::new(100);
        assert!(s.is_prime(2) && s.is_prime(97) && !s.is_prime(91));
        assert_eq!(s.factorize(60), vec![(2, 2), (3, 1), (5, 1)]);
        assert_eq!(s.split_prime_power(48), (16, 3));
        assert_eq!(s.divisors(12), vec![1, 2, 3, 4, 6, 12]);
    }

    #[test]
    fn primes_up_to_matches_sieve() {
        let s = SpfSieve::new(1000);
        assert_eq!(s.primes(), primes_up_to(1000));
        assert_eq!(primes_up_to(1000).len(), 168);
    }

    #[test]
    fn divisor_counts() {
        let s = SpfSieve::new(100);
        let d2 = divisor_count_table(2, 100, &s);
        assert_eq!(d2[6], 4.0);
        assert_eq!(d2[36], 9.0);
        let d3 = divisor_count_table(3, 100, &s);
        // d_3(p^2) = C(4,2) = 6
        assert_eq!(d3[4], 6.0);
        assert_eq!(d3[12], 3.0 * 6.0);
    }
}
