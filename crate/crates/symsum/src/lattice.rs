//! Six-square representation counts r6(n) via the character identity
//! r6(n) = 16 l(n) - 4 v(n), the divisor weights l and v themselves, and a
//! lattice-point enumeration oracle that never touches the identity.

use std::io::Write;

use serde::Serialize;

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::sympow::chi4;

/// Exact integer tables of r6, l, v for 1..=bound.
///
/// l(n) = sum_{d|n} chi(d) (n/d)^2 and v(n) = sum_{d|n} chi(d) d^2; both are
/// multiplicative. 16 l(n) < 16 zeta(2) n^2 keeps everything inside i64 up to
/// the documented sieve cap.
#[derive(Debug, Clone)]
pub struct RepWeights {
    r6: Vec<i64>,
    l: Vec<i64>,
    v: Vec<i64>,
}

impl RepWeights {
    pub fn bound(&self) -> usize {
        self.r6.len() - 1
    }

    pub fn r6(&self, n: usize) -> i64 {
        self.r6[n]
    }

    pub fn l(&self, n: usize) -> i64 {
        self.l[n]
    }

    pub fn v(&self, n: usize) -> i64 {
        self.v[n]
    }
}

/// Builds the weight tables by a divisor sweep: for each odd d, chi(d) is
/// added into l at weight (n/d)^2 and into v at weight d^2 over all
/// multiples n of d.
pub fn weight_tables(bound: usize) -> Result<RepWeights> {
    weight_tables_with(bound, &Limits::default())
}

pub fn weight_tables_with(bound: usize, limits: &Limits) -> Result<RepWeights> {
    if bound == 0 {
        return Err(Error::InvalidArgument(
            "weight table bound must be >= 1".into(),
        ));
    }
    if bound as u64 > limits.weight_sieve_max {
        return Err(Error::ResourceCap {
            what: "weight sieve bound",
            requested: bound as u64,
            cap: limits.weight_sieve_max,
        });
    }
    let mut l = vec![0i64; bound + 1];
    let mut v = vec![0i64; bound + 1];
    let mut d = 1usize;
    while d <= bound {
        let s = chi4(d as u64);
        debug_assert!(s != 0);
        let d2 = (d as i64) * (d as i64);
        let vd = s as i64 * d2;
        let mut k = 1usize;
        let mut n = d;
        while n <= bound {
            let k2 = (k as i64) * (k as i64);
            l[n] += s as i64 * k2;
            v[n] += vd;
            k += 1;
            n += d;
        }
        d += 2; // chi vanishes on even d
    }
    let mut r6 = vec![0i64; bound + 1];
    for n in 1..=bound {
        r6[n] = 16 * l[n] - 4 * v[n];
        debug_assert!(r6[n] > 0, "r6({n}) = {} must be positive", r6[n]);
    }
    Ok(RepWeights { r6, l, v })
}

/// r3 counts for 0..=bound by direct enumeration of (x, y, z) over all signs:
/// exact, independent of any divisor identity.
fn r3_table(bound: usize) -> Vec<u64> {
    let mut r3 = vec![0u64; bound + 1];
    let root = isqrt(bound as u64) as i64;
    for x in -root..=root {
        let x2 = (x * x) as usize;
        let ry = isqrt((bound - x2) as u64) as i64;
        for y in -ry..=ry {
            let xy2 = x2 + (y * y) as usize;
            let rz = isqrt((bound - xy2) as u64) as i64;
            for z in -rz..=rz {
                r3[xy2 + (z * z) as usize] += 1;
            }
        }
    }
    r3
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    while r * r > n {
        r -= 1;
    }
    r
}

/// Exact count of integer 6-tuples with squares summing to n, as the
/// self-convolution of the enumerated r3 array.
pub fn r6_bruteforce(n: usize) -> Result<u64> {
    r6_bruteforce_with(n, &Limits::default())
}

pub fn r6_bruteforce_with(n: usize, limits: &Limits) -> Result<u64> {
    check_oracle_cap(n, limits)?;
    let r3 = r3_table(n);
    Ok((0..=n).map(|m| r3[m] * r3[n - m]).sum())
}

/// r6 for every n in 0..=bound, one r3 enumeration plus a convolution sweep.
pub fn r6_bruteforce_table(bound: usize, limits: &Limits) -> Result<Vec<u64>> {
    check_oracle_cap(bound, limits)?;
    let r3 = r3_table(bound);
    let mut out = vec![0u64; bound + 1];
    for (n, slot) in out.iter_mut().enumerate() {
        *slot = (0..=n).map(|m| r3[m] * r3[n - m]).sum();
    }
    Ok(out)
}

fn check_oracle_cap(n: usize, limits: &Limits) -> Result<()> {
    if n as u64 > limits.r6_oracle_max {
        return Err(Error::ResourceCap {
            what: "r6 oracle bound",
            requested: n as u64,
            cap: limits.r6_oracle_max,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct R6Report {
    pub bound: usize,
    pub first_mismatch: Option<usize>,
}

impl R6Report {
    pub fn passed(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

/// Asserts the sieve tables against the enumeration oracle for every
/// 1 <= n <= bound.
pub fn verify_r6_identity(bound: usize) -> Result<R6Report> {
    verify_r6_identity_with(bound, &Limits::default())
}

pub fn verify_r6_identity_with(bound: usize, limits: &Limits) -> Result<R6Report> {
    let tables = weight_tables_with(bound, limits)?;
    let oracle = r6_bruteforce_table(bound, limits)?;
    let first_mismatch = (1..=bound).find(|&n| tables.r6(n) as u64 != oracle[n]);
    Ok(R6Report {
        bound,
        first_mismatch,
    })
}

/// CSV rows `n,r6,l,v`.
pub fn write_weights_csv<W: Write>(tables: &RepWeights, mut w: W) -> std::io::Result<()> {
    writeln!(w, "n,r6,l,v")?;
    for n in 1..=tables.bound() {
        writeln!(w, "{},{},{},{}", n, tables.r6(n), tables.l(n), tables.v(n))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::SpfSieve;

    #[test]
    fn hand_values() {
        let t = weight_tables(10).unwrap();
        assert_eq!((t.l(1), t.v(1), t.r6(1)), (1, 1, 12));
        assert_eq!((t.l(2), t.v(2), t.r6(2)), (4, 1, 60));
        assert_eq!((t.l(3), t.v(3), t.r6(3)), (8, -8, 160));
        assert_eq!(t.r6(4), 252);
    }

    #[test]
    fn oracle_values() {
        assert_eq!(r6_bruteforce(0).unwrap(), 1); // zero vector only
        assert_eq!(r6_bruteforce(1).unwrap(), 12);
        assert_eq!(r6_bruteforce(2).unwrap(), 60);
        assert_eq!(r6_bruteforce(3).unwrap(), 160);
        assert_eq!(r6_bruteforce(4).unwrap(), 252);
    }

    #[test]
    fn identity_holds_to_500() {
        let report = verify_r6_identity(500).unwrap();
        assert!(report.passed(), "mismatch at {:?}", report.first_mismatch);
    }

    #[test]
    fn prime_formulas() {
        // l(p) = p^2 + chi(p), v(p) = 1 + p^2 chi(p)
        let t = weight_tables(100).unwrap();
        for p in [3usize, 5, 7, 11, 13] {
            let c = chi4(p as u64) as i64;
            let p2 = (p * p) as i64;
            assert_eq!(t.l(p), p2 + c, "l({p})");
            assert_eq!(t.v(p), 1 + p2 * c, "v({p})");
        }
        // l(p^2) = p^4 + p^2 chi(p) + chi(p^2), v(p^2) = 1 + p^2 chi(p) + p^4 chi(p^2)
        for p in [3i64, 5, 7] {
            let c = chi4(p as u64) as i64;
            let c2 = chi4((p * p) as u64) as i64;
            let (p2, p4) = (p * p, p * p * p * p);
            assert_eq!(t.l((p * p) as usize), p4 + p2 * c + c2);
            assert_eq!(t.v((p * p) as usize), 1 + p2 * c + p4 * c2);
        }
    }

    #[test]
    fn l_and_v_multiplicative() {
        let t = weight_tables(400).unwrap();
        let sieve = SpfSieve::new(400);
        for m in 2..=20usize {
            for n in 2..=20usize {
                if m * n > 400 || !coprime(m, n, &sieve) {
                    continue;
                }
                assert_eq!(t.l(m * n), t.l(m) * t.l(n), "l({m}*{n})");
                assert_eq!(t.v(m * n), t.v(m) * t.v(n), "v({m}*{n})");
            }
        }
    }

    fn coprime(m: usize, n: usize, sieve: &SpfSieve) -> bool {
        let fm = sieve.factorize(m);
        let fn_ = sieve.factorize(n);
        fm.iter().all(|(p, _)| fn_.iter().all(|(q, _)| p != q))
    }

    #[test]
    fn caps_enforced() {
        assert!(matches!(
            r6_bruteforce(200_000),
            Err(Error::ResourceCap { .. })
        ));
        assert!(matches!(
            weight_tables(3_000_000),
            Err(Error::ResourceCap { .. })
        ));
        assert!(matches!(weight_tables(0), Err(Error::InvalidArgument(_))));
    }
}
