//! Exact Fourier coefficients tau(n) of the discriminant form (weight 12,
//! level 1) and their normalized values lambda(n) = tau(n) n^{-11/2}.
//!
//! The q-expansion is Euler's product prod (1 - q^m) expanded by the
//! pentagonal-number theorem (a sparse series), raised to the 24th power by
//! 24 sequential sparse multiplications, then shifted by one power of q.
//! Every pass is exact integer arithmetic.

use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::sieve::primes_up_to;

/// Cache-format version; bumped whenever the on-disk layout changes.
pub const CACHE_VERSION: u32 = 1;
const CACHE_MAGIC: &[u8; 11] = b"SYMSUM-TAU1";

mod wide {
    //! Fixed-width 192-bit two's-complement integers for the expansion passes.
    //!
    //! The pass inner loop performs ~26 N^{3/2} add/subs; heap bigints cost an
    //! order of magnitude more per op. 192 bits leaves > 60 bits of headroom
    //! over |tau(n)| <= d(n) n^{11/2} at the documented cap N = 2e6, and every
    //! operation is overflow-checked, so a violated headroom assumption is a
    //! hard error, never a wrong coefficient.

    use num_bigint::BigInt;

    #[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
    pub(super) struct I192(pub [u64; 3]);

    impl I192 {
        pub const ZERO: I192 = I192([0; 3]);

        pub fn from_i64(v: i64) -> Self {
            let ext = if v < 0 { u64::MAX } else { 0 };
            I192([v as u64, ext, ext])
        }

        #[inline]
        fn sign_bit(self) -> bool {
            self.0[2] >> 63 == 1
        }

        /// Two's-complement add; the bool is true on signed overflow.
        #[inline]
        pub fn overflowing_add(self, rhs: I192) -> (I192, bool) {
            let (r0, c0) = self.0[0].overflowing_add(rhs.0[0]);
            let (t1, c1a) = self.0[1].overflowing_add(rhs.0[1]);
            let (r1, c1b) = t1.overflowing_add(c0 as u64);
            let t2 = self.0[2].wrapping_add(rhs.0[2]);
            let r2 = t2.wrapping_add((c1a | c1b) as u64);
            let out = I192([r0, r1, r2]);
            let ovf = self.sign_bit() == rhs.sign_bit() && out.sign_bit() != self.sign_bit();
            (out, ovf)
        }

        #[inline]
        pub fn overflowing_sub(self, rhs: I192) -> (I192, bool) {
            let (r0, b0) = self.0[0].overflowing_sub(rhs.0[0]);
            let (t1, b1a) = self.0[1].overflowing_sub(rhs.0[1]);
            let (r1, b1b) = t1.overflowing_sub(b0 as u64);
            let t2 = self.0[2].wrapping_sub(rhs.0[2]);
            let r2 = t2.wrapping_sub((b1a | b1b) as u64);
            let out = I192([r0, r1, r2]);
            let ovf = self.sign_bit() != rhs.sign_bit() && out.sign_bit() != self.sign_bit();
            (out, ovf)
        }

        pub fn to_bigint(self) -> BigInt {
            let mut bytes = [0u8; 24];
            for (i, limb) in self.0.iter().enumerate() {
                bytes[i * 8..(i + 1) * 8].copy_from_slice(&limb.to_le_bytes());
            }
            BigInt::from_signed_bytes_le(&bytes)
        }
    }

}

use wide::I192;

/// Exact integer q-expansion, coefficients indexed 1..=N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    coeffs: Vec<BigInt>, // coeffs[0] is an unused zero slot
}

impl QSeries {
    pub(crate) fn from_one_indexed(mut coeffs: Vec<BigInt>) -> Self {
        assert!(coeffs.len() >= 2, "series needs at least one coefficient");
        coeffs[0] = BigInt::zero();
        QSeries { coeffs }
    }

    pub fn bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of q^n, 1 <= n <= bound.
    pub fn coeff(&self, n: usize) -> &BigInt {
        assert!(n >= 1 && n <= self.bound(), "index {n} out of 1..={}", self.bound());
        &self.coeffs[n]
    }

    /// (n, coefficient) pairs, ascending n.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &BigInt)> {
        self.coeffs.iter().enumerate().skip(1)
    }
}

/// Options for [`delta_qexpansion_with`].
#[derive(Debug, Clone, Copy)]
pub struct ExpansionOptions {
    pub limits: Limits,
    /// Worker threads for the multiplication passes. 1 = fully serial
    /// (in-place); results are bit-identical for every thread count.
    pub threads: usize,
}

impl Default for ExpansionOptions {
    fn default() -> Self {
        ExpansionOptions {
            limits: Limits::default(),
            threads: 1,
        }
    }
}

/// tau(1..=n) of the discriminant form, serial construction, default caps.
pub fn delta_qexpansion(n: usize) -> Result<QSeries> {
    delta_qexpansion_with(n, &ExpansionOptions::default())
}

pub fn delta_qexpansion_with(n: usize, opts: &ExpansionOptions) -> Result<QSeries> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "q-expansion bound must be at least 1".into(),
        ));
    }
    if n as u64 > opts.limits.qexpansion_max {
        return Err(Error::ResourceCap {
            what: "q-expansion bound",
            requested: n as u64,
            cap: opts.limits.qexpansion_max,
        });
    }

    // Coefficients of E(q)^k live on exponents 0..=n-1; the final shift by q
    // sends exponent e to coefficient index e+1.
    let len = n;
    let pent = pentagonal_terms(len.saturating_sub(1));
    let mut cur = vec![I192::ZERO; len];
    cur[0] = I192::from_i64(1);

    let threads = opts.threads.max(1);
    if threads == 1 {
        for _ in 0..24 {
            pass_in_place(&mut cur, &pent)?;
        }
    } else {
        let mut next = vec![I192::ZERO; len];
        for _ in 0..24 {
            pass_blocked(&cur, &pent, &mut next, threads)?;
            std::mem::swap(&mut cur, &mut next);
        }
    }

    let mut coeffs = Vec::with_capacity(len + 1);
    coeffs.push(BigInt::zero());
    for c in &cur {
        coeffs.push(c.to_bigint());
    }
    let series = QSeries::from_one_indexed(coeffs);
    debug_assert!(series.coeff(1).is_one());
    Ok(series)
}

/// Generalized pentagonal exponents g <= max_exp with the sign of (-1)^k,
/// ascending, including (0, +).
fn pentagonal_terms(max_exp: usize) -> Vec<(u32, bool)> {
    let mut terms = vec![(0u32, false)];
    let mut k = 1usize;
    loop {
        let g1 = k * (3 * k - 1) / 2;
        if g1 > max_exp {
            break;
        }
        let neg = k % 2 == 1;
        terms.push((g1 as u32, neg));
        let g2 = k * (3 * k + 1) / 2;
        if g2 <= max_exp {
            terms.push((g2 as u32, neg));
        }
        k += 1;
    }
    terms
}

/// One sparse multiplication by the pentagonal series, descending in place.
/// Positions below n still hold the previous pass when out[n] is formed.
fn pass_in_place(coeffs: &mut [I192], pent: &[(u32, bool)]) -> Result<()> {
    for n in (0..coeffs.len()).rev() {
        let mut acc = coeffs[n]; // g = 0 term
        let mut overflow = false;
        for &(g, neg) in &pent[1..] {
            let g = g as usize;
            if g > n {
                break;
            }
            let (next, ovf) = if neg {
                acc.overflowing_sub(coeffs[n - g])
            } else {
                acc.overflowing_add(coeffs[n - g])
            };
            acc = next;
            overflow |= ovf;
        }
        if overflow {
            return Err(overflow_error(n));
        }
        coeffs[n] = acc;
    }
    Ok(())
}

/// The same pass over disjoint output blocks, double-buffered. Each output
/// coefficient is the identical exact-integer sum, so the result does not
/// depend on the thread count.
fn pass_blocked(
    prev: &[I192],
    pent: &[(u32, bool)],
    out: &mut [I192],
    threads: usize,
) -> Result<()> {
    let len = prev.len();
    let chunk = len.div_ceil(threads);
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for (idx, block) in out.chunks_mut(chunk).enumerate() {
            let start = idx * chunk;
            handles.push(scope.spawn(move || -> Result<()> {
                for (off, slot) in block.iter_mut().enumerate() {
                    let n = start + off;
                    let mut acc = prev[n];
                    let mut overflow = false;
                    for &(g, neg) in &pent[1..] {
                        let g = g as usize;
                        if g > n {
                            break;
                        }
                        let (next, ovf) = if neg {
                            acc.overflowing_sub(prev[n - g])
                        } else {
                            acc.overflowing_add(prev[n - g])
                        };
                        acc = next;
                        overflow |= ovf;
                    }
                    if overflow {
                        return Err(overflow_error(n));
                    }
                    *slot = acc;
                }
                Ok(())
            }));
        }
        for h in handles {
            h.join().expect("expansion worker panicked")?;
        }
        Ok(())
    })
}

fn overflow_error(n: usize) -> Error {
    Error::NumericIntegrity(format!(
        "192-bit overflow in q-expansion pass at exponent {n}"
    ))
}

/// The discriminant form with exact tau table and normalized eigenvalues.
#[derive(Debug, Clone)]
pub struct HeckeEigenform {
    weight: u32,
    tau: QSeries,
    lambda: Vec<f64>,
}

impl HeckeEigenform {
    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn bound(&self) -> usize {
        self.tau.bound()
    }

    pub fn tau(&self, n: usize) -> &BigInt {
        self.tau.coeff(n)
    }

    pub fn tau_series(&self) -> &QSeries {
        &self.tau
    }

    /// lambda(n) = tau(n) n^{-11/2}.
    pub fn lambda(&self, n: usize) -> f64 {
        assert!(n >= 1 && n <= self.bound());
        self.lambda[n]
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambda
    }
}

/// Normalizes an exact tau table into floating eigenvalues.
pub fn normalize(tau: QSeries) -> Result<HeckeEigenform> {
    if !tau.coeff(1).is_one() {
        return Err(Error::InvalidArgument(
            "tau(1) must equal 1 (normalized eigenform)".into(),
        ));
    }
    let bound = tau.bound();
    let mut lambda = vec![0.0f64; bound + 1];
    for n in 1..=bound {
        // n^{11/2} = n^5 * sqrt(n); n^5 converted from u128 keeps the
        // denominator to one rounding, so dyadic values come out exact.
        let n5 = (n as u128).pow(5) as f64;
        let denom = n5 * (n as f64).sqrt();
        let t = tau.coeff(n).to_f64().ok_or_else(|| {
            Error::NumericIntegrity(format!("tau({n}) does not fit an f64 exponent"))
        })?;
        lambda[n] = t / denom;
    }
    Ok(HeckeEigenform {
        weight: 12,
        tau,
        lambda,
    })
}

/// Exact tau(n) for n <= n_max by the O(N^2) recurrence
/// tau(n) = n^4 sigma(n) - 24 sum_{i<n} i^2 (35 i^2 - 52 i n + 18 n^2)
/// sigma(i) sigma(n-i), kept deliberately independent of the q-expansion
/// path. Index 0 of the result is unused.
pub fn niebur_tau_table(n_max: usize) -> Result<Vec<i128>> {
    niebur_tau_table_with(n_max, &Limits::default())
}

pub fn niebur_tau_table_with(n_max: usize, limits: &Limits) -> Result<Vec<i128>> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("oracle bound must be >= 1".into()));
    }
    if n_max as u64 > limits.niebur_oracle_max {
        return Err(Error::ResourceCap {
            what: "tau recurrence oracle bound",
            requested: n_max as u64,
            cap: limits.niebur_oracle_max,
        });
    }
    let mut sigma = vec![0i128; n_max + 1];
    for d in 1..=n_max {
        let mut m = d;
        while m <= n_max {
            sigma[m] += d as i128;
            m += d;
        }
    }
    let ovf = || Error::NumericIntegrity("i128 overflow in tau recurrence oracle".into());
    let mut tau = vec![0i128; n_max + 1];
    for n in 1..=n_max {
        let ni = n as i128;
        let mut acc: i128 = 0;
        for i in 1..n {
            let ii = i as i128;
            let poly = 35 * ii * ii - 52 * ii * ni + 18 * ni * ni;
            let term = ii
                .checked_mul(ii)
                .and_then(|v| v.checked_mul(poly))
                .and_then(|v| v.checked_mul(sigma[i]))
                .and_then(|v| v.checked_mul(sigma[n - i]))
                .ok_or_else(ovf)?;
            acc = acc.checked_add(term).ok_or_else(ovf)?;
        }
        let lead = ni
            .checked_pow(4)
            .and_then(|v| v.checked_mul(sigma[n]))
            .ok_or_else(ovf)?;
        tau[n] = lead
            .checked_sub(acc.checked_mul(24).ok_or_else(ovf)?)
            .ok_or_else(ovf)?;
    }
    Ok(tau)
}

/// Compares the q-expansion table against the recurrence oracle; returns the
/// first mismatching index, if any.
pub fn first_oracle_mismatch(
    form: &HeckeEigenform,
    bound: usize,
    limits: &Limits,
) -> Result<Option<usize>> {
    if bound > form.bound() {
        return Err(Error::InvalidArgument(format!(
            "oracle bound {bound} exceeds table bound {}",
            form.bound()
        )));
    }
    let oracle = niebur_tau_table_with(bound, limits)?;
    for n in 1..=bound {
        if *form.tau(n) != BigInt::from(oracle[n]) {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// One recorded failure of an exact tau identity.
#[derive(Debug, Clone, Serialize)]
pub enum HeckeViolation {
    /// tau(mn) != tau(m) tau(n) for coprime m, n.
    Multiplicativity { m: u64, n: u64 },
    /// tau(p^{e+1}) != tau(p) tau(p^e) - p^11 tau(p^{e-1}).
    PowerRecurrence { p: u64, exponent: u32 },
}

#[derive(Debug, Clone, Serialize)]
pub struct HeckeReport {
    pub bound: usize,
    pub coprime_pairs_checked: u64,
    pub prime_powers_checked: u64,
    pub violations: Vec<HeckeViolation>,
}

impl HeckeReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Sweeps every coprime pair m <= n with mn <= bound and every prime power
/// chain, asserting the exact integer identities.
pub fn verify_hecke_relations(form: &HeckeEigenform, bound: usize) -> Result<HeckeReport> {
    if bound > form.bound() {
        return Err(Error::InvalidArgument(format!(
            "verification bound {bound} exceeds table bound {}",
            form.bound()
        )));
    }
    let mut violations = Vec::new();
    let mut pairs = 0u64;
    for m in 2..=bound {
        if m * m > bound {
            break;
        }
        for n in (m + 1)..=(bound / m) {
            if m.gcd(&n) != 1 {
                continue;
            }
            pairs += 1;
            let lhs = form.tau(m * n);
            let rhs = form.tau(m) * form.tau(n);
            if *lhs != rhs {
                violations.push(HeckeViolation::Multiplicativity {
                    m: m as u64,
                    n: n as u64,
                });
            }
        }
    }

    let mut powers = 0u64;
    for p in primes_up_to(bound) {
        let p = p as usize;
        let p11 = BigInt::from(p).pow(11);
        // tau(p^{e+1}) = tau(p) tau(p^e) - p^11 tau(p^{e-1})
        let mut pe = p; // p^e with e = 1
        let mut e = 1u32;
        while pe <= bound / p {
            let next = pe * p;
            powers += 1;
            let prev = if e == 1 {
                BigInt::one()
            } else {
                form.tau(pe / p).clone()
            };
            let rhs = form.tau(p) * form.tau(pe) - &p11 * prev;
            if *form.tau(next) != rhs {
                violations.push(HeckeViolation::PowerRecurrence {
                    p: p as u64,
                    exponent: e + 1,
                });
            }
            pe = next;
            e += 1;
        }
    }

    Ok(HeckeReport {
        bound,
        coprime_pairs_checked: pairs,
        prime_powers_checked: powers,
        violations,
    })
}

/// CSV rows `n,tau,lambda`, lambda at 17 significant digits.
pub fn write_tau_csv<W: Write>(form: &HeckeEigenform, mut w: W) -> std::io::Result<()> {
    writeln!(w, "n,tau,lambda")?;
    for n in 1..=form.bound() {
        writeln!(w, "{},{},{:.16e}", n, form.tau(n), form.lambda(n))?;
    }
    Ok(())
}

/// Binary cache: magic, format version, N, then length-prefixed
/// little-endian two's-complement integers.
pub fn write_tau_cache(path: &Path, series: &QSeries) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e| Error::io(path, e);
    w.write_all(CACHE_MAGIC).map_err(io_err)?;
    w.write_all(&CACHE_VERSION.to_le_bytes()).map_err(io_err)?;
    w.write_all(&(series.bound() as u64).to_le_bytes())
        .map_err(io_err)?;
    for n in 1..=series.bound() {
        let bytes = series.coeff(n).to_signed_bytes_le();
        w.write_all(&(bytes.len() as u32).to_le_bytes())
            .map_err(io_err)?;
        w.write_all(&bytes).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn read_tau_cache(path: &Path) -> Result<QSeries> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let io_err = |e| Error::io(path, e);
    let mut magic = [0u8; 11];
    r.read_exact(&mut magic).map_err(io_err)?;
    if &magic != CACHE_MAGIC {
        return Err(Error::CacheMismatch {
            path: path.into(),
            reason: "bad magic".into(),
        });
    }
    let mut v4 = [0u8; 4];
    r.read_exact(&mut v4).map_err(io_err)?;
    let version = u32::from_le_bytes(v4);
    if version != CACHE_VERSION {
        return Err(Error::CacheMismatch {
            path: path.into(),
            reason: format!("format version {version}, expected {CACHE_VERSION}"),
        });
    }
    let mut n8 = [0u8; 8];
    r.read_exact(&mut n8).map_err(io_err)?;
    let n = u64::from_le_bytes(n8) as usize;
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(BigInt::zero());
    let mut len4 = [0u8; 4];
    for _ in 0..n {
        r.read_exact(&mut len4).map_err(io_err)?;
        let len = u32::from_le_bytes(len4) as usize;
        let mut buf = vec![0u8; len];
        r.read_exact(&mut buf).map_err(io_err)?;
        coeffs.push(BigInt::from_signed_bytes_le(&buf));
    }
    Ok(QSeries::from_one_indexed(coeffs))
}

/// d(n) table as f64, for the Deligne-bound sweeps.
pub fn divisor_function(bound: usize) -> Vec<f64> {
    let mut d = vec![0.0f64; bound + 1];
    for i in 1..=bound {
        let mut m = i;
        while m <= bound {
            d[m] += 1.0;
            m += i;
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    const TAU_10: [i64; 10] = [
        1,
        -24,
        252,
        -1472,
        4830,
        -6048,
        -16744,
        84480,
        -113643,
        -115920,
    ];

    #[test]
    fn rejects_zero_and_over_cap() {
        assert!(matches!(
            delta_qexpansion(0),
            Err(Error::InvalidArgument(_))
        ));
        let err = delta_qexpansion(2_000_001).unwrap_err();
        match err {
            Error::ResourceCap { cap, .. } => assert_eq!(cap, 2_000_000),
            other => panic!("expected cap error, got {other}"),
        }
    }

    #[test]
    fn first_coefficients() {
        let series = delta_qexpansion(10).unwrap();
        for (n, want) in TAU_10.iter().enumerate() {
            assert_eq!(series.coeff(n + 1), &BigInt::from(*want), "tau({})", n + 1);
        }
    }

    #[test]
    fn single_coefficient_series() {
        let series = delta_qexpansion(1).unwrap();
        assert_eq!(series.bound(), 1);
        assert!(series.coeff(1).is_one());
    }

    #[test]
    fn matches_recurrence_oracle_to_500() {
        let series = delta_qexpansion(500).unwrap();
        let oracle = niebur_tau_table(500).unwrap();
        for n in 1..=500 {
            assert_eq!(
                series.coeff(n),
                &BigInt::from_i128(oracle[n]).unwrap(),
                "tau({n})"
            );
        }
    }

    #[test]
    fn threaded_expansion_is_identical() {
        let serial = delta_qexpansion(800).unwrap();
        let opts = ExpansionOptions {
            threads: 3,
            ..Default::default()
        };
        let threaded = delta_qexpansion_with(800, &opts).unwrap();
        assert_eq!(serial, threaded);
    }

    #[test]
    fn normalization_values() {
        let form = normalize(delta_qexpansion(16).unwrap()).unwrap();
        assert_eq!(form.lambda(1), 1.0);
        assert_eq!(form.lambda(4), -0.71875); // -1472 / 2^11, exact dyadic
        let l2 = form.lambda(2);
        assert!((l2 - (-0.5303300858899106)).abs() < 1e-15, "lambda(2) = {l2}");
        // multiplicativity at the float level: lambda(6) = lambda(2) lambda(3)
        let rel = (form.lambda(6) - form.lambda(2) * form.lambda(3)).abs()
            / form.lambda(6).abs();
        assert!(rel < 1e-9);
    }

    #[test]
    fn normalize_requires_unit_lead() {
        let bad = QSeries::from_one_indexed(vec![
            BigInt::zero(),
            BigInt::from(2),
            BigInt::from(5),
        ]);
        assert!(matches!(normalize(bad), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn deligne_bound_holds_to_2000() {
        let form = normalize(delta_qexpansion(2000).unwrap()).unwrap();
        let d = divisor_function(2000);
        for n in 1..=2000 {
            assert!(
                form.lambda(n).abs() <= d[n] + 1e-9,
                "lambda({n}) = {} vs d = {}",
                form.lambda(n),
                d[n]
            );
        }
    }

    #[test]
    fn hecke_relations_hold() {
        let form = normalize(delta_qexpansion(2000).unwrap()).unwrap();
        let report = verify_hecke_relations(&form, 2000).unwrap();
        assert!(report.passed(), "violations: {:?}", report.violations);
        assert!(report.coprime_pairs_checked > 1000);
        assert!(report.prime_powers_checked > 0);
    }

    #[test]
    fn hecke_recurrence_example_at_two() {
        // tau(4) = tau(2)^2 - 2^11 tau(1) = 576 - 2048
        let form = normalize(delta_qexpansion(4).unwrap()).unwrap();
        let rhs = form.tau(2) * form.tau(2) - BigInt::from(2048);
        assert_eq!(form.tau(4), &rhs);
        assert_eq!(rhs, BigInt::from(-1472));
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tau.bin");
        let series = delta_qexpansion(300).unwrap();
        write_tau_cache(&path, &series).unwrap();
        let back = read_tau_cache(&path).unwrap();
        assert_eq!(series, back);
    }

    #[test]
    fn cache_rejects_bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.bin");
        std::fs::write(&path, b"NOTAHEADERXXplusmore").unwrap();
        assert!(matches!(
            read_tau_cache(&path),
            Err(Error::CacheMismatch { .. })
        ));
    }

    #[test]
    fn csv_shape() {
        let form = normalize(delta_qexpansion(4).unwrap()).unwrap();
        let mut buf = Vec::new();
        write_tau_csv(&form, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("n,tau,lambda"));
        assert!(lines.next().unwrap().starts_with("1,1,"));
        assert_eq!(text.lines().count(), 5);
    }
}
