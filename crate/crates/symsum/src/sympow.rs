//! Symmetric-power coefficient tables lambda_{sym^j f}(n), built from Satake
//! angles through local Euler-factor recurrences, plus the Hecke identity
//! checks relating them back to lambda_f.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::config::{rel_dev, Tolerances};
use crate::error::{Error, Result};
use crate::modform::HeckeEigenform;
use crate::sieve::SpfSieve;

/// The non-principal Dirichlet character mod 4.
#[derive(Debug, Clone, Copy, Default)]
pub struct CharacterMod4;

impl CharacterMod4 {
    #[inline]
    pub fn eval(&self, n: u64) -> i32 {
        chi4(n)
    }
}

/// chi(n): 1 for n = 1 mod 4, -1 for n = 3 mod 4, 0 for even n.
/// Completely multiplicative.
#[inline]
pub fn chi4(n: u64) -> i32 {
    match n % 4 {
        1 => 1,
        3 => -1,
        _ => 0,
    }
}

/// Satake angles theta_p in [0, pi] with 2 cos(theta_p) = lambda_f(p).
#[derive(Debug, Clone)]
pub struct SatakeAngles {
    bound: usize,
    /// Indexed by p; NaN on composite slots.
    theta: Vec<f64>,
    primes: Vec<u32>,
}

impl SatakeAngles {
    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn theta(&self, p: usize) -> Option<f64> {
        if p <= self.bound && !self.theta[p].is_nan() {
            Some(self.theta[p])
        } else {
            None
        }
    }
}

/// theta_p = arccos(clamp(lambda_f(p)/2, -1, 1)) for every prime p <= bound.
/// Deligne guarantees |lambda_f(p)| <= 2; the clamp only absorbs float dust,
/// and anything beyond the slack is an upstream integrity failure.
pub fn satake_angles(form: &HeckeEigenform, primes_up_to: usize) -> Result<SatakeAngles> {
    let slack = Tolerances::default().satake_slack;
    if primes_up_to > form.bound() {
        return Err(Error::InvalidArgument(format!(
            "angle bound {primes_up_to} exceeds eigenform table bound {}",
            form.bound()
        )));
    }
    let primes = crate::sieve::primes_up_to(primes_up_to);
    let mut theta = vec![f64::NAN; primes_up_to + 1];
    for &p in &primes {
        let lam = form.lambda(p as usize);
        if lam.abs() > 2.0 + slack {
            return Err(Error::Integrity(format!(
                "|lambda({p})| = {} violates the Deligne bound",
                lam.abs()
            )));
        }
        theta[p as usize] = (lam / 2.0).clamp(-1.0, 1.0).acos();
    }
    Ok(SatakeAngles {
        bound: primes_up_to,
        theta,
        primes,
    })
}

/// Real coefficients e_0..e_{j+1} of prod_{i=0}^{j} (1 - alpha^{j-i} beta^i T),
/// the inverse local Euler factor of the j-th symmetric power at one prime.
#[derive(Debug, Clone)]
pub struct LocalFactor {
    j: u32,
    elem: Vec<f64>,
}

impl LocalFactor {
    pub fn degree(&self) -> u32 {
        self.j
    }

    /// e_r, 0 <= r <= j+1.
    pub fn elem(&self) -> &[f64] {
        &self.elem
    }
}

/// Expands the local factor in complex arithmetic and realifies. The roots
/// e^{i (j - 2i) theta} come in conjugate pairs, so surviving imaginary parts
/// are pure rounding; anything above the residue threshold is an error.
pub fn local_factor(j: u32, theta: f64) -> Result<LocalFactor> {
    if j == 0 {
        return Err(Error::InvalidArgument(
            "symmetric-power degree must be >= 1".into(),
        ));
    }
    let residue_cap = Tolerances::default().imag_residue;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); j as usize + 2];
    coeffs[0] = Complex64::new(1.0, 0.0);
    for i in 0..=j {
        // root = e^{i (j - 2i) theta}
        let arg = (j as f64 - 2.0 * i as f64) * theta;
        let root = Complex64::from_polar(1.0, arg);
        // multiply the polynomial by (1 - root T)
        for r in (1..=(i as usize + 1)).rev() {
            let prev = coeffs[r - 1];
            coeffs[r] -= root * prev;
        }
    }
    let mut elem = Vec::with_capacity(coeffs.len());
    for (r, c) in coeffs.iter().enumerate() {
        if c.im.abs() > residue_cap {
            return Err(Error::NumericIntegrity(format!(
                "imaginary residue {} at e_{r} exceeds {residue_cap}",
                c.im
            )));
        }
        elem.push(c.re);
    }
    Ok(LocalFactor { j, elem })
}

/// lambda_{sym^j f}(p^m) for 0 <= m <= m_max by power-series inversion of the
/// local polynomial: h_0 = 1, h_m = -sum_{r=1}^{min(m, j+1)} e_r h_{m-r}.
pub fn prime_power_coeffs(lf: &LocalFactor, m_max: usize) -> Vec<f64> {
    let mut h = vec![0.0f64; m_max + 1];
    h[0] = 1.0;
    let deg = lf.elem.len() - 1; // j + 1
    for m in 1..=m_max {
        let mut acc = 0.0;
        for r in 1..=m.min(deg) {
            acc -= lf.elem[r] * h[m - r];
        }
        h[m] = acc;
    }
    h
}

/// Table of lambda_{sym^j f}(n) for n <= bound.
#[derive(Debug, Clone)]
pub struct SymPowTable {
    j: u32,
    values: Vec<f64>,
}

impl SymPowTable {
    pub fn degree(&self) -> u32 {
        self.j
    }

    pub fn bound(&self) -> usize {
        self.values.len() - 1
    }

    #[inline]
    pub fn value(&self, n: usize) -> f64 {
        self.values[n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values[..]
    }
}

/// Fills the table multiplicatively: prime powers from the local-factor
/// recurrence, composites as exact products of table entries over the
/// smallest-prime-factor split. Output is independent of traversal order.
pub fn sympow_table(j: u32, bound: usize, angles: &SatakeAngles) -> Result<SymPowTable> {
    if j == 0 {
        return Err(Error::InvalidArgument(
            "symmetric-power degree must be >= 1".into(),
        ));
    }
    if bound == 0 {
        return Err(Error::InvalidArgument("table bound must be >= 1".into()));
    }
    if angles.bound() < bound {
        return Err(Error::InvalidArgument(format!(
            "angles cover primes up to {}, table needs {bound}",
            angles.bound()
        )));
    }
    let sieve = SpfSieve::new(bound);
    let mut values = vec![0.0f64; bound + 1];
    values[1] = 1.0;
    for &p in angles.primes() {
        let p = p as usize;
        if p > bound {
            break;
        }
        let theta = angles
            .theta(p)
            .ok_or_else(|| Error::InvalidArgument(format!("missing angle for prime {p}")))?;
        let lf = local_factor(j, theta)?;
        let mut m_max = 0;
        let mut pe = 1usize;
        while pe <= bound / p {
            pe *= p;
            m_max += 1;
        }
        let h = prime_power_coeffs(&lf, m_max);
        let mut pe = 1usize;
        for &coeff in h.iter().skip(1) {
            pe *= p;
            values[pe] = coeff;
        }
    }
    for n in 2..=bound {
        let (pe, rest) = sieve.split_prime_power(n);
        if rest > 1 {
            values[n] = values[pe] * values[rest];
        }
    }
    Ok(SymPowTable { j, values })
}

/// Outcome of the per-prime Hecke identity sweep: the lift identity
/// lambda_{sym^j}(p) = lambda_f(p^j) and the square identity
/// lambda_f(p^j)^2 = 1 + sum_{l<=j} lambda_f(p^{2l}).
#[derive(Debug, Clone, Serialize)]
pub struct SquareIdentityReport {
    pub j: u32,
    pub primes_checked: usize,
    pub max_dev_lift: f64,
    pub max_dev_square: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Checks both identities at every prime p <= primes_up_to, computing
/// lambda_f(p^m) from the p-power recurrence
/// lambda(p^{m+1}) = lambda(p) lambda(p^m) - lambda(p^{m-1}).
pub fn verify_square_identity(
    form: &HeckeEigenform,
    j: u32,
    primes_up_to: usize,
    tol: &Tolerances,
) -> Result<SquareIdentityReport> {
    if j == 0 {
        return Err(Error::InvalidArgument(
            "symmetric-power degree must be >= 1".into(),
        ));
    }
    let angles = satake_angles(form, primes_up_to)?;
    let mut max_dev_lift = 0.0f64;
    let mut max_dev_square = 0.0f64;
    let mut primes_checked = 0usize;
    for &p in angles.primes() {
        let lam_p = form.lambda(p as usize);
        let pows = lambda_prime_powers(lam_p, 2 * j as usize);
        let theta = angles.theta(p as usize).unwrap();
        let lf = local_factor(j, theta)?;
        let sym_p = prime_power_coeffs(&lf, 1)[1];
        max_dev_lift = max_dev_lift.max(rel_dev(sym_p, pows[j as usize]));
        let square = pows[j as usize] * pows[j as usize];
        let sum: f64 = 1.0 + (1..=j as usize).map(|l| pows[2 * l]).sum::<f64>();
        max_dev_square = max_dev_square.max(rel_dev(square, sum));
        primes_checked += 1;
    }
    let tolerance = tol.square_identity_rel;
    Ok(SquareIdentityReport {
        j,
        primes_checked,
        max_dev_lift,
        max_dev_square,
        tolerance,
        passed: max_dev_lift <= tolerance && max_dev_square <= tolerance,
    })
}

/// lambda_f(p^m) for 0 <= m <= m_max from lambda_f(p) by the Hecke p-power
/// recurrence.
pub fn lambda_prime_powers(lam_p: f64, m_max: usize) -> Vec<f64> {
    let mut pows = vec![0.0f64; m_max + 1];
    pows[0] = 1.0;
    if m_max >= 1 {
        pows[1] = lam_p;
    }
    for m in 1..m_max {
        pows[m + 1] = lam_p * pows[m] - pows[m - 1];
    }
    pows
}

/// CSV rows `n,lambda_symj`, with j and N recorded in a header comment.
pub fn write_sympow_csv<W: Write>(table: &SymPowTable, mut w: W) -> std::io::Result<()> {
    writeln!(w, "# j={} N={}", table.degree(), table.bound())?;
    writeln!(w, "n,lambda_symj")?;
    for n in 1..=table.bound() {
        writeln!(w, "{},{:.16e}", n, table.value(n))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modform::{delta_qexpansion, divisor_function, normalize};
    use crate::sieve::divisor_count_table;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn form(n: usize) -> HeckeEigenform {
        normalize(delta_qexpansion(n).unwrap()).unwrap()
    }

    #[test]
    fn chi_values() {
        assert_eq!(chi4(1), 1);
        assert_eq!(chi4(3), -1);
        assert_eq!(chi4(4), 0);
        assert_eq!(chi4(9), 1);
        // completely multiplicative
        for a in 1..30u64 {
            for b in 1..30u64 {
                assert_eq!(chi4(a * b), chi4(a) * chi4(b));
            }
        }
        assert_eq!(CharacterMod4.eval(7), -1);
    }

    #[test]
    fn angle_at_two() {
        let angles = satake_angles(&form(50), 50).unwrap();
        let t2 = angles.theta(2).unwrap();
        assert!((t2 - 1.8391714154092522).abs() < 1e-12, "theta_2 = {t2}");
        assert_eq!(angles.theta(4), None);
        // 2 cos(theta_p) = lambda(p)
        let f = form(50);
        for &p in angles.primes() {
            assert!(
                (2.0 * angles.theta(p as usize).unwrap().cos() - f.lambda(p as usize)).abs()
                    < 1e-12
            );
        }
    }

    #[test]
    fn local_factor_boundary_angles() {
        // theta = 0 (alpha = beta = 1): (1 - T)^2
        let lf0 = local_factor(1, 0.0).unwrap();
        assert_eq!(lf0.elem(), &[1.0, -2.0, 1.0]);
        // theta = pi/2 (roots +-i): 1 + T^2
        let lf_quarter = local_factor(1, FRAC_PI_2).unwrap();
        let dev = max_abs_diff(lf_quarter.elem(), &[1.0, 0.0, 1.0]);
        assert!(dev < 1e-15);
    }

    fn max_abs_diff(got: &[f64], want: &[f64]) -> f64 {
        assert_eq!(got.len(), want.len());
        got.iter()
            .zip(want)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn local_factor_sym2_linear_coeff() {
        // e_1 = -(1 + 2 cos 2 theta) for j = 2
        for k in 1..20 {
            let theta = PI * k as f64 / 20.0;
            let lf = local_factor(2, theta).unwrap();
            let want = -(1.0 + 2.0 * (2.0 * theta).cos());
            assert!((lf.elem()[1] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn local_factor_rejects_degree_zero() {
        assert!(matches!(
            local_factor(0, 1.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn geometric_prime_powers() {
        // j=1, theta=0: 1/(1-T)^2 => h_m = m + 1
        let lf = local_factor(1, 0.0).unwrap();
        assert_eq!(prime_power_coeffs(&lf, 3), vec![1.0, 2.0, 3.0, 4.0]);
    }

    /// Complete homogeneous symmetric polynomial of degree m in the j+1 roots,
    /// by direct summation over root monomials (multisets), independent of
    /// the series-inversion recurrence.
    fn homogeneous_oracle(j: u32, theta: f64, m: usize) -> f64 {
        fn rec(
            roots: &[Complex64],
            start: usize,
            left: usize,
            acc: Complex64,
            total: &mut Complex64,
        ) {
            if left == 0 {
                *total += acc;
                return;
            }
            for i in start..roots.len() {
                rec(roots, i, left - 1, acc * roots[i], total);
            }
        }
        let roots: Vec<Complex64> = (0..=j)
            .map(|i| Complex64::from_polar(1.0, (j as f64 - 2.0 * i as f64) * theta))
            .collect();
        let mut total = Complex64::new(0.0, 0.0);
        rec(&roots, 0, m, Complex64::new(1.0, 0.0), &mut total);
        assert!(total.im.abs() < 1e-10);
        total.re
    }

    #[test]
    fn prime_power_coeffs_match_monomial_oracle() {
        for j in 1..=3u32 {
            for k in [1usize, 3, 7, 11, 16] {
                let theta = PI * k as f64 / 17.0;
                let lf = local_factor(j, theta).unwrap();
                let h = prime_power_coeffs(&lf, 4);
                for m in 0..=4usize {
                    let want = homogeneous_oracle(j, theta, m);
                    assert!(
                        (h[m] - want).abs() < 1e-10,
                        "j={j} m={m} theta={theta}: {} vs {}",
                        h[m],
                        want
                    );
                }
            }
        }
    }

    #[test]
    fn table_basics() {
        let f = form(2000);
        let angles = satake_angles(&f, 2000).unwrap();
        let t2 = sympow_table(2, 2000, &angles).unwrap();
        assert_eq!(t2.value(1), 1.0);
        // lambda_{sym^2}(2) = lambda_f(4) = -0.71875
        assert!((t2.value(2) + 0.71875).abs() < 1e-13, "{}", t2.value(2));
        // multiplicativity is exact by construction on the split the sieve uses
        assert_eq!(t2.value(6), t2.value(2) * t2.value(3));
        assert_eq!(t2.value(15), t2.value(3) * t2.value(5));
    }

    #[test]
    fn table_matches_lambda_table_for_sym1() {
        // j = 1 reproduces lambda_f itself
        let f = form(500);
        let angles = satake_angles(&f, 500).unwrap();
        let t1 = sympow_table(1, 500, &angles).unwrap();
        for n in 1..=500 {
            assert!(
                rel_dev(t1.value(n), f.lambda(n)) < 1e-9,
                "n={n}: {} vs {}",
                t1.value(n),
                f.lambda(n)
            );
        }
    }

    #[test]
    fn divisor_bound_holds() {
        let f = form(2000);
        let angles = satake_angles(&f, 2000).unwrap();
        let sieve = SpfSieve::new(2000);
        for j in [2u32, 3, 4] {
            let t = sympow_table(j, 2000, &angles).unwrap();
            let dk = divisor_count_table(j + 1, 2000, &sieve);
            for n in 1..=2000 {
                assert!(
                    t.value(n).abs() <= dk[n] + 1e-6,
                    "j={j} n={n}: {} vs {}",
                    t.value(n),
                    dk[n]
                );
            }
        }
        // j = 1 against d(n) as well
        let t1 = sympow_table(1, 2000, &angles).unwrap();
        let d = divisor_function(2000);
        for n in 1..=2000 {
            assert!(t1.value(n).abs() <= d[n] + 1e-6);
        }
    }

    #[test]
    fn square_identity_small() {
        let f = form(2000);
        let tol = Tolerances::default();
        for j in [1u32, 2, 3] {
            let report = verify_square_identity(&f, j, 100, &tol).unwrap();
            assert!(
                report.passed,
                "j={j}: lift dev {} square dev {}",
                report.max_dev_lift, report.max_dev_square
            );
        }
    }

    #[test]
    fn square_identity_value_at_two() {
        // lambda_f(2)^2 = 0.28125 = 1 + lambda_f(4)
        let f = form(10);
        let lhs = f.lambda(2) * f.lambda(2);
        assert!((lhs - 0.28125).abs() < 1e-15);
        assert!((1.0 + f.lambda(4) - 0.28125).abs() < 1e-15);
    }

    #[test]
    fn recurrence_matches_table_lambdas() {
        let f = form(2000);
        for p in [2usize, 3, 5, 7, 11] {
            let pows = lambda_prime_powers(f.lambda(p), 4);
            let mut pe = 1usize;
            for (m, lam) in pows.iter().enumerate() {
                if m > 0 {
                    pe *= p;
                }
                if pe <= 2000 {
                    assert!(
                        rel_dev(*lam, f.lambda(pe)) < 1e-12,
                        "p={p} m={m}: {} vs {}",
                        lam,
                        f.lambda(pe)
                    );
                }
            }
        }
    }

    #[test]
    fn table_requires_angle_coverage() {
        let f = form(100);
        let angles = satake_angles(&f, 50).unwrap();
        assert!(matches!(
            sympow_table(2, 100, &angles),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            sympow_table(0, 50, &angles),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn csv_header() {
        let f = form(10);
        let angles = satake_angles(&f, 10).unwrap();
        let t = sympow_table(2, 10, &angles).unwrap();
        let mut buf = Vec::new();
        write_sympow_csv(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# j=2 N=10\nn,lambda_symj\n1,"));
    }
}
