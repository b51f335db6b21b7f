//! Finite Dirichlet-series coefficient algebra: convolution, division and
//! weight shift, plus construction of the G-series whose coefficients b(n),
//! h(n) match the weighted squares at primes, and the coefficientwise
//! verification of the F = G.H factorizations.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::RepWeights;
use crate::sieve::SpfSieve;
use crate::sympow::{chi4, SymPowTable};

/// Coefficients a(n) of a finite Dirichlet series sum a(n) n^{-s}, n <= N.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSeries {
    a: Vec<f64>, // a[0] unused
}

impl CoeffSeries {
    pub fn from_fn(bound: usize, mut f: impl FnMut(usize) -> f64) -> Self {
        assert!(bound >= 1);
        let mut a = vec![0.0f64; bound + 1];
        for (n, slot) in a.iter_mut().enumerate().skip(1) {
            *slot = f(n);
        }
        CoeffSeries { a }
    }

    /// The convolution identity (1, 0, 0, ...).
    pub fn identity(bound: usize) -> Self {
        Self::from_fn(bound, |n| if n == 1 { 1.0 } else { 0.0 })
    }

    /// All-ones coefficients, i.e. zeta(s) truncated.
    pub fn ones(bound: usize) -> Self {
        Self::from_fn(bound, |_| 1.0)
    }

    pub fn bound(&self) -> usize {
        self.a.len() - 1
    }

    #[inline]
    pub fn coeff(&self, n: usize) -> f64 {
        self.a[n]
    }
}

/// Dirichlet product: out(n) = sum_{d|n} x(d) y(n/d), accumulated in
/// increasing d for a fixed summation order.
pub fn convolve(x: &CoeffSeries, y: &CoeffSeries) -> Result<CoeffSeries> {
    let n = x.bound();
    if n != y.bound() {
        return Err(Error::InvalidArgument(format!(
            "convolution bounds differ: {n} vs {}",
            y.bound()
        )));
    }
    let mut out = vec![0.0f64; n + 1];
    for d in 1..=n {
        let xd = x.a[d];
        if xd == 0.0 {
            continue;
        }
        for m in 1..=(n / d) {
            out[d * m] += xd * y.a[m];
        }
    }
    Ok(CoeffSeries { a: out })
}

/// The unique q with convolve(den, q) = num, by forward substitution
/// q(n) = (num(n) - sum_{d|n, d>1} den(d) q(n/d)) / den(1), divisors taken
/// in increasing order.
pub fn divide(num: &CoeffSeries, den: &CoeffSeries) -> Result<CoeffSeries> {
    let n = num.bound();
    if n != den.bound() {
        return Err(Error::InvalidArgument(format!(
            "division bounds differ: {n} vs {}",
            den.bound()
        )));
    }
    if den.a[1] == 0.0 {
        return Err(Error::NonInvertible(
            "denominator has vanishing leading coefficient".into(),
        ));
    }
    let lead = den.a[1];
    let sieve = SpfSieve::new(n);
    let mut q = vec![0.0f64; n + 1];
    q[1] = num.a[1] / lead;
    for m in 2..=n {
        let mut acc = num.a[m];
        for d in sieve.divisors(m) {
            let d = d as usize;
            if d > 1 {
                acc -= den.a[d] * q[m / d];
            }
        }
        q[m] = acc / lead;
    }
    Ok(CoeffSeries { a: q })
}

/// Coefficient-level s -> s - w: out(n) = x(n) n^w.
pub fn shift_weight(x: &CoeffSeries, w: i32) -> Result<CoeffSeries> {
    let mut out = vec![0.0f64; x.bound() + 1];
    for n in 1..=x.bound() {
        let v = x.a[n] * (n as f64).powi(w);
        if !v.is_finite() {
            return Err(Error::NumericIntegrity(format!(
                "weight shift by {w} overflows at n = {n}"
            )));
        }
        out[n] = v;
    }
    Ok(CoeffSeries { a: out })
}

/// Pointwise twist by the mod-4 character.
fn twist_chi(x: &CoeffSeries) -> CoeffSeries {
    CoeffSeries::from_fn(x.bound(), |n| x.a[n] * chi4(n as u64) as f64)
}

fn validate_tables(j: u32, bound: usize, tables: &[&SymPowTable]) -> Result<()> {
    if j == 0 {
        return Err(Error::InvalidArgument("degree must be >= 1".into()));
    }
    if tables.len() != j as usize {
        return Err(Error::InvalidArgument(format!(
            "need {j} even-power tables (sym^2 .. sym^{}), got {}",
            2 * j,
            tables.len()
        )));
    }
    for (idx, t) in tables.iter().enumerate() {
        let want = 2 * (idx as u32 + 1);
        if t.degree() != want {
            return Err(Error::InvalidArgument(format!(
                "table {idx} has degree {}, expected sym^{want}",
                t.degree()
            )));
        }
        if t.bound() < bound {
            return Err(Error::InvalidArgument(format!(
                "table for sym^{want} covers {}, need {bound}",
                t.bound()
            )));
        }
    }
    Ok(())
}

/// Coefficients of G_j(s) = zeta(s-2) L(s,chi)
/// prod_{l=1..j} L(s-2, sym^{2l} f) L(s, sym^{2l} f x chi),
/// as the convolution of the 2j+2 component arrays in that fixed order.
pub fn build_g(j: u32, bound: usize, tables: &[&SymPowTable]) -> Result<CoeffSeries> {
    Ok(build_g_pair(j, bound, tables, false)?.0)
}

/// Twisted analogue: zeta(s) L(s-2,chi)
/// prod_{l=1..j} L(s, sym^{2l} f) L(s-2, sym^{2l} f x chi).
pub fn build_g_twisted(j: u32, bound: usize, tables: &[&SymPowTable]) -> Result<CoeffSeries> {
    Ok(build_g_pair(j, bound, tables, true)?.0)
}

/// Builds G (or G-twisted) together with the same convolution over the
/// componentwise absolute values. The absolute series is the computation's
/// magnitude scale: the verification normalizes against it, since the signed
/// coefficients cancel structurally at primes.
fn build_g_pair(
    j: u32,
    bound: usize,
    tables: &[&SymPowTable],
    twisted: bool,
) -> Result<(CoeffSeries, CoeffSeries)> {
    validate_tables(j, bound, tables)?;
    let mut components: Vec<CoeffSeries> = Vec::with_capacity(2 * j as usize + 2);
    if twisted {
        components.push(CoeffSeries::ones(bound));
        components.push(shift_weight(&twist_chi(&CoeffSeries::ones(bound)), 2)?);
    } else {
        components.push(shift_weight(&CoeffSeries::ones(bound), 2)?);
        components.push(twist_chi(&CoeffSeries::ones(bound)));
    }
    for t in tables {
        let sym = CoeffSeries::from_fn(bound, |n| t.value(n));
        if twisted {
            components.push(sym.clone());
            components.push(shift_weight(&twist_chi(&sym), 2)?);
        } else {
            components.push(shift_weight(&sym, 2)?);
            components.push(twist_chi(&sym));
        }
    }
    let mut g = CoeffSeries::identity(bound);
    let mut g_abs = CoeffSeries::identity(bound);
    for c in &components {
        g = convolve(&g, c)?;
        let c_abs = CoeffSeries::from_fn(bound, |n| c.a[n].abs());
        g_abs = convolve(&g_abs, &c_abs)?;
    }
    Ok((g, g_abs))
}

/// Which factorization to verify.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    /// F_j(s) = sum lambda^2_{sym^j}(n) l(n) n^{-s} against G_j.
    Plain,
    /// The v(n)-weighted sum against the twisted G.
    Twisted,
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorizationReport {
    pub j: u32,
    pub bound: usize,
    pub side: Side,
    /// max_n |(G * H)(n) - F(n)| / max(1, |F(n)|, (|G| * |H|)(n))
    pub max_roundtrip_dev: f64,
    /// H(1), expected 1.
    pub h_at_one: f64,
    /// max_p |H(p)| / max(1, G_abs(p)) over primes p <= bound.
    pub max_prime_dev: f64,
    /// max_n |H(n)| / n^2 — the empirical growth of the quotient
    /// coefficients, expected O(n^eps).
    pub h_growth: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn f_series(bound: usize, side: Side, sym_j: &SymPowTable, weights: &RepWeights) -> CoeffSeries {
    CoeffSeries::from_fn(bound, |n| {
        let lam = sym_j.value(n);
        let w = match side {
            Side::Plain => weights.l(n),
            Side::Twisted => weights.v(n),
        };
        lam * lam * w as f64
    })
}

/// H = F / G as a coefficient series: the local-quotient coefficients,
/// supported on squarefull n up to rounding.
pub fn quotient_series(
    j: u32,
    bound: usize,
    side: Side,
    sym_j: &SymPowTable,
    even_tables: &[&SymPowTable],
    weights: &RepWeights,
) -> Result<CoeffSeries> {
    if sym_j.bound() < bound || weights.bound() < bound {
        return Err(Error::InvalidArgument(format!(
            "tables cover {} / {}, need {bound}",
            sym_j.bound(),
            weights.bound()
        )));
    }
    let f = f_series(bound, side, sym_j, weights);
    let g = match side {
        Side::Plain => build_g(j, bound, even_tables)?,
        Side::Twisted => build_g_twisted(j, bound, even_tables)?,
    };
    divide(&f, &g)
}

/// Builds F from the tables, divides by G, re-convolves, and checks that the
/// factorization holds coefficientwise: the identity F = G.H with H(1) = 1
/// and no p^{-s} term in H.
pub fn verify_factorization(
    j: u32,
    bound: usize,
    side: Side,
    sym_j: &SymPowTable,
    even_tables: &[&SymPowTable],
    weights: &RepWeights,
    tolerance: f64,
) -> Result<FactorizationReport> {
    if sym_j.degree() != j {
        return Err(Error::InvalidArgument(format!(
            "sym table has degree {}, expected {j}",
            sym_j.degree()
        )));
    }
    if sym_j.bound() < bound || weights.bound() < bound {
        return Err(Error::InvalidArgument(format!(
            "tables cover {} / {}, need {bound}",
            sym_j.bound(),
            weights.bound()
        )));
    }
    let f = f_series(bound, side, sym_j, weights);
    let (g, g_abs) = build_g_pair(j, bound, even_tables, side == Side::Twisted)?;
    let h = divide(&f, &g)?;
    let back = convolve(&g, &h)?;
    let h_abs = CoeffSeries::from_fn(bound, |n| h.coeff(n).abs());
    let scale = convolve(&g_abs, &h_abs)?;

    let mut max_roundtrip_dev = 0.0f64;
    for n in 1..=bound {
        let denom = f.coeff(n).abs().max(scale.coeff(n)).max(1.0);
        let dev = (back.coeff(n) - f.coeff(n)).abs() / denom;
        max_roundtrip_dev = max_roundtrip_dev.max(dev);
    }

    let sieve = SpfSieve::new(bound);
    let mut max_prime_dev = 0.0f64;
    for p in 2..=bound {
        if sieve.is_prime(p) {
            let dev = h.coeff(p).abs() / g_abs.coeff(p).max(1.0);
            max_prime_dev = max_prime_dev.max(dev);
        }
    }

    let h_at_one = h.coeff(1);
    let mut h_growth = 0.0f64;
    for n in 1..=bound {
        h_growth = h_growth.max(h.coeff(n).abs() / ((n as f64) * (n as f64)));
    }

    let passed = max_roundtrip_dev <= tolerance
        && (h_at_one - 1.0).abs() <= tolerance
        && max_prime_dev <= tolerance;
    Ok(FactorizationReport {
        j,
        bound,
        side,
        max_roundtrip_dev,
        h_at_one,
        max_prime_dev,
        h_growth,
        tolerance,
        passed,
    })
}

/// CSV rows `n,coeff` at 17 significant digits.
pub fn write_series_csv<W: Write>(series: &CoeffSeries, mut w: W) -> std::io::Result<()> {
    writeln!(w, "n,coeff")?;
    for n in 1..=series.bound() {
        writeln!(w, "{},{:.16e}", n, series.coeff(n))?;
    }
    Ok(())
}
