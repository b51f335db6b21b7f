//! Caps and the tolerance ladder, centralized so every verification sweep and
//! CLI run draws from one record.

use serde::{Deserialize, Serialize};

/// Hard size caps. Each cap documents where an algorithm's stated guarantees
/// (64-bit safety, oracle runtime) stop, not where the math stops.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Limits {
    /// Largest N accepted by the q-expansion. The 192-bit pass accumulator
    /// keeps > 60 bits of headroom over |tau(n)| <= d(n) n^{11/2} up to here.
    pub qexpansion_max: u64,
    /// Largest n accepted by the lattice-point counting oracle
    /// (O(n^{3/2}) enumeration).
    pub r6_oracle_max: u64,
    /// Largest N for the l/v/r6 divisor-sweep sieve. 16*l(n) < 16*zeta(2)*n^2
    /// stays well inside i64 up to this bound.
    pub weight_sieve_max: u64,
    /// Largest n accepted by the O(n^2) tau recurrence oracle (i128-checked).
    pub niebur_oracle_max: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            qexpansion_max: 2_000_000,
            r6_oracle_max: 100_000,
            weight_sieve_max: 2_000_000,
            niebur_oracle_max: 20_000,
        }
    }
}

/// Tolerance ladder used by the verification operations. Exact integer
/// identities never consult this; everything floating does.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerances {
    /// Slack on |lambda_f(n)| <= d(n).
    pub deligne_slack: f64,
    /// Slack on |lambda_{sym^j f}(n)| <= d_{j+1}(n).
    pub sympow_deligne_slack: f64,
    /// Relative tolerance for lambda multiplicativity and table-level identities.
    pub lambda_rel: f64,
    /// Relative tolerance for the Hecke identities at primes (Eqs. at p^j).
    pub square_identity_rel: f64,
    /// Relative tolerance for degree-stacked convolution identities.
    pub factorization_rel: f64,
    /// Relative tolerance for primitive series ops (convolve/divide round trips).
    pub series_rel: f64,
    /// Allowed imaginary residue when realifying local-factor coefficients.
    pub imag_residue: f64,
    /// Relative tolerance on the compensated decomposition identity S = S_l - S_v.
    pub decomposition_rel: f64,
    /// Relative agreement required between serial and block-parallel accumulation.
    pub accumulation_rel: f64,
    /// Satake precondition slack on |lambda_f(p)| <= 2.
    pub satake_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            deligne_slack: 1e-9,
            sympow_deligne_slack: 1e-6,
            lambda_rel: 1e-9,
            square_identity_rel: 1e-8,
            factorization_rel: 1e-8,
            series_rel: 1e-10,
            imag_residue: 1e-12,
            decomposition_rel: 1e-12,
            accumulation_rel: 1e-10,
            satake_slack: 1e-9,
        }
    }
}

impl Tolerances {
    /// Apply a named override, as supplied by `tolerance.<name>` config keys.
    pub fn set_by_name(&mut self, name: &str, value: f64) -> bool {
        match name {
            "deligne_slack" => self.deligne_slack = value,
            "sympow_deligne_slack" => self.sympow_deligne_slack = value,
            "lambda_rel" => self.lambda_rel = value,
            "square_identity_rel" => self.square_identity_rel = value,
            "factorization_rel" => self.factorization_rel = value,
            "series_rel" => self.series_rel = value,
            "imag_residue" => self.imag_residue = value,
            "decomposition_rel" => self.decomposition_rel = value,
            "accumulation_rel" => self.accumulation_rel = value,
            "satake_slack" => self.satake_slack = value,
            _ => return false,
        }
        true
    }
}

/// Relative closeness against an explicit scale floor of 1.
pub fn rel_dev(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}
