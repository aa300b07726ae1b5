//! Generalized Laguerre polynomials and the log-space normalization
//! constants of the transverse mode profiles.

use statrs::function::gamma::ln_gamma;

/// Generalized Laguerre polynomial `L_n^alpha(x)` by the three-term
/// recurrence, stable for the moderate `n` used in mode profiles.
pub fn laguerre(n: u32, alpha: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut l_prev = 1.0;
    let mut l = 1.0 + alpha - x;
    for k in 1..n {
        let kf = f64::from(k);
        let l_next = ((2.0 * kf + 1.0 + alpha - x) * l - (kf + alpha) * l_prev) / (kf + 1.0);
        l_prev = l;
        l = l_next;
    }
    l
}

/// `ln[ 2 n! / (pi (n + |ell|)!) ] / 2`, the logarithm of the mode
/// normalization constant `C_{n ell}`.
///
/// Computed through `ln Gamma` so winding numbers up to ~1e5 stay finite
/// where naive factorials overflow.
pub fn ln_norm_constant(n: u32, ell: i64) -> f64 {
    let nf = f64::from(n);
    let m = ell.unsigned_abs() as f64;
    0.5 * ((2.0 / std::f64::consts::PI).ln() + ln_gamma(nf + 1.0) - ln_gamma(nf + m + 1.0))
}

/// The normalization constant itself; use [`ln_norm_constant`] for huge |ell|.
pub fn norm_constant(n: u32, ell: i64) -> f64 {
    ln_norm_constant(n, ell).exp()
}
