use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound (1+γ)ⁿ[n ln n + n ln ln n + 2 ln k + 2n(1 + ln 2γ)] on the
/// chromatic number, evaluated in the log domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChromaticBound {
    pub n: u64,
    pub k: u64,
    pub gamma: f64,
    /// n ln n + n ln ln n + 2 ln k + 2n(1 + ln 2γ).
    pub bracket: f64,
    /// ln of the bound.
    pub ln_value: f64,
    /// The bound itself when it fits in an f64.
    pub value: Option<f64>,
    /// bound^{1/n}.
    pub per_dimension: f64,
    pub warning: Option<String>,
}

pub fn chromatic_bound(n: u64, k: u64, gamma: f64) -> Result<ChromaticBound> {
    if n < 2 {
        return Err(Error::invalid(format!(
            "the bound needs n ≥ 2 (ln ln n), got n = {n}"
        )));
    }
    if k < 1 {
        return Err(Error::invalid("the bound needs k ≥ 1"));
    }
    if !(gamma >= 1.0 && gamma.is_finite()) {
        return Err(Error::invalid(format!(
            "the bound needs a finite γ ≥ 1, got {gamma}"
        )));
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let bracket =
        nf * ln_n + nf * ln_n.ln() + 2.0 * (k as f64).ln() + 2.0 * nf * (1.0 + (2.0 * gamma).ln());
    if !(bracket > 0.0) {
        return Err(Error::invalid(format!("bracket {bracket} is not positive")));
    }
    let ln_value = nf * gamma.ln_1p() + bracket.ln();
    let warning =
        (n == 2).then(|| "n = 2: ln ln n is negative; the bound is stated for large n".to_string());
    Ok(ChromaticBound {
        n,
        k,
        gamma,
        bracket,
        ln_value,
        value: (ln_value < 700.0).then(|| ln_value.exp()),
        per_dimension: (ln_value / nf).exp(),
        warning,
    })
}

/// [vol(DK)/vol(K) · n^{log₂(ln n) + c}]^{1/n}, from the log of the volume ratio.
pub fn butler_bound_ln_ratio(n: u64, ln_vol_ratio: f64, c: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::invalid(format!("the formula needs n ≥ 3, got {n}")));
    }
    if !(ln_vol_ratio >= 0.0 && ln_vol_ratio.is_finite()) {
        return Err(Error::invalid(
            "the volume ratio must be finite and at least 1",
        ));
    }
    if !c.is_finite() {
        return Err(Error::invalid("the constant c must be finite"));
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    Ok(((ln_vol_ratio + (ln_n.log2() + c) * ln_n) / nf).exp())
}

/// [vol(DK)/vol(K) · n^{log₂(ln n) + c}]^{1/n}. For centrally symmetric K,
/// DK = 2K and the ratio is 2ⁿ.
pub fn butler_bound(n: u64, vol_ratio: f64, c: f64) -> Result<f64> {
    if !(vol_ratio >= 1.0) {
        return Err(Error::invalid(format!(
            "the volume ratio must be at least 1, got {vol_ratio}"
        )));
    }
    butler_bound_ln_ratio(n, vol_ratio.ln(), c)
}

/// (1 + ln max_set_size)·τ*: what the greedy cover size is guaranteed not to exceed.
pub fn finite_run_bound(max_set_size: usize, tau_star: f64) -> Result<f64> {
    if max_set_size == 0 {
        return Err(Error::invalid("max set size must be positive"));
    }
    if !(tau_star >= 0.0 && tau_star.is_finite()) {
        return Err(Error::invalid(format!(
            "τ* must be finite and nonnegative, got {tau_star}"
        )));
    }
    Ok((1.0 + (max_set_size as f64).ln()) * tau_star)
}

/// k(2γ/δ)ⁿ: bound on how many ground points one candidate set can hold.
pub fn incidence_bound(k: usize, gamma: f64, delta: f64, n: usize) -> f64 {
    k as f64 * (2.0 * gamma / delta).powi(n as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values were evaluated with 200-bit arithmetic.

    #[test]
    fn chromatic_bound_reference_values() {
        let b = chromatic_bound(100, 1, 2.0).unwrap();
        assert!((b.bracket - 1090.49385340).abs() < 1e-6);
        assert!((b.ln_value - 116.855614815943).abs() < 1e-9);
        assert!(b.warning.is_none());
        let expected = [
            (1_000, 3.02869268),
            (10_000, 3.00360083),
            (100_000, 3.00043332),
        ];
        let mut prev = f64::INFINITY;
        for (n, r) in expected {
            let b = chromatic_bound(n, 1, 2.0).unwrap();
            assert!(
                (b.per_dimension - r).abs() < 1e-7,
                "n = {n}: {}",
                b.per_dimension
            );
            assert!(b.per_dimension < prev && b.per_dimension > 3.0);
            prev = b.per_dimension;
        }
        assert!(chromatic_bound(10_000, 1, 2.0).unwrap().per_dimension <= 3.01);
    }

    #[test]
    fn chromatic_bound_k_term_and_domain() {
        let one = chromatic_bound(50, 1, 1.5).unwrap();
        let n = 50f64;
        let direct = n * n.ln() + n * n.ln().ln() + 2.0 * n * (1.0 + 3f64.ln());
        assert_eq!(one.bracket, direct);
        let four = chromatic_bound(50, 4, 1.5).unwrap();
        assert!((four.bracket - one.bracket - 2.0 * 4f64.ln()).abs() < 1e-12);
        assert!(chromatic_bound(2, 1, 1.0).unwrap().warning.is_some());
        assert!(chromatic_bound(1, 1, 2.0).is_err());
        assert!(chromatic_bound(10, 0, 2.0).is_err());
        assert!(chromatic_bound(10, 1, 0.5).is_err());
        assert!(chromatic_bound(100, 1, 2.0).unwrap().value.is_some());
        assert!(chromatic_bound(100_000, 1, 2.0).unwrap().value.is_none());
    }

    #[test]
    fn butler_reference_values() {
        let v = butler_bound(1000, 2f64.powi(1000), 0.0).unwrap();
        assert!((v - 2.03889399409502).abs() < 1e-9);
        let v = butler_bound(1000, 1.0, 0.0).unwrap();
        assert!((v - 1.01944699704751).abs() < 1e-9);
        // Symmetric closed form 2·n^{(log₂ ln n + c)/n}.
        let n = 37u64;
        let nf = n as f64;
        let closed = 2.0 * nf.powf((nf.ln().log2() + 1.5) / nf);
        assert!((butler_bound(n, 2f64.powi(37), 1.5).unwrap() - closed).abs() < 1e-12);
        let mut prev = 0.0;
        for c in [0.0, 1.0, 3.0, 10.0] {
            let v = butler_bound(500, 2f64.powi(500), c).unwrap();
            assert!(v > prev);
            prev = v;
        }
        assert!(butler_bound(2, 4.0, 0.0).is_err());
        assert!(butler_bound(10, 0.5, 0.0).is_err());
    }

    #[test]
    fn finite_run_and_incidence() {
        assert!((finite_run_bound(3, 2.0).unwrap() - 4.19722457733622).abs() < 1e-12);
        assert_eq!(finite_run_bound(1, 2.5).unwrap(), 2.5);
        assert!(finite_run_bound(0, 1.0).is_err());
        let delta = 1.0 / (4.0 * 2f64.ln());
        let b = incidence_bound(1, 2.0 / 3f64.sqrt(), delta, 2);
        assert!((b - 40.9986571876865).abs() < 1e-9);
    }
}
