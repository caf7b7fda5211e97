//! Seeded, reproducible Hamiltonians and observables.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kronecker_product, ComplexMatrix, Operator, MAX_OPERATOR_DIM};
use crate::rng::SplitMix64;

pub const MAX_ISING_SITES: usize = 10;

/// Model description as read from JSON: `{"kind": "...", "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum ModelSpec {
    TwoLevel {
        gap: f64,
    },
    Oscillator {
        omega: f64,
        cutoff: usize,
    },
    Ising {
        n: usize,
        #[serde(alias = "J")]
        j: f64,
        #[serde(alias = "h_field")]
        h: f64,
    },
    RandomHermitian {
        dim: usize,
        seed: u64,
    },
}

impl ModelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::TwoLevel { .. } => "two_level",
            Self::Oscillator { .. } => "oscillator",
            Self::Ising { .. } => "ising",
            Self::RandomHermitian { .. } => "random_hermitian",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::TwoLevel { gap } => check_positive("gap", gap),
            Self::Oscillator { omega, cutoff } => {
                check_positive("omega", omega)?;
                check_dim("cutoff", cutoff)
            }
            Self::Ising { n, j, h } => {
                if !(1..=MAX_ISING_SITES).contains(&n) {
                    return Err(Error::InvalidParameter(format!(
                        "site count n = {n} outside [1, {MAX_ISING_SITES}]"
                    )));
                }
                check_finite("j", j)?;
                check_finite("h", h)
            }
            Self::RandomHermitian { dim, .. } => check_dim("dim", dim),
        }
    }

    pub fn build(&self) -> Result<Operator> {
        match *self {
            Self::TwoLevel { gap } => build_two_level(gap),
            Self::Oscillator { omega, cutoff } => build_oscillator(omega, cutoff),
            Self::Ising { n, j, h } => build_ising(n, j, h),
            Self::RandomHermitian { dim, seed } => build_random_hermitian(dim, seed),
        }
    }

    /// Replaces the seed of a `random_hermitian` spec; other kinds are unchanged.
    pub fn with_seed(self, new_seed: u64) -> Self {
        match self {
            Self::RandomHermitian { dim, .. } => Self::RandomHermitian {
                dim,
                seed: new_seed,
            },
            other => other,
        }
    }

    /// Number of spin-1/2 sites, when the model is a spin chain.
    pub fn site_count(&self) -> Option<usize> {
        match *self {
            Self::Ising { n, .. } => Some(n),
            _ => None,
        }
    }
}

fn check_finite(name: &str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "{name} = {value} is not finite"
        )));
    }
    Ok(())
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    check_finite(name, value)?;
    if value <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "{name} = {value} must be positive"
        )));
    }
    Ok(())
}

fn check_dim(name: &str, dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidParameter(format!(
            "{name} = {dim} must be at least 2"
        )));
    }
    if dim > MAX_OPERATOR_DIM {
        return Err(Error::Capacity {
            what: "operator dimension",
            requested: dim,
            limit: MAX_OPERATOR_DIM,
        });
    }
    Ok(())
}

/// `diag(0, gap)`.
pub fn build_two_level(gap: f64) -> Result<Operator> {
    check_positive("gap", gap)?;
    Ok(Operator::from_real_diagonal(&[0.0, gap]))
}

/// Harmonic oscillator truncated to its lowest `cutoff` levels, `E_n = omega (n + 1/2)`.
pub fn build_oscillator(omega: f64, cutoff: usize) -> Result<Operator> {
    check_positive("omega", omega)?;
    check_dim("cutoff", cutoff)?;
    let energies: Vec<f64> = (0..cutoff).map(|n| omega * (n as f64 + 0.5)).collect();
    Ok(Operator::from_real_diagonal(&energies))
}

pub fn pauli_x() -> Operator {
    Operator::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]).expect("2x2")
}

pub fn pauli_z() -> Operator {
    Operator::from_real_diagonal(&[1.0, -1.0])
}

/// `I ⊗ ... ⊗ op ⊗ ... ⊗ I` with `op` on `site`; site 0 is the most significant factor.
pub fn site_operator(n: usize, site: usize, op: &Operator) -> Result<Operator> {
    if site >= n {
        return Err(Error::InvalidParameter(format!(
            "site {site} out of range for a chain of {n} sites"
        )));
    }
    let id = Operator::identity(2);
    let mut out = if site == 0 { op.clone() } else { id.clone() };
    for k in 1..n {
        out = kronecker_product(&out, if k == site { op } else { &id })?;
    }
    Ok(out)
}

/// `sum_k Z_k`.
pub fn total_magnetization(n: usize) -> Result<Operator> {
    let mut total = Operator::zeros(1 << n);
    for k in 0..n {
        total = total.try_add(&site_operator(n, k, &pauli_z())?)?;
    }
    Ok(total)
}

/// Open transverse-field Ising chain `H = -J sum Z_k Z_{k+1} - h sum X_k`.
pub fn build_ising(n: usize, j: f64, h_field: f64) -> Result<Operator> {
    ModelSpec::Ising { n, j, h: h_field }.validate()?;
    let z = pauli_z();
    let x = pauli_x();
    let mut h = Operator::zeros(1 << n);
    for k in 0..n.saturating_sub(1) {
        let zz = site_operator(n, k, &z)?.try_mul(&site_operator(n, k + 1, &z)?)?;
        h = h.try_sub(&zz.scale(j))?;
    }
    for k in 0..n {
        h = h.try_sub(&site_operator(n, k, &x)?.scale(h_field))?;
    }
    Ok(h)
}

/// `(G + G^H) / 2` with `G` drawn row-major from [`SplitMix64`], real part then
/// imaginary part of each entry.
pub fn build_random_hermitian(dim: usize, seed: u64) -> Result<Operator> {
    check_dim("dim", dim)?;
    let mut rng = SplitMix64::new(seed);
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| rng.next_complex_normal());
    Operator::new((&g + &g.adjoint()).scale(Complex64::new(0.5, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eig, trace};
    use crate::thermal::{thermal_spectrum, Beta};

    fn spectrum(op: &Operator) -> Vec<f64> {
        hermitian_eig(op).unwrap().eigenvalues
    }

    #[test]
    fn two_level() {
        assert_eq!(
            build_two_level(1.0).unwrap(),
            Operator::from_real_diagonal(&[0.0, 1.0])
        );
        assert_eq!(
            build_two_level(2.5).unwrap(),
            Operator::from_real_diagonal(&[0.0, 2.5])
        );
        assert!(build_two_level(0.0).is_err());
        assert!(build_two_level(-1.0).is_err());

        let s = thermal_spectrum(
            &build_two_level(1.0).unwrap(),
            Beta::new(2f64.ln()).unwrap(),
        )
        .unwrap();
        assert!((s.probabilities[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.probabilities[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn oscillator() {
        assert_eq!(
            build_oscillator(1.0, 2).unwrap(),
            Operator::from_real_diagonal(&[0.5, 1.5])
        );
        assert_eq!(
            build_oscillator(2.0, 3).unwrap(),
            Operator::from_real_diagonal(&[1.0, 3.0, 5.0])
        );
        assert!(build_oscillator(1.0, 1).is_err());
        assert!(build_oscillator(0.0, 4).is_err());
        assert!(build_oscillator(1.0, 5000).is_err());
    }

    #[test]
    fn oscillator_log_partition_matches_geometric_series() {
        let (omega, beta, d) = (1.0, 1.0, 50usize);
        let s = thermal_spectrum(
            &build_oscillator(omega, d).unwrap(),
            Beta::new(beta).unwrap(),
        )
        .unwrap();
        let x = (-beta * omega).exp();
        let closed = -beta * omega / 2.0 + ((1.0 - x.powi(d as i32)) / (1.0 - x)).ln();
        assert!((s.log_partition - closed).abs() <= 1e-12);
    }

    #[test]
    fn ising_single_site() {
        for j in [0.0, 1.0, -3.0] {
            let h = build_ising(1, j, 1.0).unwrap();
            assert_eq!(h, pauli_x().scale(-1.0));
            let ev = spectrum(&h);
            assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn ising_classical_pair() {
        let h = build_ising(2, 1.0, 0.0).unwrap();
        assert_eq!(h, Operator::from_real_diagonal(&[-1.0, 1.0, 1.0, -1.0]));
        let ev = spectrum(&h);
        for (a, b) in ev.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    /// Entry-by-entry construction from bit arithmetic, site 0 = most significant bit.
    fn ising_by_bits(n: usize, j: f64, h: f64) -> Operator {
        let dim = 1usize << n;
        let spin = |state: usize, site: usize| -> f64 {
            if (state >> (n - 1 - site)) & 1 == 0 {
                1.0
            } else {
                -1.0
            }
        };
        let mut entries = vec![0.0; dim * dim];
        for s in 0..dim {
            let diag: f64 = (0..n - 1).map(|k| -j * spin(s, k) * spin(s, k + 1)).sum();
            entries[s * dim + s] = diag;
            for k in 0..n {
                let flipped = s ^ (1 << (n - 1 - k));
                entries[flipped * dim + s] -= h;
            }
        }
        Operator::from_real_rows(dim, &entries).unwrap()
    }

    #[test]
    fn ising_matches_bit_construction() {
        let built = build_ising(3, 1.0, 0.5).unwrap();
        let oracle = ising_by_bits(3, 1.0, 0.5);
        assert!(built.matrix().frobenius_distance(oracle.matrix()) <= 1e-15);
        for (a, b) in spectrum(&built).iter().zip(spectrum(&oracle)) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn ising_zero_couplings() {
        let h = build_ising(4, 0.0, 0.0).unwrap();
        assert_eq!(h, Operator::zeros(16));
        for beta in [0.0, 1.0, 50.0] {
            let s = thermal_spectrum(&h, Beta::new(beta).unwrap()).unwrap();
            assert!(s
                .probabilities
                .iter()
                .all(|p| (p - 1.0 / 16.0).abs() < 1e-15));
        }
    }

    #[test]
    fn ising_range() {
        assert!(build_ising(0, 1.0, 1.0).is_err());
        assert!(build_ising(11, 1.0, 1.0).is_err());
        assert!(build_ising(2, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn random_hermitian_properties() {
        let a = build_random_hermitian(4, 42).unwrap();
        let b = build_random_hermitian(4, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.hermiticity_residual() <= 1e-15);
        assert_ne!(a, build_random_hermitian(4, 43).unwrap());

        let h = build_random_hermitian(6, 31).unwrap();
        let sum: f64 = spectrum(&h).iter().sum();
        assert!((sum - trace(&h).re).abs() <= 1e-10);
        assert!(build_random_hermitian(1, 0).is_err());
    }

    #[test]
    fn random_hermitian_reference_entries() {
        // Pins the generator: G_00 = N(draws 1,2) + i N(draws 3,4), H_00 = Re G_00.
        let mut rng = SplitMix64::new(42);
        let g00 = rng.next_complex_normal();
        let h = build_random_hermitian(2, 42).unwrap();
        assert_eq!(h.matrix().get(0, 0), Complex64::new(g00.re, 0.0));
    }

    #[test]
    fn spec_json() {
        let spec =
            ModelSpec::from_json(r#"{"kind":"ising","params":{"n":3,"J":1.0,"h":0.5}}"#).unwrap();
        assert_eq!(
            spec,
            ModelSpec::Ising {
                n: 3,
                j: 1.0,
                h: 0.5
            }
        );
        assert_eq!(spec.kind(), "ising");
        assert_eq!(spec.site_count(), Some(3));

        let spec = ModelSpec::from_json(
            r#"{"kind":"random_hermitian","params":{"dim":4,"seed":18446744073709551615}}"#,
        )
        .unwrap();
        assert_eq!(
            spec,
            ModelSpec::RandomHermitian {
                dim: 4,
                seed: u64::MAX
            }
        );
        assert_eq!(
            spec.with_seed(3),
            ModelSpec::RandomHermitian { dim: 4, seed: 3 }
        );

        let text = serde_json::to_string(&ModelSpec::TwoLevel { gap: 1.0 }).unwrap();
        assert_eq!(text, r#"{"kind":"two_level","params":{"gap":1.0}}"#);

        assert!(ModelSpec::from_json(r#"{"kind":"two_level","params":{"gap":-1}}"#).is_err());
        assert!(ModelSpec::from_json(r#"{"kind":"ladder","params":{}}"#).is_err());
        assert!(ModelSpec::from_json(r#"{"kind":"oscillator","params":{"omega":1}}"#).is_err());
    }

    #[test]
    fn builders_pass_eig_preconditions() {
        let specs = [
            ModelSpec::TwoLevel { gap: 0.3 },
            ModelSpec::Oscillator {
                omega: 1.7,
                cutoff: 6,
            },
            ModelSpec::Ising {
                n: 4,
                j: 0.8,
                h: 1.1,
            },
            ModelSpec::RandomHermitian { dim: 7, seed: 5 },
        ];
        for spec in specs {
            let h = spec.build().unwrap();
            assert!(hermitian_eig(&h).is_ok(), "{spec:?}");
        }
    }

    #[test]
    fn magnetization_operator() {
        let m = total_magnetization(2).unwrap();
        assert_eq!(m, Operator::from_real_diagonal(&[2.0, 0.0, 0.0, -2.0]));
        assert_eq!(
            site_operator(2, 0, &pauli_z()).unwrap(),
            Operator::from_real_diagonal(&[1.0, 1.0, -1.0, -1.0])
        );
        assert!(site_operator(2, 2, &pauli_z()).is_err());
    }
}
