//! Canonical ensembles and thermofield-double states.
//!
//! Units have `k_B = 1`; everything takes the inverse temperature directly.
//! Boltzmann weights are always formed relative to the largest exponent, so
//! the partition function itself is only ever exposed as `ln Z`.

use serde::Serialize;

use crate::bipartite::{
    expectation, real_part_checked, reduced_density, schmidt_decompose, BipartitePureState,
    DensityMatrix,
};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, EigResult, Operator, MAX_JOINT_AMPLITUDES};

/// Validated inverse temperature.
///
/// Negative values describe population-inverted ensembles and must be
/// requested explicitly with [`Beta::allow_negative`].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Beta(f64);

impl Beta {
    pub const ZERO: Beta = Beta(0.0);

    pub fn new(beta: f64) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::InvalidBeta(beta, "must be finite"));
        }
        if beta < 0.0 {
            return Err(Error::InvalidBeta(
                beta,
                "negative values need explicit opt-in",
            ));
        }
        Ok(Self(beta))
    }

    pub fn allow_negative(beta: f64) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::InvalidBeta(beta, "must be finite"));
        }
        Ok(Self(beta))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Beta {
    type Error = Error;

    fn try_from(beta: f64) -> Result<Self> {
        Self::new(beta)
    }
}

/// Energies, Boltzmann probabilities and `ln Z` at one inverse temperature.
///
/// Probabilities are per eigenstate, so a `g`-fold degenerate level shows up
/// as `g` equal entries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThermalSpectrum {
    pub beta: f64,
    /// Ascending.
    pub energies: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub log_partition: f64,
}

impl ThermalSpectrum {
    /// Builds the ensemble from energies already sorted ascending.
    pub fn from_energies(energies: Vec<f64>, beta: Beta) -> Self {
        let b = beta.value();
        let exponents: Vec<f64> = energies.iter().map(|&e| -b * e).collect();
        let shift = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = exponents.iter().map(|&x| (x - shift).exp()).collect();
        let total: f64 = weights.iter().sum();
        Self {
            beta: b,
            probabilities: weights.iter().map(|w| w / total).collect(),
            log_partition: total.ln() + shift,
            energies,
        }
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// `sum_n p_n E_n`.
    pub fn mean_energy(&self) -> f64 {
        self.energies
            .iter()
            .zip(&self.probabilities)
            .map(|(e, p)| e * p)
            .sum()
    }

    /// Gibbs (= Shannon) entropy of the probabilities, in nats.
    pub fn entropy(&self) -> f64 {
        crate::bipartite::shannon_entropy(&self.probabilities)
    }
}

/// Both sides of the thermal-average / doubled-space identity for one `beta`.
///
/// Serialized keys keep this declaration order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThermalReport {
    pub beta: f64,
    pub observable_name: String,
    /// `Tr(rho F)` from the energy-eigenbasis sum.
    pub trace_average: f64,
    /// `<O(beta)| F ⊗ I |O(beta)>` from the amplitude double sum.
    pub doubled_expectation: f64,
    pub residual: f64,
    pub entropy: f64,
    pub schmidt_coefficients: Vec<f64>,
}

fn canonical(h: &Operator, beta: Beta) -> Result<(EigResult, ThermalSpectrum)> {
    let eig = hermitian_eig(h)?;
    let spectrum = ThermalSpectrum::from_energies(eig.eigenvalues.clone(), beta);
    Ok((eig, spectrum))
}

fn check_observable(h: &Operator, f: &Operator) -> Result<()> {
    if f.dim() != h.dim() {
        return Err(Error::DimensionMismatch(format!(
            "observable has dimension {}, Hamiltonian has {}",
            f.dim(),
            h.dim()
        )));
    }
    f.ensure_hermitian()
}

pub fn thermal_spectrum(h: &Operator, beta: Beta) -> Result<ThermalSpectrum> {
    Ok(canonical(h, beta)?.1)
}

/// `e^{-beta H} / Z` assembled as `sum_n p_n |n><n|`.
pub fn gibbs_density(h: &Operator, beta: Beta) -> Result<DensityMatrix> {
    let (eig, spectrum) = canonical(h, beta)?;
    DensityMatrix::new(Operator::new(eig.recompose_with(&spectrum.probabilities))?)
}

/// `Tr(rho F) = sum_n p_n <n|F|n>`.
pub fn thermal_average(h: &Operator, beta: Beta, f: &Operator) -> Result<f64> {
    check_observable(h, f)?;
    let (eig, spectrum) = canonical(h, beta)?;
    eigenbasis_average(&eig, &spectrum, f)
}

fn eigenbasis_average(eig: &EigResult, spectrum: &ThermalSpectrum, f: &Operator) -> Result<f64> {
    let mut acc = num_complex::Complex64::new(0.0, 0.0);
    for (n, &p) in spectrum.probabilities.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let v = eig.eigenvector(n);
        acc += f.sandwich(&v, &v) * p;
    }
    real_part_checked(acc)
}

fn check_doubled_capacity(d: usize) -> Result<()> {
    let amplitudes = d.saturating_mul(d);
    if amplitudes > MAX_JOINT_AMPLITUDES {
        return Err(Error::Capacity {
            what: "joint amplitude count",
            requested: amplitudes,
            limit: MAX_JOINT_AMPLITUDES,
        });
    }
    Ok(())
}

fn tfd_from(eig: &EigResult, spectrum: &ThermalSpectrum) -> Result<BipartitePureState> {
    let d = spectrum.dim();
    check_doubled_capacity(d)?;
    // sum_n sqrt(p_n) |n> ⊗ e_n: column n of the amplitude matrix is sqrt(p_n) |n>.
    let roots: Vec<f64> = spectrum.probabilities.iter().map(|p| p.sqrt()).collect();
    let a = ComplexMatrix::from_fn(d, d, |i, n| eig.eigenvectors.get(i, n) * roots[n]);
    BipartitePureState::new(a)
}

/// The thermal vacuum `sum_n sqrt(p_n) |n, n~>` on the doubled space.
///
/// The tilde partner of the `n`-th eigenvector (ascending energy) is the `n`-th
/// coordinate vector of factor B.
pub fn thermofield_double(h: &Operator, beta: Beta) -> Result<BipartitePureState> {
    check_doubled_capacity(h.dim())?;
    let (eig, spectrum) = canonical(h, beta)?;
    tfd_from(&eig, &spectrum)
}

/// Computes `Tr(rho F)` and `<O(beta)| F ⊗ I |O(beta)>` along separate paths.
pub fn verify_equivalence(
    h: &Operator,
    beta: Beta,
    f: &Operator,
    observable_name: &str,
) -> Result<ThermalReport> {
    check_observable(h, f)?;
    check_doubled_capacity(h.dim())?;
    let (eig, spectrum) = canonical(h, beta)?;
    let trace_average = eigenbasis_average(&eig, &spectrum, f)?;
    let tfd = tfd_from(&eig, &spectrum)?;
    let doubled_expectation = expectation(&tfd, f)?;
    let schmidt = schmidt_decompose(&tfd)?;
    Ok(ThermalReport {
        beta: beta.value(),
        observable_name: observable_name.to_string(),
        trace_average,
        doubled_expectation,
        residual: (trace_average - doubled_expectation).abs(),
        entropy: schmidt.entropy(),
        schmidt_coefficients: schmidt.coefficients,
    })
}

/// Traces the tilde factor out of the thermal vacuum.
pub fn decohere_tfd(h: &Operator, beta: Beta) -> Result<DensityMatrix> {
    reduced_density(&thermofield_double(h, beta)?)
}

/// Grand-canonical state `e^{-beta (H - mu N)} / Xi`.
pub fn gibbs_grand(h: &Operator, n_op: &Operator, beta: Beta, mu: f64) -> Result<DensityMatrix> {
    if !mu.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "chemical potential {mu} is not finite"
        )));
    }
    if h.dim() != n_op.dim() {
        return Err(Error::DimensionMismatch(format!(
            "number operator has dimension {}, Hamiltonian has {}",
            n_op.dim(),
            h.dim()
        )));
    }
    h.ensure_hermitian()?;
    n_op.ensure_hermitian()?;
    gibbs_density(&h.try_sub(&n_op.scale(mu))?, beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipartite::entanglement_entropy;
    use crate::linalg::trace;
    use crate::rng::SplitMix64;
    use num_complex::Complex64;
    use std::f64::consts::LN_2;

    fn beta(x: f64) -> Beta {
        Beta::new(x).unwrap()
    }

    fn random_hermitian(n: usize, seed: u64) -> Operator {
        let mut rng = SplitMix64::new(seed);
        let g = ComplexMatrix::from_fn(n, n, |_, _| rng.next_complex_normal());
        Operator::new((&g + &g.adjoint()).scale(Complex64::new(0.5, 0.0))).unwrap()
    }

    fn two_level() -> Operator {
        Operator::from_real_diagonal(&[0.0, 1.0])
    }

    #[test]
    fn beta_validation() {
        assert!(Beta::new(-1.0).is_err());
        assert!(Beta::new(f64::NAN).is_err());
        assert!(Beta::new(f64::INFINITY).is_err());
        assert!(Beta::allow_negative(-1.0).is_ok());
        assert!(Beta::allow_negative(f64::NAN).is_err());
    }

    #[test]
    fn zero_hamiltonian_is_uniform() {
        for b in [0.0, 1.0, 100.0] {
            let s = thermal_spectrum(&Operator::zeros(3), beta(b)).unwrap();
            for p in &s.probabilities {
                assert!((p - 1.0 / 3.0).abs() < 1e-15);
            }
            assert!((s.log_partition - 3f64.ln()).abs() < 1e-15);
        }
    }

    #[test]
    fn two_level_spectra() {
        let s = thermal_spectrum(&two_level(), Beta::ZERO).unwrap();
        assert_eq!(s.probabilities, vec![0.5, 0.5]);
        assert!((s.log_partition - LN_2).abs() < 1e-15);

        let s = thermal_spectrum(&two_level(), beta(LN_2)).unwrap();
        assert!((s.probabilities[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.probabilities[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!((s.log_partition - 1.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn negative_beta_inverts_populations() {
        let s = thermal_spectrum(&two_level(), Beta::allow_negative(-LN_2).unwrap()).unwrap();
        assert!((s.probabilities[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((s.probabilities[1] - 2.0 / 3.0).abs() < 1e-15);
        // ln Z = ln(1 + 2) at E = (0, 1), beta = -ln 2.
        assert!((s.log_partition - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn boltzmann_ratios_and_normalization() {
        let h = random_hermitian(6, 77);
        let s = thermal_spectrum(&h, beta(0.7)).unwrap();
        assert!((s.probabilities.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        for m in 0..6 {
            for n in 0..6 {
                let lhs = s.probabilities[m].ln() - s.probabilities[n].ln()
                    + 0.7 * (s.energies[m] - s.energies[n]);
                assert!(lhs.abs() <= 1e-9);
            }
        }
        // ln Z against the unshifted sum, which is representable here.
        let z: f64 = s.energies.iter().map(|e| (-0.7 * e).exp()).sum();
        assert!((s.log_partition - z.ln()).abs() <= 1e-12);
    }

    #[test]
    fn large_beta_does_not_overflow() {
        let h = Operator::from_real_diagonal(&[-50.0, 0.0, 50.0]);
        let s = thermal_spectrum(&h, beta(1e4)).unwrap();
        assert!(s.probabilities.iter().all(|p| p.is_finite()));
        assert!((s.probabilities[0] - 1.0).abs() <= 1e-12);
        assert!((s.log_partition - 5e5).abs() <= 1e-9 * 5e5);
    }

    #[test]
    fn gibbs_examples() {
        let rho = gibbs_density(&random_hermitian(4, 1), Beta::ZERO).unwrap();
        assert!(
            rho.matrix()
                .frobenius_distance(&ComplexMatrix::from_real_diagonal(&[0.25; 4]))
                < 1e-14
        );

        let rho = gibbs_density(&two_level(), beta(50.0)).unwrap();
        let ground = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        assert!(rho.matrix().frobenius_distance(&ground) <= 1e-20);

        let rho = gibbs_density(&two_level(), beta(LN_2)).unwrap();
        let expected = ComplexMatrix::from_real_diagonal(&[2.0 / 3.0, 1.0 / 3.0]);
        assert!(rho.matrix().frobenius_distance(&expected) < 1e-15);
    }

    #[test]
    fn gibbs_commutes_with_hamiltonian() {
        let h = random_hermitian(5, 8);
        let rho = gibbs_density(&h, beta(1.3)).unwrap();
        let rh = rho.operator().try_mul(&h).unwrap();
        let hr = h.try_mul(rho.operator()).unwrap();
        assert!(rh.matrix().frobenius_distance(hr.matrix()) <= 1e-9 * h.matrix().frobenius_norm());
        assert!(rho.diagnostics().unwrap().is_valid());
    }

    #[test]
    fn thermal_average_examples() {
        let h = random_hermitian(4, 2);
        assert!(
            (thermal_average(&h, beta(3.0), &Operator::identity(4)).unwrap() - 1.0).abs() < 1e-14
        );

        let f = Operator::from_real_diagonal(&[1.0, 2.0, 6.0, -1.0]);
        assert!((thermal_average(&h, Beta::ZERO, &f).unwrap() - 2.0).abs() < 1e-14);

        let avg = thermal_average(&two_level(), beta(LN_2), &two_level()).unwrap();
        assert!((avg - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn thermal_average_errors() {
        let h = two_level();
        assert!(matches!(
            thermal_average(&h, beta(1.0), &Operator::identity(3)),
            Err(Error::DimensionMismatch(_))
        ));
        let upper = Operator::from_real_rows(2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            thermal_average(&h, beta(1.0), &upper),
            Err(Error::NotHermitian { .. })
        ));
        let non_hermitian_h = upper;
        assert!(thermal_spectrum(&non_hermitian_h, beta(1.0)).is_err());
    }

    #[test]
    fn tfd_at_infinite_temperature_is_maximally_entangled() {
        let h = random_hermitian(5, 4);
        let tfd = thermofield_double(&h, Beta::ZERO).unwrap();
        let r = schmidt_decompose(&tfd).unwrap();
        for c in &r.coefficients {
            assert!((c - 1.0 / 5f64.sqrt()).abs() < 1e-12);
        }
        assert!((entanglement_entropy(&tfd).unwrap() - 5f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn tfd_ground_state_limit() {
        let tfd = thermofield_double(&two_level(), beta(50.0)).unwrap();
        let a = tfd.amplitudes();
        assert!((a.get(0, 0) - Complex64::new(1.0, 0.0)).norm() <= 1e-10);
        assert!(a.frobenius_distance(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0])) <= 1e-10);
    }

    #[test]
    fn tfd_schmidt_coefficients_at_ln2() {
        let tfd = thermofield_double(&two_level(), beta(LN_2)).unwrap();
        let r = schmidt_decompose(&tfd).unwrap();
        assert!((r.coefficients[0] - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((r.coefficients[1] - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        let expected = -(2.0 / 3.0) * (2.0f64 / 3.0).ln() - (1.0 / 3.0) * (1.0f64 / 3.0).ln();
        assert!((entanglement_entropy(&tfd).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn tfd_capacity() {
        let h = Operator::zeros(2049);
        assert!(matches!(
            thermofield_double(&h, Beta::ZERO),
            Err(Error::Capacity { requested, .. }) if requested == 2049 * 2049
        ));
    }

    #[test]
    fn verify_examples() {
        let h = random_hermitian(3, 5);
        let r = verify_equivalence(&h, beta(2.0), &Operator::identity(3), "identity").unwrap();
        assert!(r.residual <= 1e-12);
        assert!((r.trace_average - 1.0).abs() <= 1e-12);

        let z = Operator::from_real_diagonal(&[1.0, -1.0]);
        let r = verify_equivalence(&two_level(), Beta::ZERO, &z, "z").unwrap();
        assert!(r.trace_average.abs() < 1e-15 && r.doubled_expectation.abs() < 1e-15);
        assert!((r.entropy - LN_2).abs() < 1e-15);
    }

    #[test]
    fn verify_random_triples() {
        let h = random_hermitian(6, 31);
        let f = random_hermitian(6, 32);
        for b in [0.1, 1.0, 10.0] {
            let r = verify_equivalence(&h, beta(b), &f, "F").unwrap();
            assert!(r.residual <= 1e-10, "beta {b}: residual {}", r.residual);
            assert_eq!(r.residual, (r.trace_average - r.doubled_expectation).abs());
        }
    }

    #[test]
    fn report_key_order() {
        let r = verify_equivalence(&two_level(), Beta::ZERO, &two_level(), "energy").unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let keys = [
            "beta",
            "observable_name",
            "trace_average",
            "doubled_expectation",
            "residual",
            "entropy",
            "schmidt_coefficients",
        ];
        let positions: Vec<usize> = keys
            .iter()
            .map(|k| text.find(&format!("\"{k}\"")).unwrap())
            .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]), "{text}");
    }

    #[test]
    fn decoherence_examples() {
        let rho = decohere_tfd(&random_hermitian(3, 6), Beta::ZERO).unwrap();
        assert!(
            rho.matrix()
                .frobenius_distance(&ComplexMatrix::from_real_diagonal(&[1.0 / 3.0; 3]))
                < 1e-14
        );

        let rho = decohere_tfd(&two_level(), beta(50.0)).unwrap();
        assert!(
            rho.matrix()
                .frobenius_distance(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0]))
                <= 1e-20
        );

        let h = random_hermitian(5, 37);
        let rho = decohere_tfd(&h, beta(2.0)).unwrap();
        assert!(rho.distance(&gibbs_density(&h, beta(2.0)).unwrap()) <= 1e-10);
    }

    #[test]
    fn grand_canonical_examples() {
        let h = random_hermitian(3, 9);
        let n = Operator::from_real_diagonal(&[0.0, 1.0, 2.0]);
        let plain = gibbs_density(&h, beta(1.5)).unwrap();
        assert!(
            gibbs_grand(&h, &n, beta(1.5), 0.0)
                .unwrap()
                .distance(&plain)
                < 1e-14
        );
        assert!(
            gibbs_grand(&h, &Operator::identity(3), beta(1.5), 0.7)
                .unwrap()
                .distance(&plain)
                < 1e-12
        );

        let h = Operator::from_real_diagonal(&[0.0, 1.0, 2.0]);
        let rho = gibbs_grand(&h, &h, beta(1.0), 1.0).unwrap();
        assert!(
            rho.matrix()
                .frobenius_distance(&ComplexMatrix::from_real_diagonal(&[1.0 / 3.0; 3]))
                < 1e-15
        );

        assert!(gibbs_grand(&h, &Operator::identity(2), beta(1.0), 0.0).is_err());
        assert!(gibbs_grand(&h, &h, beta(1.0), f64::NAN).is_err());
    }

    #[test]
    fn degenerate_levels_get_equal_weight() {
        let h = Operator::from_real_diagonal(&[1.0, 0.0, 1.0]);
        let s = thermal_spectrum(&h, beta(2.0)).unwrap();
        assert_eq!(s.probabilities[1], s.probabilities[2]);
        let rho = gibbs_density(&h, beta(2.0)).unwrap();
        assert!((trace(rho.operator()).re - 1.0).abs() < 1e-15);
    }
}
