//! Boltzmann action selection.

use rand::Rng;

use crate::error::{Error, Result};
use crate::ActionId;

/// An action drawn from a Boltzmann distribution, together with the full
/// distribution it was drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicySample {
    pub action: ActionId,
    pub probabilities: Vec<f64>,
}

/// Sample an action with probability proportional to `exp(merit / T)`.
///
/// Exponentials are shifted by the maximum merit so near-deterministic
/// temperatures (e.g. 1e-4) cannot overflow.
pub fn boltzmann_select<R: Rng + ?Sized>(
    merits: &[f64],
    temperature: f64,
    rng: &mut R,
) -> Result<PolicySample> {
    if merits.is_empty() {
        return Err(Error::EmptyActionSet);
    }
    if temperature.is_nan() || temperature <= 0.0 {
        return Err(Error::DomainError {
            what: "temperature",
            value: temperature,
            domain: "(0, inf)",
        });
    }
    let max = merits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = merits
        .iter()
        .map(|&m| ((m - max) / temperature).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    let probabilities: Vec<f64> = weights.iter().map(|w| w / total).collect();

    let draw: f64 = rng.random();
    let mut cumulative = 0.0;
    let mut action = (probabilities.len() - 1) as ActionId;
    for (i, &p) in probabilities.iter().enumerate() {
        cumulative += p;
        if draw < cumulative {
            action = i as ActionId;
            break;
        }
    }
    Ok(PolicySample {
        action,
        probabilities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rng() -> rand::rngs::StdRng {
        rand::rngs::StdRng::seed_from_u64(1)
    }

    #[test]
    fn equal_merits_are_uniform() {
        let sample = boltzmann_select(&[0.0, 0.0], 1.0, &mut rng()).unwrap();
        assert_eq!(sample.probabilities, vec![0.5, 0.5]);
    }

    #[test]
    fn unit_gap_at_unit_temperature() {
        let sample = boltzmann_select(&[1.0, 0.0], 1.0, &mut rng()).unwrap();
        let e = std::f64::consts::E;
        assert!((sample.probabilities[0] - e / (e + 1.0)).abs() < 1e-12);
        assert!((sample.probabilities[1] - 1.0 / (e + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn tiny_temperature_is_nearly_deterministic() {
        let sample = boltzmann_select(&[1.0, 0.0], 1e-4, &mut rng()).unwrap();
        assert!(sample.probabilities[0] > 1.0 - 1e-10);
        assert_eq!(sample.action, 0);
    }

    #[test]
    fn empty_and_degenerate_inputs_are_errors() {
        assert!(matches!(
            boltzmann_select(&[], 1.0, &mut rng()),
            Err(Error::EmptyActionSet)
        ));
        assert!(boltzmann_select(&[1.0], 0.0, &mut rng()).is_err());
    }

    #[test]
    fn probabilities_sum_to_one_and_shift_invariance_holds() {
        use rand::Rng;
        let mut r = rng();
        for _ in 0..200 {
            let n = r.random_range(1..=16);
            let temperature = 10f64.powf(r.random_range(-4.0..1.0));
            let merits: Vec<f64> = (0..n).map(|_| r.random_range(-5.0..5.0)).collect();
            let shift: f64 = r.random_range(-100.0..100.0);
            let shifted: Vec<f64> = merits.iter().map(|m| m + shift).collect();
            let a = boltzmann_select(&merits, temperature, &mut rng()).unwrap();
            let b = boltzmann_select(&shifted, temperature, &mut rng()).unwrap();
            let sum: f64 = a.probabilities.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
            for (pa, pb) in a.probabilities.iter().zip(&b.probabilities) {
                assert!((pa - pb).abs() < 1e-12);
            }
        }
    }
}
