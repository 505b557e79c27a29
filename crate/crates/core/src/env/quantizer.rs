//! Box quantization: ascending threshold lists per state variable, combined
//! into a single table index by mixed-radix encoding.

use crate::StateId;

/// Threshold-list quantizer. A variable below its first threshold falls in
/// bin 0; a value equal to a threshold goes to the upper bin; at or above the
/// last threshold it lands in the final bin.
#[derive(Debug, Clone)]
pub struct Quantizer {
    thresholds: Vec<Vec<f64>>,
}

impl Quantizer {
    pub fn new(thresholds: Vec<Vec<f64>>) -> Self {
        for dim in &thresholds {
            assert!(!dim.is_empty(), "each variable needs at least one threshold");
            assert!(
                dim.windows(2).all(|w| w[0] < w[1]),
                "thresholds must be strictly ascending"
            );
        }
        Quantizer { thresholds }
    }

    pub fn dims(&self) -> usize {
        self.thresholds.len()
    }

    /// Bin counts per variable (threshold count + 1).
    pub fn bins(&self) -> Vec<usize> {
        self.thresholds.iter().map(|t| t.len() + 1).collect()
    }

    /// Total number of distinct region ids.
    pub fn total_regions(&self) -> usize {
        self.thresholds.iter().map(|t| t.len() + 1).product()
    }

    /// Interval index for one variable.
    pub fn bin_for(&self, dim: usize, value: f64) -> usize {
        self.thresholds[dim].iter().filter(|&&t| value >= t).count()
    }

    /// Mixed-radix composition of per-variable bins, first variable most
    /// significant.
    pub fn quantize(&self, values: &[f64]) -> StateId {
        assert_eq!(values.len(), self.dims(), "dimension mismatch");
        let mut id = 0usize;
        for (dim, &value) in values.iter().enumerate() {
            id = id * (self.thresholds[dim].len() + 1) + self.bin_for(dim, value);
        }
        id as StateId
    }
}

/// Quantizer for the car parking task: 9 x 10 x 14 = 1260 regions, denser
/// near the garage.
pub fn car_quantizer() -> Quantizer {
    let pi = std::f64::consts::PI;
    Quantizer::new(vec![
        vec![-0.5, 0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0],
        vec![0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0],
        (19..=31).map(|k| k as f64 * pi / 20.0).collect(),
    ])
}

/// Quantizer for cart-pole: 3 x 3 x 6 x 3 = 162 boxes.
pub fn cartpole_quantizer() -> Quantizer {
    Quantizer::new(vec![
        vec![-0.8, 0.8],
        vec![-0.5, 0.5],
        vec![-0.105, -0.0175, 0.0, 0.0175, 0.105],
        vec![-0.8727, 0.8727],
    ])
}
