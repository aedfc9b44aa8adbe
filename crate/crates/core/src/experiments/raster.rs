use crate::error::{Error, Result};
use crate::quadcore::{Network, QuadraticNeuron};
use crate::trainer::predict_class;

/// Square binary image over `[−1, 1]²`. Row 0 is `y = +1`, column 0 is
/// `x = −1`; both grid ends are sampled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub resolution: usize,
    /// Row-major, 255 where the predicate holds and 0 elsewhere.
    pub pixels: Vec<u8>,
}

impl Raster {
    /// Coordinates of pixel `(row, col)`.
    pub fn point(resolution: usize, row: usize, col: usize) -> (f64, f64) {
        let step = 2.0 / (resolution - 1) as f64;
        (-1.0 + col as f64 * step, 1.0 - row as f64 * step)
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.pixels[row * self.resolution + col] != 0
    }

    /// Binary PGM (`P5`, maxval 255).
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{0} {0}\n255\n", self.resolution).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }
}

pub fn rasterize(resolution: usize, mut inside: impl FnMut(f64, f64) -> Result<bool>) -> Result<Raster> {
    if resolution < 2 {
        return Err(Error::InvalidParameter(format!("raster resolution {resolution} is below 2")));
    }
    let mut pixels = Vec::with_capacity(resolution * resolution);
    for row in 0..resolution {
        for col in 0..resolution {
            let (x, y) = Raster::point(resolution, row, col);
            pixels.push(if inside(x, y)? { 255 } else { 0 });
        }
    }
    Ok(Raster { resolution, pixels })
}

/// Region where the neuron output is strictly positive.
pub fn raster_neuron(neuron: &QuadraticNeuron, resolution: usize) -> Result<Raster> {
    if neuron.inputs() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: neuron.inputs() });
    }
    rasterize(resolution, |x, y| Ok(neuron.forward(&[x, y])? > 0.0))
}

/// Region where the network predicts a nonzero class.
pub fn raster_network(network: &Network, resolution: usize) -> Result<Raster> {
    if network.input_len() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: network.input_len() });
    }
    rasterize(resolution, |x, y| Ok(predict_class(&network.forward_slice(&[x, y])?) != 0))
}

/// Hand-built two-input neurons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeuronPreset {
    /// `(x₁ + x₂ − ½)(−x₁ − x₂ + 3⁄2)`: XOR on the unit-square corners.
    Xor,
    /// `f ≡ 1`.
    Constant,
    /// `x₁² + x₂² − 0.1`.
    WitnessA,
    /// `(x₁ − ½)² + x₂² − 0.1`: same `J` as `WitnessA`, different boundary.
    WitnessB,
}

impl NeuronPreset {
    pub const ALL: [NeuronPreset; 4] =
        [NeuronPreset::Xor, NeuronPreset::Constant, NeuronPreset::WitnessA, NeuronPreset::WitnessB];

    pub fn name(self) -> &'static str {
        match self {
            NeuronPreset::Xor => "xor",
            NeuronPreset::Constant => "constant",
            NeuronPreset::WitnessA => "witness-a",
            NeuronPreset::WitnessB => "witness-b",
        }
    }

    pub fn neuron(self) -> QuadraticNeuron {
        let (w_r, w_g, w_b, b_r, b_g, c) = match self {
            NeuronPreset::Xor => ([1.0, 1.0], [-1.0, -1.0], [0.0, 0.0], -0.5, 1.5, 0.0),
            NeuronPreset::Constant => ([0.0, 0.0], [0.0, 0.0], [0.0, 0.0], 0.0, 0.0, 1.0),
            NeuronPreset::WitnessA => ([1.0, 0.0], [1.0, 0.0], [0.0, 1.0], 0.0, 0.0, -0.1),
            NeuronPreset::WitnessB => ([1.0, 0.0], [1.0, 0.0], [0.0, 1.0], -0.5, -0.5, -0.1),
        };
        QuadraticNeuron::new(w_r.to_vec(), w_g.to_vec(), w_b.to_vec(), b_r, b_g, c).expect("preset shapes agree")
    }
}

impl std::str::FromStr for NeuronPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NeuronPreset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown neuron preset {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{neuron_signature, DEFAULT_EPSILON_REL};

    #[test]
    fn grid_endpoints_and_orientation() {
        assert_eq!(Raster::point(3, 0, 0), (-1.0, 1.0));
        assert_eq!(Raster::point(3, 2, 2), (1.0, -1.0));
        assert_eq!(Raster::point(3, 1, 1), (0.0, 0.0));
        let r = rasterize(4, |_, y| Ok(y > 0.0)).unwrap();
        assert!(r.get(0, 3) && r.get(1, 0) && !r.get(2, 0) && !r.get(3, 3));
    }

    #[test]
    fn pgm_header() {
        let r = rasterize(2, |x, _| Ok(x > 0.0)).unwrap();
        assert_eq!(r.to_pgm(), b"P5\n2 2\n255\n\x00\xff\x00\xff".to_vec());
        assert!(rasterize(1, |_, _| Ok(true)).is_err());
    }

    #[test]
    fn xor_corner_probes() {
        let r = raster_neuron(&NeuronPreset::Xor.neuron(), 64).unwrap();
        // Pixels nearest to (0,0), (1,0), (0,1), (1,1).
        let (zero_col, zero_row, one_col, one_row) = (32, 31, 63, 0);
        assert!(!r.get(zero_row, zero_col));
        assert!(r.get(zero_row, one_col));
        assert!(r.get(one_row, zero_col));
        assert!(!r.get(one_row, one_col));
    }

    #[test]
    fn constant_is_all_on() {
        let r = raster_neuron(&NeuronPreset::Constant.neuron(), 16).unwrap();
        assert!(r.pixels.iter().all(|&p| p == 255));
    }

    #[test]
    fn witness_pair_shares_signature_but_not_raster() {
        let a = NeuronPreset::WitnessA.neuron();
        let b = NeuronPreset::WitnessB.neuron();
        assert_eq!(
            neuron_signature(&a, DEFAULT_EPSILON_REL).unwrap(),
            neuron_signature(&b, DEFAULT_EPSILON_REL).unwrap()
        );
        assert_ne!(raster_neuron(&a, 32).unwrap().to_pgm(), raster_neuron(&b, 32).unwrap().to_pgm());
    }

    #[test]
    fn rejects_wrong_dimension() {
        assert!(raster_neuron(&QuadraticNeuron::zeros(3), 8).is_err());
        let net = Network::mlp(&[3, 1], crate::quadcore::Activation::Sigmoid, crate::quadcore::Activation::Sigmoid)
            .unwrap();
        assert!(raster_network(&net, 8).is_err());
    }

    #[test]
    fn presets_parse() {
        for p in NeuronPreset::ALL {
            assert_eq!(p.name().parse::<NeuronPreset>().unwrap(), p);
        }
        assert!("nand".parse::<NeuronPreset>().is_err());
    }
}
