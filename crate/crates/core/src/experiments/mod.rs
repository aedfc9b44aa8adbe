//! Drivers for the seeded experiments: minima surveys, frequency splits,
//! entropy dynamics, decision-boundary rasters and MNIST spectra.

mod dynamics;
mod mnist;
mod raster;
mod sharp_flat;
mod survey;

pub use dynamics::{analyzed_layers, entropy_dynamics, layer_entropy, std_dev, EntropySample, EntropySeries};
pub use mnist::{
    default_mnist_dir, histogram_csv, histograms, load_mnist, run_mnist, ConvNetSpec, LayerHistogram, MnistConfig,
    MnistReport, MNIST_DIR_ENV, TEST_IMAGES, TEST_LABELS, TRAIN_IMAGES, TRAIN_LABELS,
};
pub use raster::{raster_network, raster_neuron, rasterize, NeuronPreset, Raster};
pub use sharp_flat::{sharp_vs_flat, SharpFlatSplit};
pub use survey::{run_survey, summarize, SurveyConfig, SurveyReport, GOOD_MINIMUM_THRESHOLD};

use crate::datasets::LabeledDataset;

/// Two-feature dataset as CSV with header `x,y,label`.
pub fn points_csv(dataset: &LabeledDataset) -> String {
    let mut out = String::from("x,y,label\n");
    for (p, label) in dataset.iter() {
        out.push_str(&format!("{},{},{label}\n", p[0], p[1]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::{gen_taiji, TaiJiSpec};

    #[test]
    fn taiji_csv_rows() {
        let one = points_csv(&gen_taiji(TaiJiSpec { reciprocal: 1 }).unwrap());
        assert_eq!(one, "x,y,label\n0,0,0\n");
        let train = points_csv(&gen_taiji(TaiJiSpec::TRAIN).unwrap());
        assert_eq!(train.lines().count(), 1246);
        assert!(!train.contains('\r'));
    }
}
