//! Quadratic-form matrices of neurons, their eigen-spectra and inertia, and
//! the statistics built on gate-type tallies (entropy, EGM, M).

mod eigen;
mod inertia;
mod jmatrix;
mod layer;
mod robustness;
mod stats;

pub use eigen::{eigen_decompose, eigen_symmetric, EigenDecomposition, EigenSpectrum, MAX_SWEEPS, OFF_DIAGONAL_TOLERANCE};
pub use inertia::{classify_inertia, full_types, type_count, InertiaSignature, TypeMode, DEFAULT_EPSILON_REL};
pub use jmatrix::{build_j_matrix, pure_quadratic_part, QuadMatrix};
pub use layer::{
    first_hidden_layer, layer_spectrum, network_spectrum, neuron_signature, neurons_spectrum, LayerSpectrum,
    NetworkSpectrum,
};
pub use robustness::{hoffman_wielandt_check, HoffmanWielandt};
pub use stats::{
    egm, entropy_bits, entropy_of_counts, frequency_table, frequency_variance, m_measure, KeyFrequency,
    MinimaSurveyRecord,
};
