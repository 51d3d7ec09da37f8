//! Convex-roof extensions of the pointer information and size to mixed states.

pub mod decomposition;
pub mod qfi;
pub mod qubit;
pub mod search;

pub use decomposition::{rho_distortion, rho_distortion_ensemble, EnsembleDecomposition};
pub use qfi::{pure_variance, qfi_size_bound, quantum_fisher_information};
pub use qubit::{
    binary_entropy, discrete_mutual_information, guessing_mi_extremes, guessing_probability, nx_max,
    pure_mi_2peak, pure_mic_2peak, roof_mic_2peak, tilde_i0, tilde_i0_inverse, BlochStateXZ,
};
pub use search::{direct_roof_mi, direct_roof_mi_with, mic_prime, mic_prime_with, search_roof, RoofMi, RoofSearch, SearchOptions};
