//! One-dimensional aperiodic tilings: substitution and cut-and-project
//! sequences, diffraction, tight-binding spectra, gap labels and Čech
//! cohomology.

pub mod bloch;
pub mod cohomology;
pub mod cut_project;
pub mod diffraction;
pub mod error;
pub mod field;
pub mod geometry;
pub mod groups;
pub mod intmat;
pub mod perron;
pub mod poly;
pub mod scalar;
pub mod spectral;
pub mod substitution;

pub use error::{Error, Result};

pub use bloch::{bloch_report, BlochConfig, CorrespondenceReport};
pub use cohomology::{cech_h1, collar, direct_limit, trace_image, CollaredAlphabet, DirectLimitGroup};
pub use cut_project::{chi, cp_word, CPParams, Slope};
pub use groups::{nearest_element, GroupElement, LabelGroup};
pub use substitution::{expand_word, occurrence_matrix, OccurrenceMatrix, SubstitutionRule, Word};

pub type AtomChain64 = geometry::AtomChain<f64>;
pub type AtomChain32 = geometry::AtomChain<f32>;
pub type PerronData64 = perron::PerronData<f64>;
pub type DiffractionSpectrum64 = diffraction::DiffractionSpectrum<f64>;
pub type TightBindingChain64 = spectral::TightBindingChain<f64>;
pub type TightBindingChain32 = spectral::TightBindingChain<f32>;
pub type EnergySpectrum64 = spectral::EnergySpectrum<f64>;
pub type Gap64 = spectral::Gap<f64>;
pub type IntMatrix = intmat::Matrix<num_bigint::BigInt>;
