//! Per-instance certification of the binary Poincaré inequality: scale
//! indices, greedy thinning, mutual supports, and recombination.

pub mod encode;
pub mod greedy;
pub mod recombine;
pub mod scales;

pub use encode::{binary_encode, median_translate, BinaryEncoding, BinaryField};
pub use greedy::{greedy_crossover, greedy_disjointify, GreedyFamily};
pub use recombine::{
    build_ledger, certify, certify_mode, certify_prepared, dichotomy_check, fit_params, lemma49_check,
    mutual_supports, prepare, Branch, CertInput, CertReport, ParamMode, ScaleLedger,
};
pub use scales::{jump_edges, lemma43_witness, scale_index, JumpIndex, ScaleIndex};
