//! Numerical verification: finite-difference oracles, bound scans, blow-up
//! tables, continuity sweeps, moduli of continuity and the gradient-modulus
//! estimate.

pub mod blowup;
pub mod bounds;
pub mod continuity;
pub mod derivatives;
pub mod fd;
pub mod modulus;
pub mod prop1;
pub mod sampling;

pub use blowup::{blowup_table, mixed_reference, wirtinger_reference};
pub use bounds::{
    lemma_2_2_counterexample, lemma_2_2_quantity, lemma_3_1_table, scan_lemma_2_2, scan_lemma_3_1, BoundEstimates,
    BoundScan, Lemma22Grid, Lemma31Grid,
};
pub use continuity::{
    check_decay, continuity_table, decay_ratio, differentiability_witness, gradient_quotient, multi_indices,
    origin_derivatives_vanish, v_contrast_table,
};
pub use derivatives::{derivative_check, DerivativeCheck, Zone};
pub use fd::{fd_derivative, FDScheme, FdEstimate};
pub use modulus::{modulus_of_continuity, radius_grid, ModulusTable};
pub use prop1::{prop1_check, CompositeProblem, Prop1Config, Prop1Problem, Prop1Report, QuadraticProblem};
