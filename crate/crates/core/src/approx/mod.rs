//! Polynomial approximation on disjoint compacts with error envelopes, and
//! assembly of the targets used by the constructions.

pub mod basis;
pub mod fit;
pub mod polynomial;
pub mod target;

pub use basis::{gram_independence, verify_basis_perturbation, GramReport, MemberRole, SpanBasis, SpanKind};
pub use fit::{fit_at_degree, fit_on_compacts, FhcCandidate, FitStatus, PieceCertificate};
pub use polynomial::{
    circle_coefficients, enumerate_dense_polynomial, l2_circle_norm, l2_circle_norm_of, trapezoid_circle_norm, Basis,
    Evaluate, LinearCombination, Polynomial,
};
pub use target::{
    assemble_dense_target, assemble_existence_target, assemble_spaceable_target, Envelope, IslandSupport, Piece,
    PieceSpec, PiecewiseTarget, Splits,
};
