//! Exact linear-programming substrate: rationals, a certificate-producing
//! simplex solver, certificate verification and Fourier-Motzkin projection.

pub mod certificate;
pub mod fourier_motzkin;
pub mod program;
pub mod rational;
pub mod simplex;

pub use certificate::{verify_certificate, CertificateCheck, CertificateReport};
pub use fourier_motzkin::{canonical_row, fourier_motzkin_project};
pub use program::{
    Constraint, FarkasCertificate, HPolytope, LinearProgram, LpOutcome, LpStatus, Optimum,
    Relation, Sense, UnboundedRay, VarKind, Variable,
};
pub use rational::{rat, ParseRationalError, Rational};
pub use simplex::solve_lp;
