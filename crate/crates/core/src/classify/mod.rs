//! Invariant rays, channel diagrams, postcritical checks, normal forms and
//! conjugacy tests.

mod audit;
mod conjugacy;
mod pcm;
mod rays;

pub use audit::{correspondence_audit, AuditReport, PetalMatch};
pub use conjugacy::{affine_conjugacy_test, normalize, ConjugacyResult, Normalized, TAU_CONJ};
pub use pcm::{
    access_count_parabolic, accesses_for_local_degree, check_pcf, check_pcm, PcmReport, Verdict,
    HOMOTOPY_NOTE,
};
pub use rays::{
    boettcher_ray, channel_diagram, make_marking, BasinRays, ChannelDiagram, MarkedRay, Marking,
    Ray, RayOptions, RayRef, TAU_RAY,
};

use crate::algebra::Complex;
use crate::dynamics::DynamicsError;
use crate::newton::NewtonError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassifyError {
    #[error("operation needs a polynomial Newton map (deg q = 0)")]
    NotPolynomialNewton,
    #[error("operation needs a parabolic point at infinity (deg q >= 1)")]
    NotParabolic,
    #[error("{point} is not a root of p")]
    UnknownBasin { point: Complex },
    #[error("fixed point {point} is not superattracting")]
    NotSuperattracting { point: Complex },
    #[error("ray index {index} out of range for local degree {k}")]
    RayIndexOutOfRange { index: usize, k: usize },
    #[error("two preimage branches near {near} are closer than the ambiguity margin")]
    BranchAmbiguity { near: Complex },
    #[error("ray did not reach the escape radius within {arcs} arcs")]
    BudgetExhausted { arcs: usize },
    #[error("basin {basin} is marked twice")]
    DuplicateBasin { basin: usize },
    #[error("basin {basin} has no ray {ray}")]
    UnknownRay { basin: usize, ray: usize },
    #[error("no center located for petal {petal}")]
    NoCenter { petal: usize },
    #[error("ambiguous cyclic alignment: {0}")]
    AlignmentFailure(String),
    #[error("marking has {marked} rays but the parabolic map has {petals} petals")]
    MarkingSize { marked: usize, petals: usize },
    #[error(transparent)]
    Newton(#[from] NewtonError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}
