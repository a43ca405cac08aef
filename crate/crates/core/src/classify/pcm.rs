use serde::{Deserialize, Serialize};

use super::ClassifyError;
use crate::dynamics::{
    analyze_critical_orbits, CaptureParams, CensusEntry, CriticalAnalysis, CriticalOrbit,
    OrbitEngine,
};
use crate::newton::NewtonSpec;

/// Attached to every report that counts accesses.
pub const HOMOTOPY_NOTE: &str =
    "accesses are counted as fixed rays (k-1 per center of local degree k); homotopy classes are not computed";

const JULIA_NOTE: &str =
    "critical orbits in the Julia set are reported as finite within the iteration budget only";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "detail", rename_all = "snake_case")]
pub enum Verdict {
    ConsistentWithPcm,
    ConsistentWithPcf,
    Violation(Vec<String>),
    Inconclusive(String),
}

impl Verdict {
    pub fn is_consistent(&self) -> bool {
        matches!(
            self,
            Verdict::ConsistentWithPcm | Verdict::ConsistentWithPcf
        )
    }
}

/// Numerical evidence for postcritical finiteness or minimality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcmReport {
    pub verdict: Verdict,
    pub evidence: Vec<CriticalOrbit>,
    pub immediate_basin_census: Vec<CensusEntry>,
    pub budget: usize,
    pub notes: Vec<String>,
}

fn report(analysis: CriticalAnalysis, consistent: Verdict) -> PcmReport {
    let failures = analysis.failures();
    let verdict = if !failures.is_empty() {
        Verdict::Violation(failures)
    } else if analysis.undecided() {
        Verdict::Inconclusive(format!(
            "a critical orbit is undecided after {} iterations",
            analysis.budget
        ))
    } else {
        consistent
    };
    PcmReport {
        verdict,
        evidence: analysis.orbits,
        immediate_basin_census: analysis.census,
        budget: analysis.budget,
        notes: vec![JULIA_NOTE.to_string()],
    }
}

/// Checks minimality for a map with a parabolic point at infinity: one
/// critical point per immediate basin of infinity, and every other free
/// critical orbit landing exactly on a root, a center or a superattracting
/// cycle.
pub fn check_pcm(
    spec: &NewtonSpec,
    budget: usize,
    caps: CaptureParams,
) -> Result<PcmReport, ClassifyError> {
    if spec.n == 0 {
        return Err(ClassifyError::NotParabolic);
    }
    let engine = OrbitEngine::new(spec, caps);
    let mut rep = report(
        analyze_critical_orbits(&engine, budget),
        Verdict::ConsistentWithPcm,
    );
    rep.notes.push(HOMOTOPY_NOTE.to_string());
    Ok(rep)
}

/// Checks postcritical finiteness of a polynomial Newton map.
pub fn check_pcf(
    spec: &NewtonSpec,
    budget: usize,
    caps: CaptureParams,
) -> Result<PcmReport, ClassifyError> {
    if spec.n != 0 {
        return Err(ClassifyError::NotPolynomialNewton);
    }
    let engine = OrbitEngine::new(spec, caps);
    Ok(report(
        analyze_critical_orbits(&engine, budget),
        Verdict::ConsistentWithPcf,
    ))
}

/// Invariant accesses to infinity of an immediate basin whose center has
/// local degree `k`.
pub fn accesses_for_local_degree(k: usize) -> usize {
    k.saturating_sub(1)
}

/// Number of invariant accesses to infinity in the immediate basin of
/// `petal_index`, from the local degree of its center.
pub fn access_count_parabolic(
    spec: &NewtonSpec,
    petal_index: usize,
    budget: usize,
) -> Result<usize, ClassifyError> {
    if spec.n == 0 {
        return Err(ClassifyError::NotParabolic);
    }
    let engine = OrbitEngine::new(spec, CaptureParams::default());
    let analysis = analyze_critical_orbits(&engine, budget);
    let center = analysis
        .centers
        .get(petal_index)
        .copied()
        .flatten()
        .ok_or(ClassifyError::NoCenter { petal: petal_index })?;
    let k = analysis
        .orbits
        .iter()
        .find(|o| o.point == center)
        .map(|o| o.local_degree)
        .ok_or(ClassifyError::NoCenter { petal: petal_index })?;
    Ok(accesses_for_local_degree(k))
}
