use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{ClassifyError, Marking, HOMOTOPY_NOTE};
use crate::dynamics::{analyze_critical_orbits, CaptureParams, OrbitEngine};
use crate::newton::{petal_directions, NewtonSpec};

/// A marked ray paired with a petal of the parabolic map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PetalMatch {
    /// Position in `Marking::rays`.
    pub marked: usize,
    pub petal: usize,
    pub ray_angle: f64,
    pub petal_angle: f64,
    /// Local degree of the marked fixed point.
    pub ray_degree: usize,
    /// Local degree of the center of the petal's immediate basin.
    pub center_degree: Option<usize>,
}

impl PetalMatch {
    pub fn degrees_agree(&self) -> bool {
        self.center_degree == Some(self.ray_degree)
    }
}

/// Outcome of comparing a marked polynomial Newton map with a parabolic one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub pass: bool,
    pub marked_rays: usize,
    pub petals: usize,
    pub matches: Vec<PetalMatch>,
    pub unmarked_basins: usize,
    pub superattracting_roots: usize,
    pub notes: Vec<String>,
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Matches marked rays to petals by cyclic order of their directions and
/// checks local degrees and the count of unmarked basins.
pub fn correspondence_audit(
    pcf: &NewtonSpec,
    marking: &Marking,
    pcm: &NewtonSpec,
    budget: usize,
) -> Result<AuditReport, ClassifyError> {
    if pcf.n != 0 {
        return Err(ClassifyError::NotPolynomialNewton);
    }
    if pcm.n == 0 {
        return Err(ClassifyError::NotParabolic);
    }
    let petals = petal_directions(pcm)?;
    if marking.len() != petals.len() {
        return Err(ClassifyError::MarkingSize {
            marked: marking.len(),
            petals: petals.len(),
        });
    }
    let n = petals.len();

    let mut ray_order: Vec<usize> = (0..n).collect();
    ray_order.sort_by(|&a, &b| {
        let ta = marking.rays[a].asymptotic_angle.rem_euclid(2.0 * PI);
        let tb = marking.rays[b].asymptotic_angle.rem_euclid(2.0 * PI);
        ta.total_cmp(&tb)
    });
    let mut petal_order: Vec<usize> = (0..n).collect();
    petal_order.sort_by(|&a, &b| {
        petals[a]
            .rem_euclid(2.0 * PI)
            .total_cmp(&petals[b].rem_euclid(2.0 * PI))
    });

    let mismatch = |shift: usize| -> f64 {
        (0..n)
            .map(|i| {
                angle_gap(
                    marking.rays[ray_order[i]].asymptotic_angle,
                    petals[petal_order[(i + shift) % n]],
                )
            })
            .sum()
    };
    let scores: Vec<f64> = (0..n).map(mismatch).collect();
    let best = (0..n)
        .min_by(|&a, &b| scores[a].total_cmp(&scores[b]))
        .unwrap_or(0);
    if let Some(tie) = (0..n).find(|&s| s != best && (scores[s] - scores[best]).abs() < 1e-9) {
        return Err(ClassifyError::AlignmentFailure(format!(
            "rotations {best} and {tie} both have mismatch {:.3e}",
            scores[best]
        )));
    }

    let analysis =
        analyze_critical_orbits(&OrbitEngine::new(pcm, CaptureParams::default()), budget);
    let matches: Vec<PetalMatch> = (0..n)
        .map(|i| {
            let marked = ray_order[i];
            let petal = petal_order[(i + best) % n];
            let ray = &marking.rays[marked];
            let center_degree = analysis
                .census
                .iter()
                .find(|c| c.petal == petal && c.count == 1)
                .map(|c| c.local_degrees[0]);
            PetalMatch {
                marked,
                petal,
                ray_angle: ray.asymptotic_angle,
                petal_angle: petals[petal],
                ray_degree: ray.local_degree,
                center_degree,
            }
        })
        .collect();

    let unmarked_basins = marking.marked.iter().filter(|m| m.is_none()).count();
    let superattracting_roots = pcm.roots.iter().filter(|r| r.multiplicity == 1).count();

    let mut notes = vec![HOMOTOPY_NOTE.to_string()];
    for m in matches.iter().filter(|m| !m.degrees_agree()) {
        notes.push(match m.center_degree {
            Some(k) => format!(
                "petal {} has a center of local degree {k}, marked ray has {}",
                m.petal, m.ray_degree
            ),
            None => format!("petal {} has no unique center", m.petal),
        });
    }
    if unmarked_basins != superattracting_roots {
        notes.push(format!(
            "{unmarked_basins} unmarked basins against {superattracting_roots} superattracting roots"
        ));
    }
    let pass =
        matches.iter().all(PetalMatch::degrees_agree) && unmarked_basins == superattracting_roots;
    Ok(AuditReport {
        pass,
        marked_rays: marking.len(),
        petals: n,
        matches,
        unmarked_basins,
        superattracting_roots,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Polynomial;
    use crate::classify::{channel_diagram, make_marking};
    use crate::newton::build_newton;

    fn cubic() -> NewtonSpec {
        build_newton(
            &Polynomial::from_real(&[0.0, -1.0, 0.0, 1.0]),
            &Polynomial::zero(),
        )
        .unwrap()
    }

    fn family(c: f64) -> NewtonSpec {
        build_newton(&Polynomial::from_real(&[c, 0.0, 1.0]), &Polynomial::z()).unwrap()
    }

    #[test]
    fn cubic_markings_match_quadratic_members() {
        let pcf = cubic();
        let diagram = channel_diagram(&pcf).unwrap();
        // basins sorted as -1, 0, 1; the basin of 0 has local degree 3
        let simple = make_marking(&diagram, &[(0, 0)]).unwrap();
        let rep = correspondence_audit(&pcf, &simple, &family(-0.25), 50_000).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.unmarked_basins, 2);

        let double = make_marking(&diagram, &[(1, 0)]).unwrap();
        let rep = correspondence_audit(&pcf, &double, &family(2.0), 50_000).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.matches[0].center_degree, Some(3));

        let crossed = correspondence_audit(&pcf, &double, &family(-0.25), 50_000).unwrap();
        assert!(!crossed.pass);
    }

    #[test]
    fn wrong_sizes_and_kinds_are_rejected() {
        let pcf = cubic();
        let diagram = channel_diagram(&pcf).unwrap();
        let empty = make_marking(&diagram, &[]).unwrap();
        assert_eq!(
            correspondence_audit(&pcf, &empty, &family(2.0), 1_000).unwrap_err(),
            ClassifyError::MarkingSize {
                marked: 0,
                petals: 1
            }
        );
        assert_eq!(
            correspondence_audit(&family(2.0), &empty, &family(2.0), 1_000).unwrap_err(),
            ClassifyError::NotPolynomialNewton
        );
    }
}
