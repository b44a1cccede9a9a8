//! Exceptional representations: irreps on which some order-4 group element
//! acts as a scalar, and the trace-labeling search that classifies where
//! they can live on the McKay graph.

use crate::groups::FiniteSubgroup;
use crate::irreps::{conjugacy_classes, UnitaryIrrep};
use crate::linalg::{max_abs, CMatrix, C64};
use crate::mckay::{graph_shape, DynkinType, McKayGraph};
use crate::{Error, Result};

const SCALAR_TOL: f64 = 1e-8;
const LABEL_TOL: f64 = 1e-6;

/// All pairs of an irrep with the order-4 elements acting as scalars on it,
/// grouped by irrep label. One-dimensional irreps are included (everything
/// is scalar there); callers filter by dimension.
pub fn find_exceptional(
    group: &FiniteSubgroup,
    irreps: &[UnitaryIrrep],
) -> Vec<(usize, Vec<usize>)> {
    let order4: Vec<usize> = (0..group.order())
        .filter(|&g| group.element_order(g) == 4)
        .collect();
    let mut out = Vec::new();
    for r in irreps {
        let mut hits = Vec::new();
        for &g in &order4 {
            let m = &r.matrices[g];
            let c = m[(0, 0)];
            let scalar = m - CMatrix::identity(r.dim, r.dim) * c;
            if max_abs(&scalar) <= SCALAR_TOL {
                hits.push(g);
            }
        }
        if !hits.is_empty() {
            out.push((r.label, hits));
        }
    }
    out
}

/// Labels of irreps of dimension above one that are exceptional.
pub fn exceptional_irreps_above_dim1(
    group: &FiniteSubgroup,
    irreps: &[UnitaryIrrep],
) -> Vec<usize> {
    find_exceptional(group, irreps)
        .into_iter()
        .filter(|(label, _)| irreps[*label].dim > 1)
        .map(|(label, _)| label)
        .collect()
}

/// A candidate assignment of order-4 traces to the vertices of the McKay
/// graph.
#[derive(Debug, Clone)]
pub struct TraceLabeling {
    pub labels: Vec<C64>,
}

impl TraceLabeling {
    pub fn squared_norm_sum(&self) -> f64 {
        self.labels.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Admissible label values for one vertex: spectra of the candidate element
/// are {1, -1} on even vertices and {i, -i} on odd ones, so the trace runs
/// over delta, delta-2, ..., -delta times 1 or i.
fn vertex_values(graph: &McKayGraph, v: usize) -> Vec<C64> {
    let delta = graph.delta[v] as i64;
    let unit = if graph.sigma[v] == 1 {
        C64::new(1.0, 0.0)
    } else {
        C64::new(0.0, 1.0)
    };
    (0..=delta)
        .map(|k| unit * C64::new((delta - 2 * k) as f64, 0.0))
        .collect()
}

/// Exhaustive search for labelings satisfying all four trace facts:
/// the extending vertex carries 1, neighbor sums vanish, and the admissible
/// value sets follow the bipartition.
pub fn enumerate_labelings(graph: &McKayGraph) -> Result<Vec<TraceLabeling>> {
    match graph_shape(graph)? {
        DynkinType::E7 | DynkinType::D(_) => {}
        _ => {
            return Err(Error::InvalidArgument(
                "labeling search is defined for E~7 and D~ graphs".into(),
            ))
        }
    }
    let m = graph.vertex_count();
    let choices: Vec<Vec<C64>> = (0..m)
        .map(|v| {
            if v == graph.extending {
                vec![C64::new(1.0, 0.0)]
            } else {
                vertex_values(graph, v)
            }
        })
        .collect();
    let mut out = Vec::new();
    let mut current = vec![C64::new(0.0, 0.0); m];
    fn rec(
        graph: &McKayGraph,
        choices: &[Vec<C64>],
        v: usize,
        current: &mut Vec<C64>,
        out: &mut Vec<TraceLabeling>,
    ) {
        let m = graph.vertex_count();
        if v == m {
            out.push(TraceLabeling {
                labels: current.clone(),
            });
            return;
        }
        for &val in &choices[v] {
            current[v] = val;
            // prune: once every neighbor of a vertex is assigned, its
            // neighbor sum must vanish
            let ok = (0..=v).all(|i| {
                let nb = graph.neighbors(i);
                if nb.iter().any(|&j| j > v) {
                    return true;
                }
                let sum: C64 = nb.iter().map(|&j| current[j]).sum();
                sum.norm() <= LABEL_TOL
            });
            if ok {
                rec(graph, choices, v + 1, current, out);
            }
        }
    }
    rec(graph, &choices, 0, &mut current, &mut out);
    Ok(out)
}

/// Searches the order-4 elements for one whose traces match the labeling.
/// Returns None when the labeling is inadmissible or unmatched.
pub fn realizability_check(
    group: &FiniteSubgroup,
    irreps: &[UnitaryIrrep],
    graph: &McKayGraph,
    labeling: &TraceLabeling,
) -> Option<usize> {
    if (labeling.labels[graph.extending] - C64::new(1.0, 0.0)).norm() > LABEL_TOL {
        return None;
    }
    let classes = conjugacy_classes(group);
    (0..group.order())
        .filter(|&g| group.element_order(g) == 4)
        .find(|&g| {
            irreps.iter().enumerate().all(|(v, r)| {
                (r.character_on(&classes, g) - labeling.labels[v]).norm() <= LABEL_TOL
            })
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupKind;
    use crate::irreps::all_irreps;
    use crate::mckay::mckay_graph;

    fn setup(kind: GroupKind) -> (FiniteSubgroup, Vec<UnitaryIrrep>, McKayGraph) {
        let g = FiniteSubgroup::build(kind).unwrap();
        let irreps = all_irreps(&g, 17).unwrap();
        let graph = mckay_graph(&g, &irreps).unwrap();
        (g, irreps, graph)
    }

    #[test]
    fn tetrahedral_and_icosahedral_have_no_exceptional_above_dim_one() {
        for kind in [GroupKind::BinaryTetrahedral, GroupKind::BinaryIcosahedral] {
            let (g, irreps, _) = setup(kind);
            assert!(
                exceptional_irreps_above_dim1(&g, &irreps).is_empty(),
                "{kind:?}"
            );
        }
    }

    #[test]
    fn octahedral_has_one_exceptional_at_the_branch() {
        let (g, irreps, graph) = setup(GroupKind::BinaryOctahedral);
        let exc = exceptional_irreps_above_dim1(&g, &irreps);
        assert_eq!(exc.len(), 1);
        let v = exc[0];
        assert_eq!(irreps[v].dim, 2);
        // the branch vertex of E~7 is the leaf attached to the center
        let center = graph.center_vertex();
        assert_eq!(graph.degree(v), 1);
        assert_eq!(graph.adjacency[v][center], 1);
    }

    #[test]
    fn dihedral_pattern_alternates_on_the_interior() {
        for (n, expect) in [(4usize, 1usize), (6, 2), (8, 3)] {
            let (g, irreps, graph) = setup(GroupKind::BinaryDihedral(n));
            let exc = exceptional_irreps_above_dim1(&g, &irreps);
            assert_eq!(exc.len(), expect, "BD({n})");
            for v in exc {
                assert_eq!(irreps[v].dim, 2);
                // interior chain vertices have degree 2
                assert_eq!(graph.degree(v), 2);
            }
        }
    }

    #[test]
    fn scalar_criterion_agrees_with_character_magnitude() {
        // an irrep is exceptional iff some order-4 element has
        // |character| = dim
        for kind in [
            GroupKind::BinaryDihedral(2),
            GroupKind::BinaryDihedral(4),
            GroupKind::BinaryTetrahedral,
            GroupKind::BinaryOctahedral,
            GroupKind::BinaryIcosahedral,
        ] {
            let (g, irreps, _) = setup(kind);
            let classes = conjugacy_classes(&g);
            let by_scan: Vec<usize> = find_exceptional(&g, &irreps)
                .into_iter()
                .map(|(l, _)| l)
                .collect();
            let by_character: Vec<usize> = irreps
                .iter()
                .filter(|r| {
                    (0..g.order()).any(|k| {
                        g.element_order(k) == 4
                            && (r.character_on(&classes, k).norm() - r.dim as f64).abs() <= 1e-6
                    })
                })
                .map(|r| r.label)
                .collect();
            assert_eq!(by_scan, by_character, "{kind:?}");
        }
    }

    #[test]
    fn e7_labelings_are_exactly_two() {
        let (g, irreps, graph) = setup(GroupKind::BinaryOctahedral);
        let labelings = enumerate_labelings(&graph).unwrap();
        assert_eq!(labelings.len(), 2);
        let mut sums: Vec<f64> = labelings.iter().map(|l| l.squared_norm_sum()).collect();
        sums.sort_by(f64::total_cmp);
        assert!((sums[0] - 4.0).abs() <= 1e-9);
        assert!((sums[1] - 8.0).abs() <= 1e-9);

        // the branch label separates the two: 0 in one, 2 in the other
        let branch = exceptional_irreps_above_dim1(&g, &irreps)[0];
        let mut branch_labels: Vec<f64> =
            labelings.iter().map(|l| l.labels[branch].re).collect();
        branch_labels.sort_by(f64::total_cmp);
        assert!((branch_labels[0]).abs() <= 1e-9);
        assert!((branch_labels[1] - 2.0).abs() <= 1e-9);
    }

    #[test]
    fn e7_labelings_are_realized_with_the_right_centralizers() {
        let (g, irreps, graph) = setup(GroupKind::BinaryOctahedral);
        let labelings = enumerate_labelings(&graph).unwrap();
        let branch = exceptional_irreps_above_dim1(&g, &irreps)[0];
        for l in &labelings {
            let hit = realizability_check(&g, &irreps, &graph, l)
                .expect("labeling realized by an element");
            let cent = g.centralizer(hit).len();
            if l.labels[branch].re > 1.0 {
                // vertex-axis symmetries
                assert_eq!(cent, 8);
            } else {
                // edge-midpoint-axis symmetries
                assert_eq!(cent, 4);
            }
        }
    }

    #[test]
    fn invalid_labelings_are_rejected() {
        let (g, irreps, graph) = setup(GroupKind::BinaryOctahedral);
        let zero = TraceLabeling {
            labels: vec![C64::new(0.0, 0.0); graph.vertex_count()],
        };
        assert!(realizability_check(&g, &irreps, &graph, &zero).is_none());
        // enumerated labelings always satisfy the neighbor-sum rule
        for l in enumerate_labelings(&graph).unwrap() {
            for v in 0..graph.vertex_count() {
                let sum: C64 = graph.neighbors(v).iter().map(|&j| l.labels[j]).sum();
                assert!(sum.norm() <= 1e-9);
            }
        }
    }

    #[test]
    fn labeling_search_rejects_other_shapes() {
        let (_, _, graph) = setup(GroupKind::BinaryTetrahedral);
        assert!(enumerate_labelings(&graph).is_err());
    }

    #[test]
    fn dihedral_labelings_include_realized_ones() {
        let (g, irreps, graph) = setup(GroupKind::BinaryDihedral(4));
        let labelings = enumerate_labelings(&graph).unwrap();
        assert!(!labelings.is_empty());
        let exc = exceptional_irreps_above_dim1(&g, &irreps);
        let realized: Vec<&TraceLabeling> = labelings
            .iter()
            .filter(|l| realizability_check(&g, &irreps, &graph, l).is_some())
            .collect();
        assert!(!realized.is_empty());
        assert!(realized
            .iter()
            .any(|l| exc.iter().any(|&v| (l.labels[v].norm() - 2.0).abs() <= 1e-9)));
    }
}
