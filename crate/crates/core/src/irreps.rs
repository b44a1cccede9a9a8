//! Irreducible unitary representations via numerical decomposition of the
//! regular representation.
//!
//! The regular representation is split recursively: a seeded random Hermitian
//! probe is averaged over the group, its eigenspaces are invariant subspaces,
//! and a subspace is declared irreducible once the commutant of the restricted
//! representation is one-dimensional. Probe draws are keyed to the subspace's
//! position in the recursion tree, so the result depends only on the seed.

use crate::groups::FiniteSubgroup;
use crate::linalg::{
    c, cluster_indices, commutant_dimension, cr, hermitian_eigen, max_abs, random_hermitian,
    CMatrix, C64,
};
use crate::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CLUSTER_TOL: f64 = 1e-7;
const CHAR_TOL: f64 = 1e-6;
const MAX_PROBES: usize = 10;
const COMMUTANT_CHECK_DIM: usize = 12;

#[derive(Debug, Clone)]
pub struct ConjugacyClasses {
    pub classes: Vec<Vec<usize>>,
    pub representatives: Vec<usize>,
    pub class_of: Vec<usize>,
}

/// Orbit partition of the group under conjugation. The identity class comes
/// first; the rest are ordered by their smallest member.
pub fn conjugacy_classes(group: &FiniteSubgroup) -> ConjugacyClasses {
    let n = group.order();
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for g in 0..n {
        if class_of[g] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let mut members: Vec<usize> = (0..n).map(|h| group.conjugate(h, g)).collect();
        members.sort_unstable();
        members.dedup();
        for &m in &members {
            class_of[m] = id;
        }
        classes.push(members);
    }
    let representatives = classes.iter().map(|c| c[0]).collect();
    ConjugacyClasses {
        classes,
        representatives,
        class_of,
    }
}

#[derive(Debug, Clone)]
pub struct UnitaryIrrep {
    pub label: usize,
    pub dim: usize,
    /// One matrix per group element, indexed like the group.
    pub matrices: Vec<CMatrix>,
    /// One value per conjugacy class.
    pub character: Vec<C64>,
}

impl UnitaryIrrep {
    pub fn apply(&self, g: usize) -> &CMatrix {
        &self.matrices[g]
    }

    pub fn character_on(&self, classes: &ConjugacyClasses, g: usize) -> C64 {
        self.character[classes.class_of[g]]
    }
}

/// Class-weighted character inner product (1/|G|) sum |c| x_i(c) conj(x_j(c)).
pub fn character_inner(group: &FiniteSubgroup, classes: &ConjugacyClasses, a: &[C64], b: &[C64]) -> C64 {
    let mut acc = c(0.0, 0.0);
    for (k, cl) in classes.classes.iter().enumerate() {
        acc += a[k] * b[k].conj() * cr(cl.len() as f64);
    }
    acc / cr(group.order() as f64)
}

fn path_stream(path: &[u32], attempt: u32) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &p in path {
        h = (h ^ p as u64).wrapping_mul(0x100000001b3);
    }
    h = (h ^ 0xa5a5).wrapping_mul(0x100000001b3);
    h.wrapping_add(attempt as u64)
}

/// Left regular permutation action applied to the columns of `q`:
/// (P(g) q)[g h, :] = q[h, :].
fn regular_apply(group: &FiniteSubgroup, g: usize, q: &CMatrix) -> CMatrix {
    let n = group.order();
    let mut out = CMatrix::zeros(n, q.ncols());
    for h in 0..n {
        let dst = group.mul(g, h);
        for j in 0..q.ncols() {
            out[(dst, j)] = q[(h, j)];
        }
    }
    out
}

fn restricted_rep(group: &FiniteSubgroup, q: &CMatrix, g: usize) -> CMatrix {
    q.adjoint() * regular_apply(group, g, q)
}

/// Average of rho(g) m rho(g)^dagger over the group, for the restriction to
/// the (invariant) subspace spanned by the orthonormal columns of `q`.
fn averaged_probe(group: &FiniteSubgroup, q: &CMatrix, m: &CMatrix) -> CMatrix {
    let n = group.order();
    let k = q.ncols();
    let mut t = CMatrix::zeros(k, k);
    for g in 0..n {
        let rg = restricted_rep(group, q, g);
        t += &rg * m * rg.adjoint();
    }
    t /= cr(n as f64);
    (&t + t.adjoint()) * cr(0.5)
}

fn split_subspace(
    group: &FiniteSubgroup,
    seed: u64,
    q: CMatrix,
    path: Vec<u32>,
    leaves: &mut Vec<CMatrix>,
) -> Result<()> {
    let k = q.ncols();
    if k == 1 {
        leaves.push(q);
        return Ok(());
    }
    if k <= COMMUTANT_CHECK_DIM {
        let mats: Vec<CMatrix> = (0..group.order())
            .map(|g| restricted_rep(group, &q, g))
            .collect();
        if commutant_dimension(&mats, 1e-6) == 1 {
            leaves.push(q);
            return Ok(());
        }
    }
    for attempt in 0..MAX_PROBES as u32 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(path_stream(&path, attempt));
        let probe = random_hermitian(&mut rng, k);
        let t = averaged_probe(group, &q, &probe);
        let (vals, vecs) = hermitian_eigen(&t);
        let clusters = cluster_indices(&vals, CLUSTER_TOL);
        if clusters.len() < 2 {
            continue;
        }
        for (ci, cluster) in clusters.into_iter().enumerate() {
            let mut sub = CMatrix::zeros(q.nrows(), cluster.len());
            for (j, &idx) in cluster.iter().enumerate() {
                sub.set_column(j, &vecs.column(idx));
            }
            let child = &q * sub;
            let mut child_path = path.clone();
            child_path.push(ci as u32);
            split_subspace(group, seed, child, child_path, leaves)?;
        }
        return Ok(());
    }
    Err(Error::SplitFailure {
        dim: k,
        attempts: MAX_PROBES,
    })
}

/// First split of the full regular representation. Works directly with the
/// permutation action, which keeps the 120-dimensional case cheap.
fn split_root(group: &FiniteSubgroup, seed: u64) -> Result<Vec<CMatrix>> {
    let n = group.order();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path_stream(&[], 0));
    let probe = random_hermitian(&mut rng, n);
    // T = (1/n) sum_g P(g) M P(g)^{-1}; entry (a, b) averages M[g^{-1}a, g^{-1}b]
    let mut t = CMatrix::zeros(n, n);
    for g in 0..n {
        let gi = group.inv(g);
        for a in 0..n {
            let ga = group.mul(gi, a);
            for b in 0..n {
                t[(a, b)] += probe[(ga, group.mul(gi, b))];
            }
        }
    }
    t /= cr(n as f64);
    let t = (&t + t.adjoint()) * cr(0.5);
    let (vals, vecs) = hermitian_eigen(&t);
    let clusters = cluster_indices(&vals, CLUSTER_TOL);
    let mut leaves = Vec::new();
    for (ci, cluster) in clusters.into_iter().enumerate() {
        let mut sub = CMatrix::zeros(n, cluster.len());
        for (j, &idx) in cluster.iter().enumerate() {
            sub.set_column(j, &vecs.column(idx));
        }
        split_subspace(group, seed, sub, vec![ci as u32], &mut leaves)?;
    }
    Ok(leaves)
}

/// Rebase a representation so it becomes exactly unitary: average the Gram
/// matrix over the group and conjugate by the Cholesky factor.
fn unitarize(mats: &mut [CMatrix]) {
    let d = mats[0].nrows();
    let mut gram = CMatrix::zeros(d, d);
    for m in mats.iter() {
        gram += m.adjoint() * m;
    }
    gram /= cr(mats.len() as f64);
    let gram = (&gram + gram.adjoint()) * cr(0.5);
    let chol = nalgebra::Cholesky::new(gram).expect("gram matrix is positive definite");
    let s = chol.l().adjoint();
    let s_inv = s.clone().try_inverse().expect("triangular factor invertible");
    for m in mats.iter_mut() {
        *m = &s * m.clone() * &s_inv;
    }
}

fn round_c(z: C64) -> (i64, i64) {
    ((z.re / CHAR_TOL).round() as i64, (z.im / CHAR_TOL).round() as i64)
}

/// Complete set of irreducible unitary representations, deterministic for a
/// given seed. Labels are assigned after sorting by dimension and character.
pub fn all_irreps(group: &FiniteSubgroup, seed: u64) -> Result<Vec<UnitaryIrrep>> {
    let classes = conjugacy_classes(group);
    let leaves = split_root(group, seed)?;
    let mut reps: Vec<(usize, Vec<CMatrix>, Vec<C64>)> = Vec::new();
    for q in leaves {
        let mut mats: Vec<CMatrix> = (0..group.order())
            .map(|g| restricted_rep(group, &q, g))
            .collect();
        unitarize(&mut mats);
        let character: Vec<C64> = classes
            .classes
            .iter()
            .map(|cl| {
                let mut acc = c(0.0, 0.0);
                for &g in cl {
                    acc += mats[g].trace();
                }
                acc / cr(cl.len() as f64)
            })
            .collect();
        reps.push((mats[0].nrows(), mats, character));
    }
    // dedup by character, deterministic order
    reps.sort_by(|a, b| {
        let ka: Vec<(i64, i64)> = a.2.iter().map(|&z| round_c(z)).collect();
        let kb: Vec<(i64, i64)> = b.2.iter().map(|&z| round_c(z)).collect();
        a.0.cmp(&b.0).then(ka.cmp(&kb))
    });
    let mut out: Vec<UnitaryIrrep> = Vec::new();
    for (dim, mats, character) in reps {
        let dup = out.iter().any(|r| {
            r.character
                .iter()
                .zip(&character)
                .all(|(x, y)| (x - y).norm() <= CHAR_TOL)
        });
        if !dup {
            out.push(UnitaryIrrep {
                label: out.len(),
                dim,
                matrices: mats,
                character,
            });
        }
    }
    let total: usize = out.iter().map(|r| r.dim * r.dim).sum();
    if total != group.order() {
        return Err(Error::SplitFailure {
            dim: group.order() - total,
            attempts: MAX_PROBES,
        });
    }
    Ok(out)
}

/// Index of the trivial representation (character identically one).
pub fn trivial_rep(irreps: &[UnitaryIrrep]) -> usize {
    irreps
        .iter()
        .position(|r| r.character.iter().all(|z| (z - cr(1.0)).norm() <= CHAR_TOL))
        .expect("the trivial representation is always present")
}

/// The irrep matching the traces of the defining 2x2 matrices.
pub fn tautological_rep<'a>(
    group: &FiniteSubgroup,
    classes: &ConjugacyClasses,
    irreps: &'a [UnitaryIrrep],
) -> Result<&'a UnitaryIrrep> {
    let target: Vec<C64> = classes
        .representatives
        .iter()
        .map(|&g| group.matrix(g).trace())
        .collect();
    irreps
        .iter()
        .find(|r| {
            r.character
                .iter()
                .zip(&target)
                .all(|(x, y)| (x - y).norm() <= CHAR_TOL)
        })
        .ok_or(Error::TautologicalNotFound)
}

/// Multiplicity of irrep `a` inside the product of the tautological character
/// with irrep `b`, by class-weighted character pairing. Used by the McKay
/// construction.
pub fn tensor_multiplicity(
    group: &FiniteSubgroup,
    classes: &ConjugacyClasses,
    taut: &[C64],
    a: &UnitaryIrrep,
    b: &UnitaryIrrep,
) -> Result<usize> {
    let prod: Vec<C64> = (0..classes.classes.len())
        .map(|k| taut[k] * b.character[k])
        .collect();
    let m = character_inner(group, classes, &prod, &a.character);
    let rounded = m.re.round();
    if (m.re - rounded).abs() > CHAR_TOL || m.im.abs() > CHAR_TOL || rounded < 0.0 {
        return Err(Error::NonIntegerMultiplicity(m.re));
    }
    Ok(rounded as usize)
}

/// Restriction of a vector of matrices to a subgroup given by indices.
pub fn restriction<'a>(irrep: &'a UnitaryIrrep, subgroup: &[usize]) -> Vec<&'a CMatrix> {
    subgroup.iter().map(|&g| &irrep.matrices[g]).collect()
}

/// Hermitian probe averaged over the full representation; used by tests to
/// check the splitting invariant directly.
pub fn averaged_commuting_probe(
    group: &FiniteSubgroup,
    irrep: &UnitaryIrrep,
    seed: u64,
) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probe = random_hermitian(&mut rng, irrep.dim);
    let mut t = CMatrix::zeros(irrep.dim, irrep.dim);
    for g in 0..group.order() {
        let m = &irrep.matrices[g];
        t += m * &probe * m.adjoint();
    }
    t / cr(group.order() as f64)
}

pub fn max_homomorphism_residual(group: &FiniteSubgroup, irrep: &UnitaryIrrep) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..group.order() {
        for b in 0..group.order() {
            let lhs = &irrep.matrices[a] * &irrep.matrices[b];
            let res = max_abs(&(lhs - &irrep.matrices[group.mul(a, b)]));
            worst = worst.max(res);
        }
    }
    worst
}

pub fn max_unitarity_residual(irrep: &UnitaryIrrep) -> f64 {
    let d = irrep.dim;
    let id = CMatrix::identity(d, d);
    irrep
        .matrices
        .iter()
        .map(|m| max_abs(&(m * m.adjoint() - &id)))
        .fold(0.0, f64::max)
}

/// Character of the regular representation reconstructed from the irreps:
/// sum_i dim_i x_i(g); must be |G| at the identity and 0 elsewhere.
pub fn regular_character_residual(
    group: &FiniteSubgroup,
    classes: &ConjugacyClasses,
    irreps: &[UnitaryIrrep],
) -> f64 {
    let n = group.order();
    let mut worst: f64 = 0.0;
    for (k, _) in classes.classes.iter().enumerate() {
        let mut acc = c(0.0, 0.0);
        for r in irreps {
            acc += cr(r.dim as f64) * r.character[k];
        }
        let expect = if classes.representatives[k] == group.identity() {
            cr(n as f64)
        } else {
            c(0.0, 0.0)
        };
        worst = worst.max((acc - expect).norm());
    }
    worst
}
