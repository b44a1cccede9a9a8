//! The four spectral presets: generator tuples with prescribed spectra and
//! scalar sum, realized as affine equivariant matrix functions, plus the
//! classification of their irreducible *-representations.
//!
//! Each preset fixes a binary polyhedral group, the maximal-dimension irrep
//! V_c, an admissible root list per generator, and the sum target mu. The
//! synthesis solver looks for real coefficients over the self-adjoint affine
//! equivariant basis so that the sum and spectral constraints hold as
//! polynomial identities on the sphere.

use crate::equivariant::{
    centralizer_algebra, equivariant_basis, random_real_point, EquivariantPoly,
};
use crate::groups::{FiniteSubgroup, GroupKind};
use crate::irreps::{all_irreps, UnitaryIrrep};
use crate::linalg::{commutant_dimension, cr, hermitian_eigen, max_abs, CMatrix, C64, RMatrix};
use crate::sphere::{
    so3_image, special_orbits, RotationImage, SpecialOrbit, SpecialPointKind, Vec3,
};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SYNTH_TOL: f64 = 1e-10;
pub const MAX_RESTARTS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PresetName {
    D4,
    E6,
    E7,
    E8,
}

impl PresetName {
    pub fn all() -> [PresetName; 4] {
        [PresetName::D4, PresetName::E6, PresetName::E7, PresetName::E8]
    }

    pub fn name(&self) -> &'static str {
        match self {
            PresetName::D4 => "D4",
            PresetName::E6 => "E6",
            PresetName::E7 => "E7",
            PresetName::E8 => "E8",
        }
    }

    pub fn parse(s: &str) -> Option<PresetName> {
        match s.to_ascii_uppercase().as_str() {
            "D4" => Some(PresetName::D4),
            "E6" => Some(PresetName::E6),
            "E7" => Some(PresetName::E7),
            "E8" => Some(PresetName::E8),
            _ => None,
        }
    }
}

/// Spectral data of one preset. `spectra` lists the admissible roots of each
/// generator in the arm order (consecutive differences reproduce the quiver
/// arm weights).
#[derive(Debug, Clone)]
pub struct StarPreset {
    pub name: PresetName,
    pub group: GroupKind,
    pub spectra: Vec<Vec<i64>>,
    pub mu: i64,
}

impl StarPreset {
    pub fn generator_count(&self) -> usize {
        self.spectra.len()
    }

    /// Consecutive differences of the ordered roots, one list per generator.
    pub fn arm_weights(&self) -> Vec<Vec<i64>> {
        self.spectra
            .iter()
            .map(|roots| roots.windows(2).map(|w| w[0] - w[1]).collect())
            .collect()
    }

    /// Root sets with the ordering forgotten, ascending.
    pub fn root_sets(&self) -> Vec<Vec<i64>> {
        self.spectra
            .iter()
            .map(|roots| {
                let mut s = roots.clone();
                s.sort_unstable();
                s
            })
            .collect()
    }

    /// All scalar tuples (c_1..c_n) with c_i in the i-th root set and
    /// sum mu; these are the admissible one-dimensional representations.
    pub fn admissible_scalar_tuples(&self) -> Vec<Vec<i64>> {
        let sets = self.root_sets();
        let mut out: Vec<Vec<i64>> = vec![vec![]];
        for set in &sets {
            let mut next = Vec::new();
            for partial in &out {
                for &r in set {
                    let mut p = partial.clone();
                    p.push(r);
                    next.push(p);
                }
            }
            out = next;
        }
        out.retain(|t| t.iter().sum::<i64>() == self.mu);
        out
    }
}

pub fn preset(name: PresetName) -> StarPreset {
    match name {
        PresetName::D4 => StarPreset {
            name,
            group: GroupKind::BinaryDihedral(2),
            spectra: vec![vec![0, 1], vec![0, 1], vec![0, 1], vec![0, 1]],
            mu: 2,
        },
        PresetName::E6 => StarPreset {
            name,
            group: GroupKind::BinaryTetrahedral,
            spectra: vec![vec![0, 2, 1], vec![0, 2, 1], vec![0, 2, 1]],
            mu: 3,
        },
        PresetName::E7 => StarPreset {
            name,
            group: GroupKind::BinaryOctahedral,
            spectra: vec![vec![0, 3, 1, 2], vec![0, 3, 1, 2], vec![0, 2]],
            mu: 4,
        },
        PresetName::E8 => StarPreset {
            name,
            group: GroupKind::BinaryIcosahedral,
            spectra: vec![vec![0, 5, 1, 4, 2, 3], vec![0, 4, 2], vec![0, 3]],
            mu: 6,
        },
    }
}

/// Everything the synthesis and classification need about one group.
pub struct SynthesisContext {
    pub group: FiniteSubgroup,
    pub image: RotationImage,
    pub irreps: Vec<UnitaryIrrep>,
    pub orbits: Vec<SpecialOrbit>,
    /// Label of the maximal-dimension irrep.
    pub center: usize,
}

impl SynthesisContext {
    pub fn new(kind: GroupKind, irrep_seed: u64) -> Result<Self> {
        let group = FiniteSubgroup::build(kind)?;
        let image = so3_image(&group);
        let irreps = all_irreps(&group, irrep_seed)?;
        let orbits = special_orbits(&group, &image);
        let center = irreps
            .iter()
            .max_by_key(|r| r.dim)
            .expect("irreps nonempty")
            .label;
        Ok(SynthesisContext {
            group,
            image,
            irreps,
            orbits,
            center,
        })
    }

    pub fn center_irrep(&self) -> &UnitaryIrrep {
        &self.irreps[self.center]
    }

    pub fn orbit(&self, kind: SpecialPointKind) -> &SpecialOrbit {
        self.orbits
            .iter()
            .find(|o| o.kind == kind)
            .expect("orbit present")
    }
}

#[derive(Debug, Clone)]
pub struct SynthesisReport {
    pub seed: u64,
    pub restarts_used: usize,
    pub iterations: usize,
    pub residual: f64,
    pub degree: usize,
    pub escalated: bool,
}

/// A solved generator tuple over the center irrep.
pub struct GeneratorSystem {
    pub preset: StarPreset,
    pub generators: Vec<EquivariantPoly>,
    pub report: SynthesisReport,
}

/// P(g) = prod_j (g - alpha_j) in the polynomial algebra.
fn spectral_polynomial(g: &EquivariantPoly, roots: &[i64]) -> Result<EquivariantPoly> {
    let mut acc = EquivariantPoly::identity(g.irrep, g.dim);
    for &r in roots {
        acc = acc.multiply(&g.shift(-(r as f64)))?;
    }
    Ok(acc)
}

/// d/dt P(g + t B) at t = 0 via prefix/suffix products.
fn spectral_polynomial_derivative(
    g: &EquivariantPoly,
    roots: &[i64],
    b: &EquivariantPoly,
) -> Result<EquivariantPoly> {
    let k = roots.len();
    let mut prefixes = Vec::with_capacity(k + 1);
    prefixes.push(EquivariantPoly::identity(g.irrep, g.dim));
    for &r in roots {
        let last = prefixes.last().unwrap();
        prefixes.push(last.multiply(&g.shift(-(r as f64)))?);
    }
    let mut suffixes = vec![EquivariantPoly::identity(g.irrep, g.dim); k + 1];
    for j in (0..k).rev() {
        suffixes[j] = g.shift(-(roots[j] as f64)).multiply(&suffixes[j + 1])?;
    }
    let mut acc = EquivariantPoly::zero(g.irrep, g.dim, roots.len() * g.degree);
    for j in 0..k {
        let term = prefixes[j].multiply(b)?.multiply(&suffixes[j + 1])?;
        acc = acc.add(&term);
    }
    Ok(acc)
}

struct ResidualLayout {
    ngen: usize,
    nbasis: usize,
}

fn generators_from(
    theta: &[f64],
    basis: &[EquivariantPoly],
    layout: &ResidualLayout,
) -> Vec<EquivariantPoly> {
    (0..layout.ngen)
        .map(|i| {
            let mut acc = basis[0].scale(theta[i * layout.nbasis]);
            for (b, bp) in basis.iter().enumerate().skip(1) {
                acc = acc.add(&bp.scale(theta[i * layout.nbasis + b]));
            }
            acc
        })
        .collect()
}

fn stacked_residual(gens: &[EquivariantPoly], preset: &StarPreset) -> Result<Vec<f64>> {
    let dim = gens[0].dim;
    let mut sum = EquivariantPoly::zero(gens[0].irrep, dim, gens[0].degree);
    for g in gens {
        sum = sum.add(g);
    }
    let sum = sum.shift(-(preset.mu as f64));
    let mut out = sum.to_real_vec();
    for (i, g) in gens.iter().enumerate() {
        let p = spectral_polynomial(g, &preset.spectra[i])?;
        out.extend(p.to_real_vec());
    }
    Ok(out)
}

fn spectral_residual_len(g: &EquivariantPoly, roots: &[i64]) -> usize {
    let degree = g.degree * roots.len();
    2 * crate::equivariant::monomials(degree).len() * g.dim * g.dim
}

fn stacked_jacobian(
    gens: &[EquivariantPoly],
    basis: &[EquivariantPoly],
    preset: &StarPreset,
    layout: &ResidualLayout,
    nres: usize,
) -> Result<RMatrix> {
    let mut j = RMatrix::zeros(nres, layout.ngen * layout.nbasis);
    for i in 0..layout.ngen {
        for (b, bp) in basis.iter().enumerate() {
            let col = i * layout.nbasis + b;
            // sum block: derivative is the basis element itself
            let sum = EquivariantPoly::zero(gens[0].irrep, gens[0].dim, gens[0].degree).add(bp);
            let sum_vec = sum.to_real_vec();
            for (r, v) in sum_vec.iter().enumerate() {
                j[(r, col)] = *v;
            }
            // spectral blocks: only generator i depends on this column
            let mut offset = sum_vec.len();
            for (gi, g) in gens.iter().enumerate() {
                let p_len = spectral_residual_len(g, &preset.spectra[gi]);
                if gi == i {
                    let dp = spectral_polynomial_derivative(g, &preset.spectra[gi], bp)?;
                    let dv = dp.to_real_vec();
                    for (r, v) in dv.iter().enumerate() {
                        j[(offset + r, col)] = *v;
                    }
                }
                offset += p_len;
            }
        }
    }
    Ok(j)
}

fn max_abs_slice(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, &x| a.max(x.abs()))
}

/// Optional linear equations E theta = y appended to the residual; used to
/// pin block values at a marked point.
struct LinearPin {
    rows: RMatrix,
    target: nalgebra::DVector<f64>,
}

fn full_residual(
    theta: &[f64],
    basis: &[EquivariantPoly],
    preset: &StarPreset,
    layout: &ResidualLayout,
    pin: Option<&LinearPin>,
) -> Result<Vec<f64>> {
    let gens = generators_from(theta, basis, layout);
    let mut res = stacked_residual(&gens, preset)?;
    if let Some(p) = pin {
        let tv = nalgebra::DVector::from_column_slice(theta);
        let extra = &p.rows * tv - &p.target;
        res.extend(extra.iter().copied());
    }
    Ok(res)
}

/// Damped Gauss-Newton from one start; returns the final point, residual and
/// iteration count. The reported residual excludes the pinning rows.
fn refine(
    theta0: Vec<f64>,
    basis: &[EquivariantPoly],
    preset: &StarPreset,
    layout: &ResidualLayout,
    pin: Option<&LinearPin>,
) -> Result<(Vec<f64>, f64, usize)> {
    let mut theta = theta0;
    let mut lambda = 1e-3;
    let mut res = full_residual(&theta, basis, preset, layout, pin)?;
    let mut best = max_abs_slice(&res);
    let nbase = {
        let gens = generators_from(&theta, basis, layout);
        stacked_residual(&gens, preset)?.len()
    };
    let mut iters = 0;
    for _ in 0..120 {
        if best <= SYNTH_TOL {
            break;
        }
        iters += 1;
        let gens = generators_from(&theta, basis, layout);
        let base_jac = stacked_jacobian(&gens, basis, preset, layout, nbase)?;
        let extra_rows = pin.map_or(0, |p| p.rows.nrows());
        let mut jac = RMatrix::zeros(nbase + extra_rows, theta.len());
        jac.view_mut((0, 0), (nbase, theta.len())).copy_from(&base_jac);
        if let Some(p) = pin {
            jac.view_mut((nbase, 0), (extra_rows, theta.len()))
                .copy_from(&p.rows);
        }
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let rv = nalgebra::DVector::from_vec(res.clone());
        let jtr = &jt * &rv;
        let mut improved = false;
        for _ in 0..10 {
            let mut lhs = jtj.clone();
            for k in 0..lhs.nrows() {
                lhs[(k, k)] += lambda;
            }
            let delta = match lhs.lu().solve(&jtr) {
                Some(d) => d,
                None => break,
            };
            let cand: Vec<f64> = theta.iter().zip(delta.iter()).map(|(t, d)| t - d).collect();
            let cres = full_residual(&cand, basis, preset, layout, pin)?;
            let cmax = max_abs_slice(&cres);
            if cmax < best {
                theta = cand;
                res = cres;
                best = cmax;
                lambda = (lambda * 0.35).max(1e-14);
                improved = true;
                break;
            }
            lambda *= 8.0;
        }
        if !improved {
            break;
        }
    }
    let gens = generators_from(&theta, basis, layout);
    let pure = max_abs_slice(&stacked_residual(&gens, preset)?);
    Ok((theta, pure, iters))
}

/// Rejects the constant and decomposable branches of the constraint variety:
/// a valid tuple must be irreducible at a generic point.
fn generically_irreducible(gens: &[EquivariantPoly]) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..3 {
        let p = random_real_point(&mut rng);
        let mats: Vec<CMatrix> = gens.iter().map(|g| g.evaluate_real(&p)).collect();
        if commutant_dimension(&mats, 1e-6) == 1 {
            return true;
        }
    }
    false
}

/// Rejects solution branches that only generate a proper subalgebra: every
/// admissible scalar tuple is a one-dimensional representation and must show
/// up exactly once among the one-dimensional special-point blocks.
fn scalar_blocks_complete(
    ctx: &SynthesisContext,
    preset: &StarPreset,
    gens: &[EquivariantPoly],
) -> bool {
    let vc = ctx.center_irrep();
    let mut found: Vec<Vec<i64>> = Vec::new();
    for orbit in &ctx.orbits {
        let p = orbit.representative;
        let mats: Vec<CMatrix> = gens.iter().map(|g| g.evaluate_real(&p)).collect();
        let bs = centralizer_algebra(&ctx.group, &ctx.image, vc, &p);
        for k in 0..bs.sizes.len() {
            if bs.sizes[k] != 1 {
                continue;
            }
            let mut tuple = Vec::with_capacity(gens.len());
            let mut clean = true;
            for m in &mats {
                let v = bs.block(m, k)[(0, 0)];
                if v.im.abs() > 1e-6 || (v.re - v.re.round()).abs() > 1e-6 {
                    clean = false;
                    break;
                }
                tuple.push(v.re.round() as i64);
            }
            if !clean || found.contains(&tuple) {
                return false;
            }
            found.push(tuple);
        }
    }
    let admissible = preset.admissible_scalar_tuples();
    found.len() == admissible.len() && found.iter().all(|t| admissible.contains(t))
}

/// One-dimensional block positions across all special orbits, with the
/// aligned diagonal value of each basis element there. For the four presets
/// the number of such slots equals the number of admissible scalar tuples.
struct ScalarSlots {
    /// diag[b][s]: value of basis element b at slot s.
    diag: Vec<Vec<crate::linalg::C64>>,
    count: usize,
}

fn scalar_slots(ctx: &SynthesisContext, basis: &[EquivariantPoly]) -> ScalarSlots {
    let vc = ctx.center_irrep();
    let mut positions: Vec<(crate::sphere::Vec3, BlockStructureAtPoint)> = Vec::new();
    struct BlockStructureAtPoint {
        bs: crate::equivariant::BlockStructure,
        slots: Vec<usize>,
    }
    for orbit in &ctx.orbits {
        let bs = centralizer_algebra(&ctx.group, &ctx.image, vc, &orbit.representative);
        let offsets = bs.offsets();
        let slots: Vec<usize> = (0..bs.sizes.len())
            .filter(|&k| bs.sizes[k] == 1)
            .map(|k| offsets[k])
            .collect();
        positions.push((orbit.representative, BlockStructureAtPoint { bs, slots }));
    }
    let count = positions.iter().map(|(_, b)| b.slots.len()).sum();
    let diag = basis
        .iter()
        .map(|b| {
            let mut vals = Vec::with_capacity(count);
            for (pt, info) in &positions {
                let a = info.bs.to_aligned(&b.evaluate_real(pt));
                for &p in &info.slots {
                    vals.push(a[(p, p)]);
                }
            }
            vals
        })
        .collect();
    ScalarSlots { diag, count }
}

/// Linear equations pinning every one-dimensional special block to one
/// permutation of the admissible scalar tuples.
fn scalar_pin(
    slots: &ScalarSlots,
    layout: &ResidualLayout,
    tuples: &[Vec<i64>],
    plan: &[usize],
) -> LinearPin {
    let nrows = 2 * slots.count * layout.ngen;
    let mut rows = RMatrix::zeros(nrows, layout.ngen * layout.nbasis);
    let mut target = nalgebra::DVector::zeros(nrows);
    let mut r = 0;
    for si in 0..slots.count {
        let tuple = &tuples[plan[si]];
        for i in 0..layout.ngen {
            for b in 0..layout.nbasis {
                rows[(r, i * layout.nbasis + b)] = slots.diag[b][si].re;
                rows[(r + 1, i * layout.nbasis + b)] = slots.diag[b][si].im;
            }
            target[r] = tuple[i] as f64;
            target[r + 1] = 0.0;
            r += 2;
        }
    }
    LinearPin { rows, target }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    fn heap(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, cur, out);
            if k % 2 == 0 {
                cur.swap(i, k - 1);
            } else {
                cur.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut cur, &mut out);
    out
}

/// Multi-start synthesis of the generator tuple at affine degree, escalating
/// to degree 2 if the whole budget fails (and the degree cap allows it).
///
/// The constant solutions of the constraints have large attraction basins,
/// so the solver pins every one-dimensional special block to a permutation
/// of the admissible scalar tuples. Each permutation is screened by linear
/// least squares (the pin equations are linear in the coefficients) and only
/// feasible ones are polished by damped Gauss-Newton on the full system.
/// Deterministic for a fixed seed: permutations are tried in a seed-shuffled
/// order and the first solution passing the gates wins.
pub fn synthesize(
    ctx: &SynthesisContext,
    preset: &StarPreset,
    seed: u64,
) -> Result<GeneratorSystem> {
    let vc = ctx.center_irrep();
    let mut best_overall = f64::INFINITY;
    let max_roots = preset.spectra.iter().map(|s| s.len()).max().unwrap();
    let tuples = preset.admissible_scalar_tuples();
    let mut newton_runs = 0;
    for (degree, escalated) in [(1usize, false), (2, true)] {
        if degree * max_roots > crate::equivariant::DEGREE_CAP {
            break;
        }
        let basis = equivariant_basis(&ctx.group, &ctx.image, vc, degree);
        let layout = ResidualLayout {
            ngen: preset.generator_count(),
            nbasis: basis.len(),
        };
        let slots = scalar_slots(ctx, &basis);
        if slots.count != tuples.len() {
            return Err(Error::InvalidArgument(format!(
                "{} scalar slots vs {} admissible tuples",
                slots.count,
                tuples.len()
            )));
        }
        let mut plans = permutations(tuples.len());
        let mut shuffle_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
        for k in (1..plans.len()).rev() {
            let j = shuffle_rng.gen_range(0..=k);
            plans.swap(k, j);
        }
        for (plan_idx, plan) in plans.iter().enumerate() {
            let pin = scalar_pin(&slots, &layout, &tuples, plan);
            // linear feasibility screen; also yields the starting point
            let svd = pin.rows.clone().svd(true, true);
            let theta_p = svd.solve(&pin.target, 1e-10).expect("svd solve");
            let lin_resid = (&pin.rows * &theta_p - &pin.target).amax();
            if lin_resid > 1e-7 {
                continue;
            }
            let null = crate::linalg::nullspace(
                &pin.rows.map(|v| crate::linalg::cr(v)),
                1e-8,
            );
            let tries = if null.ncols() == 0 { 1 } else { 3 };
            for t in 0..tries {
                newton_runs += 1;
                if newton_runs > 4 * MAX_RESTARTS {
                    break;
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream((plan_idx as u64) << 8 | t as u64);
                let mut theta0: Vec<f64> = theta_p.iter().copied().collect();
                if t > 0 {
                    let scale = [4.0, 16.0][t - 1];
                    for c in 0..null.ncols() {
                        let w = (rng.gen::<f64>() * 2.0 - 1.0) * scale;
                        for (k, th) in theta0.iter_mut().enumerate() {
                            *th += w * null[(k, c)].re;
                        }
                    }
                } else if null.ncols() > 0 {
                    // still leave the least-squares point once unperturbed
                    // plus a mild deterministic kick to break symmetry
                    for c in 0..null.ncols() {
                        let w = rng.gen::<f64>() * 2.0 - 1.0;
                        for (k, th) in theta0.iter_mut().enumerate() {
                            *th += w * null[(k, c)].re;
                        }
                    }
                }
                let (theta, resid, iterations) =
                    refine(theta0, &basis, preset, &layout, Some(&pin))?;
                best_overall = best_overall.min(resid);
                if resid <= SYNTH_TOL {
                    let generators = generators_from(&theta, &basis, &layout);
                    if !generically_irreducible(&generators)
                        || !scalar_blocks_complete(ctx, preset, &generators)
                    {
                        continue;
                    }
                    return Ok(GeneratorSystem {
                        preset: preset.clone(),
                        generators,
                        report: SynthesisReport {
                            seed,
                            restarts_used: newton_runs,
                            iterations,
                            residual: resid,
                            degree,
                            escalated,
                        },
                    });
                }
            }
        }
    }
    Err(Error::SynthesisFailed {
        restarts: newton_runs,
        best: best_overall,
    })
}

/// A Hermitian tuple evaluated at a point of the real sphere.
#[derive(Debug, Clone)]
pub struct StarRepresentation {
    pub matrices: Vec<CMatrix>,
    pub point: Vec3,
    /// None for the full tuple; Some((orbit, k)) for the k-th block cut out
    /// at a special point.
    pub block_tag: Option<(SpecialPointKind, usize)>,
}

impl StarRepresentation {
    pub fn dim(&self) -> usize {
        self.matrices[0].nrows()
    }
}

/// Largest distance from any eigenvalue of `m` to the admissible roots.
pub fn spectrum_distance(m: &CMatrix, roots: &[i64]) -> f64 {
    let (vals, _) = hermitian_eigen(m);
    vals.iter()
        .map(|&v| {
            roots
                .iter()
                .map(|&r| (v - r as f64).abs())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Evaluates the generator tuple at a real point and validates the spectra
/// and the sum constraint.
pub fn rep_at(system: &GeneratorSystem, point: &Vec3) -> Result<StarRepresentation> {
    let matrices: Vec<CMatrix> = system
        .generators
        .iter()
        .map(|g| {
            let m = g.evaluate_real(point);
            (&m + m.adjoint()) * cr(0.5)
        })
        .collect();
    let roots = system.preset.root_sets();
    for (i, m) in matrices.iter().enumerate() {
        let dist = spectrum_distance(m, &roots[i]);
        if dist > 1e-6 {
            let (vals, _) = hermitian_eigen(m);
            let worst = vals
                .iter()
                .copied()
                .max_by(|a, b| {
                    let da = roots[i]
                        .iter()
                        .map(|&r| (a - r as f64).abs())
                        .fold(f64::INFINITY, f64::min);
                    let db = roots[i]
                        .iter()
                        .map(|&r| (b - r as f64).abs())
                        .fold(f64::INFINITY, f64::min);
                    da.total_cmp(&db)
                })
                .unwrap();
            return Err(Error::SpectrumViolation {
                generator: i,
                value: worst,
                distance: dist,
            });
        }
    }
    let dim = matrices[0].nrows();
    let mut sum = CMatrix::zeros(dim, dim);
    for m in &matrices {
        sum += m;
    }
    sum -= CMatrix::identity(dim, dim) * cr(system.preset.mu as f64);
    if max_abs(&sum) > 1e-7 {
        return Err(Error::SpectrumViolation {
            generator: usize::MAX,
            value: system.preset.mu as f64,
            distance: max_abs(&sum),
        });
    }
    Ok(StarRepresentation {
        matrices,
        point: *point,
        block_tag: None,
    })
}

/// Commutant dimension of a Hermitian tuple (1 means irreducible).
pub fn irreducibility_check(matrices: &[CMatrix]) -> usize {
    commutant_dimension(matrices, 1e-6)
}

/// Traces of all words of length 1..=max_len in the tuple, flattened in a
/// fixed order.
pub fn word_traces(matrices: &[CMatrix], max_len: usize) -> Vec<C64> {
    let n = matrices.len();
    let dim = matrices[0].nrows();
    let mut out = Vec::new();
    let mut layer: Vec<CMatrix> = vec![CMatrix::identity(dim, dim)];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * n);
        for w in &layer {
            for m in matrices.iter() {
                next.push(w * m);
            }
        }
        for w in &next {
            out.push(w.trace());
        }
        layer = next;
    }
    out
}

pub fn traces_close(a: &[C64], b: &[C64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
}

/// Number of words of length <= max_len over an n-letter alphabet.
fn word_count(n: usize, max_len: usize) -> usize {
    let mut total = 0;
    let mut pow = 1;
    for _ in 0..max_len {
        pow *= n;
        total += pow;
    }
    total
}

/// One entry of the classification catalog.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub dim: usize,
    pub orbit: SpecialPointKind,
    pub block_index: usize,
    /// Generator scalars for one-dimensional entries.
    pub scalars: Option<Vec<f64>>,
    pub traces: Vec<C64>,
}

/// Classification of the irreducible *-representations: the finitely many
/// special-point blocks plus the generic family.
#[derive(Debug, Clone)]
pub struct Catalog {
    pub generic_dim: usize,
    /// Real dimension of the generic parameter space (the orbit space of the
    /// sphere minus the special orbits).
    pub generic_parameters: usize,
    pub entries: Vec<CatalogEntry>,
}

impl Catalog {
    pub fn count(&self, dim: usize, orbit: Option<SpecialPointKind>) -> usize {
        self.entries
            .iter()
            .filter(|e| e.dim == dim && orbit.map_or(true, |k| e.orbit == k))
            .count()
    }
}

/// Builds the catalog: per special orbit, the blocks of the evaluated tuple
/// in the centralizer's aligned basis, deduplicated by word traces (length 3,
/// escalating to length 4 on collision).
pub fn classify(ctx: &SynthesisContext, system: &GeneratorSystem) -> Result<Catalog> {
    let vc = ctx.center_irrep();
    let n = system.preset.generator_count();
    let short = word_count(n, 3);
    let mut entries: Vec<CatalogEntry> = Vec::new();
    for orbit in &ctx.orbits {
        let p = orbit.representative;
        let rep = rep_at(system, &p)?;
        let bs = centralizer_algebra(&ctx.group, &ctx.image, vc, &p);
        for m in &rep.matrices {
            let mass = bs.off_block_mass(m);
            if mass > 1e-7 {
                return Err(Error::BlockLeakage(mass));
            }
        }
        for k in 0..bs.sizes.len() {
            let blocks: Vec<CMatrix> = rep.matrices.iter().map(|m| bs.block(m, k)).collect();
            let traces = word_traces(&blocks, 4);
            let dim = bs.sizes[k];
            let scalars = if dim == 1 {
                Some(blocks.iter().map(|b| b[(0, 0)].re).collect())
            } else {
                None
            };
            let dup = entries.iter().any(|e| {
                e.dim == dim
                    && traces_close(&e.traces[..short], &traces[..short], 1e-6)
                    && traces_close(&e.traces, &traces, 1e-6)
            });
            if !dup {
                entries.push(CatalogEntry {
                    dim,
                    orbit: orbit.kind,
                    block_index: k,
                    scalars,
                    traces,
                });
            }
        }
    }
    entries.sort_by(|a, b| {
        a.dim
            .cmp(&b.dim)
            .then(a.orbit.cmp(&b.orbit))
            .then(a.block_index.cmp(&b.block_index))
    });
    Ok(Catalog {
        generic_dim: vc.dim,
        generic_parameters: 2,
        entries,
    })
}

/// Named residuals of every invariant of a solved system.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub residuals: Vec<(String, f64)>,
}

impl VerifyReport {
    pub fn max(&self) -> f64 {
        self.residuals.iter().map(|(_, v)| *v).fold(0.0, f64::max)
    }

    pub fn pass(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

/// Recomputes every invariant of a generator system: coefficientwise sum and
/// spectral identities, self-adjointness, equivariance, and per-point
/// spectrum distances.
pub fn verify(
    ctx: &SynthesisContext,
    system: &GeneratorSystem,
    sample_seed: u64,
) -> Result<VerifyReport> {
    let mut residuals = Vec::new();
    let preset = &system.preset;
    let gens = &system.generators;
    let dim = gens[0].dim;

    let mut sum = EquivariantPoly::zero(gens[0].irrep, dim, gens[0].degree);
    for g in gens {
        sum = sum.add(g);
    }
    let sum = sum.shift(-(preset.mu as f64));
    residuals.push(("sum-coefficientwise".to_string(), sum.max_coeff()));

    for (i, g) in gens.iter().enumerate() {
        let p = spectral_polynomial(g, &preset.spectra[i])?;
        residuals.push((format!("spectral-identity-{i}"), p.max_coeff()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(sample_seed);
    let cpts: Vec<[C64; 3]> = (0..3)
        .map(|_| crate::equivariant::random_complex_point(&mut rng))
        .collect();
    let vc = ctx.center_irrep();
    let mut equiv: f64 = 0.0;
    for g in gens {
        equiv = equiv.max(crate::equivariant::equivariance_residual(
            &ctx.group, &ctx.image, vc, g, &cpts,
        ));
    }
    residuals.push(("equivariance".to_string(), equiv));

    let mut herm: f64 = 0.0;
    let mut spect: f64 = 0.0;
    let mut sum_eval: f64 = 0.0;
    let roots = preset.root_sets();
    for _ in 0..10 {
        let p = random_real_point(&mut rng);
        let mut total = CMatrix::zeros(dim, dim);
        for (i, g) in gens.iter().enumerate() {
            let m = g.evaluate_real(&p);
            herm = herm.max(max_abs(&(m.adjoint() - &m)));
            spect = spect.max(spectrum_distance(
                &((&m + m.adjoint()) * cr(0.5)),
                &roots[i],
            ));
            total += m;
        }
        total -= CMatrix::identity(dim, dim) * cr(preset.mu as f64);
        sum_eval = sum_eval.max(max_abs(&total));
    }
    residuals.push(("self-adjointness".to_string(), herm));
    residuals.push(("spectrum-distance".to_string(), spect));
    residuals.push(("sum-at-points".to_string(), sum_eval));

    // equivariance forces the tuple to commute with the stabilizer at
    // special points; evaluate directly so a broken system still reports
    let mut stab_comm: f64 = 0.0;
    for orbit in &ctx.orbits {
        for g in gens {
            let m = g.evaluate_real(&orbit.representative);
            for &s in &orbit.stabilizer_preimage {
                let rho = &vc.matrices[s];
                stab_comm = stab_comm.max(max_abs(&(rho * &m - &m * rho)));
            }
        }
    }
    residuals.push(("stabilizer-commutation".to_string(), stab_comm));

    Ok(VerifyReport { residuals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mckay::{arm_weights, mckay_graph};

    fn system_for(name: PresetName, seed: u64) -> (SynthesisContext, GeneratorSystem) {
        let p = preset(name);
        let ctx = SynthesisContext::new(p.group, 17).unwrap();
        let sys = synthesize(&ctx, &p, seed).unwrap();
        (ctx, sys)
    }

    #[test]
    fn preset_data() {
        let d4 = preset(PresetName::D4);
        assert_eq!(d4.generator_count(), 4);
        assert_eq!(d4.root_sets(), vec![vec![0, 1]; 4]);
        assert_eq!(d4.mu, 2);

        let e7 = preset(PresetName::E7);
        assert_eq!(
            e7.root_sets(),
            vec![vec![0, 1, 2, 3], vec![0, 1, 2, 3], vec![0, 2]]
        );
        assert_eq!(e7.mu, 4);

        let e8 = preset(PresetName::E8);
        assert_eq!(
            e8.spectra,
            vec![vec![0, 5, 1, 4, 2, 3], vec![0, 4, 2], vec![0, 3]]
        );
        assert_eq!(
            e8.arm_weights(),
            vec![vec![-5, 4, -3, 2, -1], vec![-4, 2], vec![-3]]
        );
    }

    #[test]
    fn orderings_reproduce_quiver_arm_weights() {
        // the consecutive differences of the ordered roots must equal the
        // McKay weights along the arms, up to the center's sign
        for name in PresetName::all() {
            let p = preset(name);
            let group = FiniteSubgroup::build(p.group).unwrap();
            let irreps = all_irreps(&group, 17).unwrap();
            let graph = mckay_graph(&group, &irreps).unwrap();
            let sigma_c = graph.lambda[graph.center_vertex()].signum();
            let mut expected: Vec<Vec<i64>> = arm_weights(&graph)
                .into_iter()
                .map(|arm| arm.into_iter().map(|l| sigma_c * l).collect())
                .collect();
            let mut got = p.arm_weights();
            expected.sort();
            got.sort();
            assert_eq!(got, expected, "{name:?}");
        }
    }

    #[test]
    fn e8_scalar_tuple_enumeration() {
        let e8 = preset(PresetName::E8);
        let tuples = e8.admissible_scalar_tuples();
        assert_eq!(tuples.len(), 4);
        assert!(tuples.contains(&vec![4, 2, 0]));
        assert!(tuples.contains(&vec![2, 4, 0]));
        assert!(tuples.contains(&vec![3, 0, 3]));
        assert!(tuples.contains(&vec![1, 2, 3]));
    }

    #[test]
    fn d4_synthesis_gives_rank_one_projections() {
        let (_, sys) = system_for(PresetName::D4, 7);
        assert!(sys.report.residual <= 1e-8);
        assert!(!sys.report.escalated);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = random_real_point(&mut rng);
        let rep = rep_at(&sys, &p).unwrap();
        let mut sum = CMatrix::zeros(2, 2);
        for m in &rep.matrices {
            let (vals, _) = hermitian_eigen(m);
            // rank-1 projection: eigenvalues {0, 1}
            assert!((vals[0]).abs() <= 1e-7 && (vals[1] - 1.0).abs() <= 1e-7);
            sum += m;
        }
        assert!(max_abs(&(sum - CMatrix::identity(2, 2) * cr(2.0))) <= 1e-7);
        assert_eq!(irreducibility_check(&rep.matrices), 1);
    }

    #[test]
    fn same_orbit_points_are_equivalent() {
        let (ctx, sys) = system_for(PresetName::D4, 7);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = random_real_point(&mut rng);
        let r = 3 % ctx.image.order();
        let q = ctx.image.apply(r, &p);
        let rep_p = rep_at(&sys, &p).unwrap();
        let rep_q = rep_at(&sys, &q).unwrap();
        let t_p = word_traces(&rep_p.matrices, 2);
        let t_q = word_traces(&rep_q.matrices, 2);
        assert!(traces_close(&t_p, &t_q, 1e-8));
    }

    #[test]
    fn commutant_dimensions() {
        // scalar tuple on C^2: commutant is all of M_2
        let scalars = vec![
            CMatrix::identity(2, 2) * cr(1.0),
            CMatrix::identity(2, 2) * cr(0.0),
        ];
        assert_eq!(irreducibility_check(&scalars), 4);
        // direct sum of two inequivalent one-dimensional tuples
        let mut a = CMatrix::zeros(2, 2);
        a[(0, 0)] = cr(1.0);
        let mut b = CMatrix::zeros(2, 2);
        b[(1, 1)] = cr(1.0);
        assert_eq!(irreducibility_check(&[a, b]), 2);
    }

    #[test]
    fn d4_catalog() {
        let (ctx, sys) = system_for(PresetName::D4, 7);
        let catalog = classify(&ctx, &sys).unwrap();
        assert_eq!(catalog.generic_dim, 2);
        assert_eq!(catalog.generic_parameters, 2);
        // every entry at a special orbit is one-dimensional, and together
        // they realize all admissible scalar tuples
        assert!(catalog.entries.iter().all(|e| e.dim == 1));
        let admissible = sys.preset.admissible_scalar_tuples();
        assert_eq!(catalog.entries.len(), admissible.len());
        for e in &catalog.entries {
            let s: Vec<i64> = e
                .scalars
                .as_ref()
                .unwrap()
                .iter()
                .map(|v| v.round() as i64)
                .collect();
            assert!(admissible.contains(&s), "tuple {s:?} not admissible");
            let rounded_err: f64 = e
                .scalars
                .as_ref()
                .unwrap()
                .iter()
                .map(|v| (v - v.round()).abs())
                .fold(0.0, f64::max);
            assert!(rounded_err <= 1e-7);
        }
    }

    #[test]
    fn verify_flags_perturbations() {
        let (ctx, mut sys) = system_for(PresetName::D4, 7);
        let report = verify(&ctx, &sys, 3).unwrap();
        assert!(report.pass(1e-8), "clean system: {:?}", report.residuals);
        sys.generators[0].terms[1][(0, 0)] += cr(1e-3);
        let report = verify(&ctx, &sys, 3).unwrap();
        assert!(
            report.max() >= 1e-4,
            "perturbation missed: {:?}",
            report.residuals
        );
    }

    #[test]
    fn gauge_covariance_of_the_catalog() {
        let p = preset(PresetName::D4);
        let mut ctx = SynthesisContext::new(p.group, 17).unwrap();
        let sys = synthesize(&ctx, &p, 7).unwrap();
        let cat = classify(&ctx, &sys).unwrap();

        // conjugate the center irrep by a fixed unitary and redo everything
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let h = crate::linalg::random_hermitian(&mut rng, 2);
        let w = crate::linalg::skew_exp(&(h * C64::new(0.0, 1.0)));
        let c = ctx.center;
        for m in ctx.irreps[c].matrices.iter_mut() {
            *m = &w * m.clone() * w.adjoint();
        }
        let sys2 = synthesize(&ctx, &p, 7).unwrap();
        let cat2 = classify(&ctx, &sys2).unwrap();

        assert_eq!(cat.entries.len(), cat2.entries.len());
        for e in &cat.entries {
            let hit = cat2
                .entries
                .iter()
                .any(|f| f.dim == e.dim && traces_close(&f.traces, &e.traces, 1e-6));
            assert!(hit, "fingerprint not reproduced after gauge change");
        }
    }
}
