//! Polynomial matrix maps on the complex sphere that are equivariant under
//! the rotation image of a binary polyhedral group.
//!
//! Polynomials live over the reduced monomial basis x^a y^b z^c with
//! a in {0, 1}: the sphere relation eliminates x^2 via x^2 = 1 - y^2 - z^2.
//! Basis synthesis is Reynolds averaging of monomial-times-Hermitian seeds
//! followed by deterministic rank reduction (pivoted QR), which produces a
//! real-linear basis of the self-adjoint equivariant maps.

use crate::groups::FiniteSubgroup;
use crate::irreps::UnitaryIrrep;
use crate::linalg::{
    cr, hermitian_basis, max_abs, normal_eigen, real_column_basis, CMatrix, C64, RMatrix,
};
use crate::sphere::{stabilizer, Rot3, RotationImage, Vec3};
use crate::{Error, Result};

/// Hard cap on polynomial degree; products beyond it are refused.
pub const DEGREE_CAP: usize = 6;

/// Reduced monomial x^a y^b z^c with a <= 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mono {
    pub x: u8,
    pub y: u8,
    pub z: u8,
}

impl Mono {
    pub fn degree(&self) -> usize {
        (self.x + self.y + self.z) as usize
    }
}

/// Deterministic list of reduced monomials of degree <= d: ordered by total
/// degree, then x, then y.
pub fn monomials(d: usize) -> Vec<Mono> {
    let mut out = Vec::new();
    for total in 0..=d as u8 {
        for x in 0..=1u8.min(total) {
            for y in 0..=(total - x) {
                let z = total - x - y;
                out.push(Mono { x, y, z });
            }
        }
    }
    out
}

fn mono_index(list: &[Mono], m: Mono) -> usize {
    list.iter().position(|&q| q == m).expect("monomial in range")
}

/// Scalar polynomial over the reduced monomials, used for compositions with
/// rotations and for invariant counting.
#[derive(Debug, Clone)]
pub struct ScalarPoly {
    pub degree: usize,
    pub coeffs: Vec<C64>,
}

impl ScalarPoly {
    pub fn zero(degree: usize) -> Self {
        ScalarPoly {
            degree,
            coeffs: vec![C64::new(0.0, 0.0); monomials(degree).len()],
        }
    }

    pub fn one(degree: usize) -> Self {
        let mut p = Self::zero(degree);
        p.coeffs[0] = cr(1.0);
        p
    }
}

/// Distributes the product of two reduced monomials back onto reduced
/// monomials, applying x^2 = 1 - y^2 - z^2 when needed.
fn mono_product(a: Mono, b: Mono) -> Vec<(Mono, f64)> {
    let x = a.x + b.x;
    let y = a.y + b.y;
    let z = a.z + b.z;
    if x < 2 {
        vec![(Mono { x, y, z }, 1.0)]
    } else {
        vec![
            (Mono { x: 0, y, z }, 1.0),
            (Mono { x: 0, y: y + 2, z }, -1.0),
            (Mono { x: 0, y, z: z + 2 }, -1.0),
        ]
    }
}

fn scalar_mul(a: &ScalarPoly, b: &ScalarPoly, out_degree: usize) -> ScalarPoly {
    let la = monomials(a.degree);
    let lb = monomials(b.degree);
    let lo = monomials(out_degree);
    let mut out = ScalarPoly::zero(out_degree);
    for (ia, ma) in la.iter().enumerate() {
        if a.coeffs[ia].norm() == 0.0 {
            continue;
        }
        for (ib, mb) in lb.iter().enumerate() {
            if b.coeffs[ib].norm() == 0.0 {
                continue;
            }
            for (m, w) in mono_product(*ma, *mb) {
                out.coeffs[mono_index(&lo, m)] += a.coeffs[ia] * b.coeffs[ib] * cr(w);
            }
        }
    }
    out
}

/// The monomial m composed with a rotation, as a polynomial of the same
/// degree: m(R x) expanded over reduced monomials.
fn compose_mono(m: Mono, r: &Rot3, degree: usize) -> ScalarPoly {
    let mut acc = ScalarPoly::one(degree);
    let linear = |row: usize| -> ScalarPoly {
        let mut p = ScalarPoly::zero(degree);
        let list = monomials(degree);
        p.coeffs[mono_index(&list, Mono { x: 1, y: 0, z: 0 })] = cr(r[(row, 0)]);
        p.coeffs[mono_index(&list, Mono { x: 0, y: 1, z: 0 })] = cr(r[(row, 1)]);
        p.coeffs[mono_index(&list, Mono { x: 0, y: 0, z: 1 })] = cr(r[(row, 2)]);
        p
    };
    for _ in 0..m.x {
        acc = scalar_mul(&acc, &linear(0), degree);
    }
    for _ in 0..m.y {
        acc = scalar_mul(&acc, &linear(1), degree);
    }
    for _ in 0..m.z {
        acc = scalar_mul(&acc, &linear(2), degree);
    }
    acc
}

/// A polynomial map from the complex sphere into d x d matrices, stored as
/// one coefficient matrix per reduced monomial.
#[derive(Debug, Clone)]
pub struct EquivariantPoly {
    /// Label of the irrep the map is equivariant for; None for plain scalars.
    pub irrep: Option<usize>,
    pub dim: usize,
    pub degree: usize,
    pub terms: Vec<CMatrix>,
}

impl EquivariantPoly {
    pub fn zero(irrep: Option<usize>, dim: usize, degree: usize) -> Self {
        EquivariantPoly {
            irrep,
            dim,
            degree,
            terms: (0..monomials(degree).len())
                .map(|_| CMatrix::zeros(dim, dim))
                .collect(),
        }
    }

    pub fn constant(irrep: Option<usize>, m: CMatrix, degree: usize) -> Self {
        let dim = m.nrows();
        let mut p = Self::zero(irrep, dim, degree);
        p.terms[0] = m;
        p
    }

    pub fn identity(irrep: Option<usize>, dim: usize) -> Self {
        Self::constant(irrep, CMatrix::identity(dim, dim), 0)
    }

    /// Polynomial evaluation at a point of the complex sphere.
    pub fn evaluate(&self, point: &[C64; 3]) -> CMatrix {
        let list = monomials(self.degree);
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for (k, m) in list.iter().enumerate() {
            let mut w = cr(1.0);
            for _ in 0..m.x {
                w *= point[0];
            }
            for _ in 0..m.y {
                w *= point[1];
            }
            for _ in 0..m.z {
                w *= point[2];
            }
            out += &self.terms[k] * w;
        }
        out
    }

    pub fn evaluate_real(&self, p: &Vec3) -> CMatrix {
        self.evaluate(&[cr(p.x), cr(p.y), cr(p.z)])
    }

    /// Pointwise product, re-reduced modulo the sphere relation.
    pub fn multiply(&self, other: &EquivariantPoly) -> Result<EquivariantPoly> {
        let degree = self.degree + other.degree;
        if degree > DEGREE_CAP {
            return Err(Error::DegreeOverflow(degree, DEGREE_CAP));
        }
        let la = monomials(self.degree);
        let lb = monomials(other.degree);
        let lo = monomials(degree);
        let mut out = EquivariantPoly::zero(self.irrep, self.dim, degree);
        for (ia, ma) in la.iter().enumerate() {
            if max_abs(&self.terms[ia]) == 0.0 {
                continue;
            }
            for (ib, mb) in lb.iter().enumerate() {
                if max_abs(&other.terms[ib]) == 0.0 {
                    continue;
                }
                let prod = &self.terms[ia] * &other.terms[ib];
                for (m, w) in mono_product(*ma, *mb) {
                    let idx = mono_index(&lo, m);
                    out.terms[idx] = &out.terms[idx] + &prod * cr(w);
                }
            }
        }
        Ok(out)
    }

    /// The involution f*(x) = f(conj x)^dagger: adjoint of every coefficient.
    pub fn star(&self) -> EquivariantPoly {
        EquivariantPoly {
            irrep: self.irrep,
            dim: self.dim,
            degree: self.degree,
            terms: self.terms.iter().map(|t| t.adjoint()).collect(),
        }
    }

    pub fn add(&self, other: &EquivariantPoly) -> EquivariantPoly {
        let degree = self.degree.max(other.degree);
        let mut out = EquivariantPoly::zero(self.irrep, self.dim, degree);
        let lo = monomials(degree);
        for (k, m) in monomials(self.degree).iter().enumerate() {
            let idx = mono_index(&lo, *m);
            out.terms[idx] = &out.terms[idx] + &self.terms[k];
        }
        for (k, m) in monomials(other.degree).iter().enumerate() {
            let idx = mono_index(&lo, *m);
            out.terms[idx] = &out.terms[idx] + &other.terms[k];
        }
        out
    }

    pub fn scale(&self, w: f64) -> EquivariantPoly {
        EquivariantPoly {
            irrep: self.irrep,
            dim: self.dim,
            degree: self.degree,
            terms: self.terms.iter().map(|t| t * cr(w)).collect(),
        }
    }

    /// Adds w * identity to the constant term.
    pub fn shift(&self, w: f64) -> EquivariantPoly {
        let mut out = self.clone();
        for k in 0..self.dim {
            out.terms[0][(k, k)] += cr(w);
        }
        out
    }

    pub fn max_coeff(&self) -> f64 {
        self.terms.iter().map(max_abs).fold(0.0, f64::max)
    }

    /// Flattens the coefficients into a real vector (re parts then im parts).
    pub fn to_real_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 * self.terms.len() * self.dim * self.dim);
        for t in &self.terms {
            for z in t.iter() {
                v.push(z.re);
            }
        }
        for t in &self.terms {
            for z in t.iter() {
                v.push(z.im);
            }
        }
        v
    }

    pub fn from_real_vec(irrep: Option<usize>, dim: usize, degree: usize, v: &[f64]) -> Self {
        let mut p = Self::zero(irrep, dim, degree);
        let nterms = p.terms.len();
        let block = nterms * dim * dim;
        for (k, t) in p.terms.iter_mut().enumerate() {
            for (e, z) in t.iter_mut().enumerate() {
                let flat = k * dim * dim + e;
                *z = C64::new(v[flat], v[block + flat]);
            }
        }
        p
    }
}

/// Reynolds average of the seed map x -> m0(x) H:
/// (1/|G|) sum_g rho(g)^{-1} m0(R(g) x) H rho(g).
fn average_seed(
    group: &FiniteSubgroup,
    image: &RotationImage,
    irrep: &UnitaryIrrep,
    m0: Mono,
    h: &CMatrix,
    degree: usize,
) -> EquivariantPoly {
    let mut out = EquivariantPoly::zero(Some(irrep.label), irrep.dim, degree);
    for g in 0..group.order() {
        let rot = &image.rotations[image.source[g]];
        let composed = compose_mono(m0, rot, degree);
        let conj = irrep.matrices[g].adjoint() * h * &irrep.matrices[g];
        for (k, w) in composed.coeffs.iter().enumerate() {
            if w.norm() > 0.0 {
                out.terms[k] += &conj * *w;
            }
        }
    }
    for t in &mut out.terms {
        *t /= cr(group.order() as f64);
    }
    out
}

/// Real-linear basis of the self-adjoint equivariant polynomial maps of
/// degree <= d, by averaging monomial-times-Hermitian seeds and reducing the
/// result with pivoted QR at 1e-8.
pub fn equivariant_basis(
    group: &FiniteSubgroup,
    image: &RotationImage,
    irrep: &UnitaryIrrep,
    d: usize,
) -> Vec<EquivariantPoly> {
    let seeds_m = monomials(d);
    let seeds_h = hermitian_basis(irrep.dim);
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for &m0 in &seeds_m {
        for h in &seeds_h {
            let avg = average_seed(group, image, irrep, m0, h, d);
            if avg.max_coeff() > 1e-12 {
                cols.push(avg.to_real_vec());
            }
        }
    }
    if cols.is_empty() {
        return Vec::new();
    }
    let rows = cols[0].len();
    let mat = RMatrix::from_fn(rows, cols.len(), |r, c| cols[c][r]);
    let basis = real_column_basis(&mat, 1e-8);
    (0..basis.ncols())
        .map(|c| {
            let v: Vec<f64> = basis.column(c).iter().copied().collect();
            EquivariantPoly::from_real_vec(Some(irrep.label), irrep.dim, d, &v)
        })
        .collect()
}

/// Worst equivariance defect of a map over all group elements at the given
/// points of the complex sphere.
pub fn equivariance_residual(
    group: &FiniteSubgroup,
    image: &RotationImage,
    irrep: &UnitaryIrrep,
    f: &EquivariantPoly,
    points: &[[C64; 3]],
) -> f64 {
    let mut worst: f64 = 0.0;
    for point in points {
        let fx = f.evaluate(point);
        for g in 0..group.order() {
            let rot = &image.rotations[image.source[g]];
            let moved = [
                cr(rot[(0, 0)]) * point[0] + cr(rot[(0, 1)]) * point[1] + cr(rot[(0, 2)]) * point[2],
                cr(rot[(1, 0)]) * point[0] + cr(rot[(1, 1)]) * point[1] + cr(rot[(1, 2)]) * point[2],
                cr(rot[(2, 0)]) * point[0] + cr(rot[(2, 1)]) * point[1] + cr(rot[(2, 2)]) * point[2],
            ];
            let lhs = f.evaluate(&moved);
            let rho = &irrep.matrices[g];
            let rhs = rho * &fx * rho.adjoint();
            worst = worst.max(max_abs(&(lhs - rhs)));
        }
    }
    worst
}

/// Block structure of the centralizer algebra at a sphere point: the isotypic
/// multiplicities of the restriction to the stabilizer, sorted descending,
/// with a unitary aligning the components to contiguous coordinates.
#[derive(Debug, Clone)]
pub struct BlockStructure {
    /// Multiplicities d_1 >= d_2 >= ... >= d_k, summing to the dimension.
    pub sizes: Vec<usize>,
    /// Unitary change of basis; column blocks follow `sizes`.
    pub basis: CMatrix,
    /// Eigenvalue of the stabilizer generator on each isotypic component.
    pub generator_values: Vec<C64>,
}

impl BlockStructure {
    pub fn dim(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Offsets of each block in the aligned coordinates.
    pub fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.sizes.len());
        let mut acc = 0;
        for &s in &self.sizes {
            out.push(acc);
            acc += s;
        }
        out
    }

    fn block_of(&self, row: usize) -> usize {
        let mut acc = 0;
        for (k, &s) in self.sizes.iter().enumerate() {
            acc += s;
            if row < acc {
                return k;
            }
        }
        unreachable!("row inside the matrix")
    }

    /// Conjugates into the aligned basis.
    pub fn to_aligned(&self, m: &CMatrix) -> CMatrix {
        self.basis.adjoint() * m * &self.basis
    }

    /// Largest entry outside the diagonal blocks, in the aligned basis.
    pub fn off_block_mass(&self, m: &CMatrix) -> f64 {
        let a = self.to_aligned(m);
        let mut worst: f64 = 0.0;
        for r in 0..a.nrows() {
            for c in 0..a.ncols() {
                if self.block_of(r) != self.block_of(c) {
                    worst = worst.max(a[(r, c)].norm());
                }
            }
        }
        worst
    }

    /// Zeroes everything outside the diagonal blocks (projection onto the
    /// block algebra), returning the result in the original basis.
    pub fn project(&self, m: &CMatrix) -> CMatrix {
        let mut a = self.to_aligned(m);
        for r in 0..a.nrows() {
            for c in 0..a.ncols() {
                if self.block_of(r) != self.block_of(c) {
                    a[(r, c)] = C64::new(0.0, 0.0);
                }
            }
        }
        &self.basis * a * self.basis.adjoint()
    }

    /// Extracts the k-th diagonal block in the aligned basis.
    pub fn block(&self, m: &CMatrix, k: usize) -> CMatrix {
        let a = self.to_aligned(m);
        let off = self.offsets()[k];
        a.view((off, off), (self.sizes[k], self.sizes[k]))
            .into_owned()
    }
}

/// Decomposes the restriction of the irrep to the stabilizer of a real point
/// into isotypic pieces. Stabilizer preimages here are cyclic, so the
/// eigenspaces of a generator of maximal order are exactly the isotypic
/// components.
pub fn centralizer_algebra(
    group: &FiniteSubgroup,
    image: &RotationImage,
    irrep: &UnitaryIrrep,
    point: &Vec3,
) -> BlockStructure {
    let stab = stabilizer(group, image, point);
    let gen = *stab
        .iter()
        .max_by_key(|&&g| group.element_order(g))
        .expect("stabilizer contains the identity");
    assert_eq!(
        group.element_order(gen),
        stab.len(),
        "stabilizer preimage is cyclic"
    );
    let (vals, vecs) = normal_eigen(&irrep.matrices[gen], 1e-8);
    // cluster eigenvalues of the unitary generator
    let mut clusters: Vec<(C64, Vec<usize>)> = Vec::new();
    for (k, &v) in vals.iter().enumerate() {
        match clusters.iter_mut().find(|(w, _)| (v - *w).norm() <= 1e-6) {
            Some((_, members)) => members.push(k),
            None => clusters.push((v, vec![k])),
        }
    }
    clusters.sort_by(|(va, ma), (vb, mb)| {
        mb.len().cmp(&ma.len()).then(va.arg().total_cmp(&vb.arg()))
    });
    let d = irrep.dim;
    let mut basis = CMatrix::zeros(d, d);
    let mut col = 0;
    let mut sizes = Vec::new();
    let mut generator_values = Vec::new();
    for (v, members) in &clusters {
        sizes.push(members.len());
        generator_values.push(*v);
        for &k in members {
            basis.set_column(col, &vecs.column(k));
            col += 1;
        }
    }
    BlockStructure {
        sizes,
        basis,
        generator_values,
    }
}

/// Dimensions of the spaces of invariant scalar polynomials on the sphere,
/// reported per exact degree 0..=d.
pub fn scalar_invariants_dimension(image: &RotationImage, d: usize) -> Vec<usize> {
    let mut cumulative = Vec::with_capacity(d + 1);
    for k in 0..=d {
        let list = monomials(k);
        let mut cols: Vec<Vec<f64>> = Vec::new();
        for &m0 in &list {
            let mut acc = ScalarPoly::zero(k);
            for r in 0..image.order() {
                let composed = compose_mono(m0, &image.rotations[r], k);
                for (i, w) in composed.coeffs.iter().enumerate() {
                    acc.coeffs[i] += w;
                }
            }
            let v: Vec<f64> = acc
                .coeffs
                .iter()
                .map(|z| z.re / image.order() as f64)
                .collect();
            if v.iter().any(|x| x.abs() > 1e-12) {
                cols.push(v);
            }
        }
        if cols.is_empty() {
            cumulative.push(0);
            continue;
        }
        let mat = RMatrix::from_fn(cols[0].len(), cols.len(), |r, c| cols[c][r]);
        cumulative.push(real_column_basis(&mat, 1e-8).ncols());
    }
    let mut per_degree = vec![cumulative[0]];
    for k in 1..=d {
        per_degree.push(cumulative[k] - cumulative[k - 1]);
    }
    per_degree
}

/// Least-squares decomposition of `target` over the real span of `basis`;
/// returns (coefficients, residual).
pub fn project_onto_span(basis: &[EquivariantPoly], target: &EquivariantPoly) -> (Vec<f64>, f64) {
    let degree = basis
        .iter()
        .map(|b| b.degree)
        .fold(target.degree, usize::max);
    let lift = |p: &EquivariantPoly| -> Vec<f64> {
        EquivariantPoly::zero(p.irrep, p.dim, degree)
            .add(p)
            .to_real_vec()
    };
    let cols: Vec<Vec<f64>> = basis.iter().map(lift).collect();
    let b = lift(target);
    let a = RMatrix::from_fn(b.len(), cols.len(), |r, c| cols[c][r]);
    let bv = nalgebra::DVector::from_vec(b);
    let x = crate::linalg::lstsq(&a, &bv, 1e-12);
    let residual = (&a * &x - &bv).amax();
    (x.iter().copied().collect(), residual)
}

/// Random point of the complex sphere: x, y free, z solves the quadric.
pub fn random_complex_point<R: rand::Rng>(rng: &mut R) -> [C64; 3] {
    let x = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
    let y = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
    let z = (cr(1.0) - x * x - y * y).sqrt();
    [x, y, z]
}

/// Random point of the real sphere.
pub fn random_real_point<R: rand::Rng>(rng: &mut R) -> Vec3 {
    loop {
        let p = Vec3::new(
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
        );
        let n = p.norm();
        if n > 1e-3 && n <= 1.0 {
            return p / n;
        }
    }
}
