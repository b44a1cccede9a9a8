//! Action of the binary polyhedral groups on the sphere: the SU(2) -> SO(3)
//! map, stabilizers, special orbits, and the geodesic fundamental domain.
//!
//! The orthonormal basis of the space of traceless Hermitian operators is
//! fixed as sigma_k / 2, which identifies that space with R^3 and gives the
//! usual two-to-one cover.

use crate::groups::{FiniteSubgroup, GroupKind, Mat2};
use crate::linalg::C64;
use crate::{Error, Result};
use nalgebra::{Matrix3, Vector3};

const POINT_TOL: f64 = 1e-8;
const DEDUP_GRID: f64 = 1e-6;

pub type Vec3 = Vector3<f64>;
pub type Rot3 = Matrix3<f64>;

/// Pauli matrices.
fn sigma() -> [Mat2; 3] {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        Mat2::new(z, one, one, z),
        Mat2::new(z, -i, i, z),
        Mat2::new(one, z, z, -one),
    ]
}

/// Rotation matrix of a single SU(2) element in the sigma_k / 2 basis:
/// R_{lk} = (1/2) tr(g sigma_k g^dagger sigma_l).
pub fn rotation_of(g: &Mat2) -> Rot3 {
    let s = sigma();
    let mut r = Rot3::zeros();
    for k in 0..3 {
        let conj = g * s[k] * g.adjoint();
        for l in 0..3 {
            r[(l, k)] = 0.5 * (conj * s[l]).trace().re;
        }
    }
    r
}

/// The image of the group in SO(3), deduplicated, with both preimages of each
/// rotation recorded.
#[derive(Debug, Clone)]
pub struct RotationImage {
    pub rotations: Vec<Rot3>,
    /// Pair of group indices above each rotation (tau-related), smaller first.
    pub preimages: Vec<[usize; 2]>,
    /// Group index -> rotation index.
    pub source: Vec<usize>,
    identity: usize,
}

fn rot_key(r: &Rot3) -> [i64; 9] {
    let mut key = [0i64; 9];
    for (k, v) in r.iter().enumerate() {
        key[k] = (v / DEDUP_GRID).round() as i64;
    }
    key
}

pub fn so3_image(group: &FiniteSubgroup) -> RotationImage {
    let n = group.order();
    let mut rotations: Vec<Rot3> = Vec::new();
    let mut preimages: Vec<Vec<usize>> = Vec::new();
    let mut source = vec![usize::MAX; n];
    let mut keys: std::collections::HashMap<[i64; 9], usize> = std::collections::HashMap::new();
    for g in 0..n {
        let r = rotation_of(&group.elements[g].matrix);
        let key = rot_key(&r);
        let idx = match keys.get(&key) {
            Some(&k) => k,
            None => match rotations.iter().position(|q| (q - r).amax() <= 1e-9) {
                Some(k) => {
                    keys.insert(key, k);
                    k
                }
                None => {
                    rotations.push(r);
                    preimages.push(Vec::new());
                    keys.insert(key, rotations.len() - 1);
                    rotations.len() - 1
                }
            },
        };
        preimages[idx].push(g);
        source[g] = idx;
    }
    let preimages = preimages
        .into_iter()
        .map(|mut v| {
            v.sort_unstable();
            assert_eq!(v.len(), 2, "the cover is two-to-one");
            [v[0], v[1]]
        })
        .collect();
    let identity = source[group.identity()];
    RotationImage {
        rotations,
        preimages,
        source,
        identity,
    }
}

impl RotationImage {
    pub fn order(&self) -> usize {
        self.rotations.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn apply(&self, r: usize, p: &Vec3) -> Vec3 {
        self.rotations[r] * p
    }

    /// Rotation indices fixing a point.
    pub fn stabilizer_image(&self, p: &Vec3) -> Vec<usize> {
        (0..self.order())
            .filter(|&r| (self.apply(r, p) - p).norm() <= POINT_TOL)
            .collect()
    }
}

/// Group elements (in Gamma, preimages included) fixing the point on the
/// sphere. Always contains the identity and tau.
pub fn stabilizer(group: &FiniteSubgroup, image: &RotationImage, p: &Vec3) -> Vec<usize> {
    (0..group.order())
        .filter(|&g| (image.apply(image.source[g], p) - p).norm() <= POINT_TOL)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpecialPointKind {
    FaceCenter,
    EdgeCenter,
    Vertex,
}

impl SpecialPointKind {
    pub fn name(&self) -> &'static str {
        match self {
            SpecialPointKind::FaceCenter => "face-center",
            SpecialPointKind::EdgeCenter => "edge-center",
            SpecialPointKind::Vertex => "vertex",
        }
    }
}

/// An orbit of sphere points whose stabilizer is larger than the center.
#[derive(Debug, Clone)]
pub struct SpecialOrbit {
    pub kind: SpecialPointKind,
    pub representative: Vec3,
    pub points: Vec<Vec3>,
    pub stabilizer_order_image: usize,
    pub stabilizer_image: Vec<usize>,
    pub stabilizer_preimage: Vec<usize>,
}

/// Axis of a non-identity rotation: unit kernel vector of R - I.
fn rotation_axis(r: &Rot3) -> Vec3 {
    let m = r - Rot3::identity();
    let svd = m.svd(false, true);
    let vt = svd.v_t.unwrap();
    let axis = vt.row(2).transpose();
    axis.normalize()
}

fn lex_key(p: &Vec3) -> [i64; 3] {
    [
        (p.x / DEDUP_GRID).round() as i64,
        (p.y / DEDUP_GRID).round() as i64,
        (p.z / DEDUP_GRID).round() as i64,
    ]
}

/// All orbits of rotation-axis endpoints, with kinds assigned.
pub fn special_orbits(group: &FiniteSubgroup, image: &RotationImage) -> Vec<SpecialOrbit> {
    // collect the axis endpoints of every non-identity rotation
    let mut pts: Vec<Vec3> = Vec::new();
    for r in 0..image.order() {
        if r == image.identity() {
            continue;
        }
        let axis = rotation_axis(&image.rotations[r]);
        for cand in [axis, -axis] {
            if !pts.iter().any(|q| (q - cand).norm() <= POINT_TOL) {
                pts.push(cand);
            }
        }
    }
    // orbit partition
    let mut orbit_of = vec![usize::MAX; pts.len()];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for k in 0..pts.len() {
        if orbit_of[k] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut members = vec![k];
        orbit_of[k] = id;
        let mut cursor = 0;
        while cursor < members.len() {
            let p = pts[members[cursor]];
            for r in 0..image.order() {
                let q = image.apply(r, &p);
                if let Some(pos) = pts.iter().position(|x| (x - q).norm() <= POINT_TOL) {
                    if orbit_of[pos] == usize::MAX {
                        orbit_of[pos] = id;
                        members.push(pos);
                    }
                }
            }
            cursor += 1;
        }
        orbits.push(members);
    }

    let mut raw: Vec<SpecialOrbit> = orbits
        .iter()
        .map(|members| {
            let mut points: Vec<Vec3> = members.iter().map(|&k| pts[k]).collect();
            points.sort_by_key(lex_key);
            points.reverse();
            let representative = points[0];
            let stabilizer_image = image.stabilizer_image(&representative);
            let stabilizer_preimage = stabilizer(group, image, &representative);
            SpecialOrbit {
                kind: SpecialPointKind::Vertex, // assigned below
                stabilizer_order_image: stabilizer_image.len(),
                representative,
                points,
                stabilizer_image,
                stabilizer_preimage,
            }
        })
        .collect();

    assign_kinds(group.kind, &mut raw);
    raw.sort_by_key(|o| o.kind);
    raw
}

fn contains_pole(orbit: &SpecialOrbit) -> bool {
    orbit.points.iter().any(|p| {
        (p - Vec3::new(0.0, 0.0, 1.0)).norm() <= 1e-6 || (p + Vec3::new(0.0, 0.0, 1.0)).norm() <= 1e-6
    })
}

fn assign_kinds(kind: GroupKind, orbits: &mut [SpecialOrbit]) {
    match kind {
        GroupKind::BinaryCyclic(_) => {
            for o in orbits.iter_mut() {
                o.kind = SpecialPointKind::Vertex;
            }
        }
        GroupKind::BinaryDihedral(_) => {
            // the dihedron's faces are the two hemispheres: poles are face
            // centers; the remaining two orbits are separated by the lex
            // order of their canonical representatives
            let mut rest: Vec<usize> = Vec::new();
            for (k, o) in orbits.iter_mut().enumerate() {
                if contains_pole(o) {
                    o.kind = SpecialPointKind::FaceCenter;
                } else {
                    rest.push(k);
                }
            }
            assert_eq!(rest.len(), 2);
            let (a, b) = (rest[0], rest[1]);
            let a_larger = lex_key(&orbits[a].representative) > lex_key(&orbits[b].representative);
            let (v, e) = if a_larger { (a, b) } else { (b, a) };
            orbits[v].kind = SpecialPointKind::Vertex;
            orbits[e].kind = SpecialPointKind::EdgeCenter;
        }
        _ => {
            // tetra/octa/icosa: edge orbit has stabilizer order 2; the two
            // remaining orbits are ranked by stabilizer order, ties (the
            // tetrahedron) broken by the lex-larger canonical representative
            let mut others: Vec<usize> = Vec::new();
            for (k, o) in orbits.iter_mut().enumerate() {
                if o.stabilizer_order_image == 2 {
                    o.kind = SpecialPointKind::EdgeCenter;
                } else {
                    others.push(k);
                }
            }
            assert_eq!(others.len(), 2);
            let (a, b) = (others[0], others[1]);
            let v = match orbits[a]
                .stabilizer_order_image
                .cmp(&orbits[b].stabilizer_order_image)
            {
                std::cmp::Ordering::Greater => a,
                std::cmp::Ordering::Less => b,
                std::cmp::Ordering::Equal => {
                    if lex_key(&orbits[a].representative) > lex_key(&orbits[b].representative) {
                        a
                    } else {
                        b
                    }
                }
            };
            let f = if v == a { b } else { a };
            orbits[v].kind = SpecialPointKind::Vertex;
            orbits[f].kind = SpecialPointKind::FaceCenter;
        }
    }
}

pub fn geodesic_distance(p: &Vec3, q: &Vec3) -> f64 {
    p.dot(q).clamp(-1.0, 1.0).acos()
}

/// Constant-speed geodesic interpolation between unit vectors.
pub fn slerp(p: &Vec3, q: &Vec3, t: f64) -> Vec3 {
    let omega = geodesic_distance(p, q);
    if omega < 1e-12 {
        return (p + (q - p) * t).normalize();
    }
    assert!(
        omega < std::f64::consts::PI - 1e-9,
        "slerp endpoints are antipodal"
    );
    (p * ((1.0 - t) * omega).sin() + q * (t * omega).sin()) / omega.sin()
}

/// Structured mesh on the geodesic quadrilateral A-B-A'-C.
///
/// Grid coordinates: (i, j) with 0 <= i, j <= m; corners A = (0,0),
/// B = (m,0), A' = (m,m), C = (0,m). The side v=0 is the arc AB, u=m is
/// BA', v=m is CA', u=0 is AC. Boundary nodes pair exactly under the edge
/// rotation b (BA' onto BA) and the vertex rotation c (CA onto CA').
#[derive(Debug, Clone)]
pub struct DomainMesh {
    pub m: usize,
    pub h: f64,
    pub nodes: Vec<Vec3>,
}

impl DomainMesh {
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.m + 1) + j
    }

    pub fn node(&self, i: usize, j: usize) -> &Vec3 {
        &self.nodes[self.idx(i, j)]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn grid_of(&self, idx: usize) -> (usize, usize) {
        (idx / (self.m + 1), idx % (self.m + 1))
    }

    /// (node on BA', partner node on BA) pairs: b maps the first onto the second.
    pub fn b_pairs(&self) -> Vec<(usize, usize)> {
        (0..=self.m)
            .map(|j| (self.idx(self.m, j), self.idx(self.m - j, 0)))
            .collect()
    }

    /// (node on CA, partner node on CA') pairs: c maps the first onto the second.
    pub fn c_pairs(&self) -> Vec<(usize, usize)> {
        (0..=self.m)
            .map(|j| (self.idx(0, j), self.idx(self.m - j, self.m)))
            .collect()
    }

    /// Grid edges (4-neighbor stencil).
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..=self.m {
            for j in 0..=self.m {
                if i + 1 <= self.m {
                    out.push((self.idx(i, j), self.idx(i + 1, j)));
                }
                if j + 1 <= self.m {
                    out.push((self.idx(i, j), self.idx(i, j + 1)));
                }
            }
        }
        out
    }

    pub fn max_spacing(&self) -> f64 {
        self.edges()
            .iter()
            .map(|&(a, b)| geodesic_distance(&self.nodes[a], &self.nodes[b]))
            .fold(0.0, f64::max)
    }

    pub fn is_boundary(&self, idx: usize) -> bool {
        let (i, j) = self.grid_of(idx);
        i == 0 || j == 0 || i == self.m || j == self.m
    }
}

/// The geodesic quadrilateral A-B-A'-C with its marked rotations.
#[derive(Debug, Clone)]
pub struct FundamentalDomain {
    /// Face center A.
    pub corner_a: Vec3,
    /// Edge center B.
    pub corner_b: Vec3,
    /// Face center A' = cA.
    pub corner_a2: Vec3,
    /// Vertex C.
    pub corner_c: Vec3,
    /// Rotation indices in the image group: a around A, b around B, c around C.
    pub gen_a: usize,
    pub gen_b: usize,
    pub gen_c: usize,
    pub mesh: DomainMesh,
    /// Signed rotation angle of c about the outward axis at C, radians.
    pub orientation_angle_c: f64,
}

fn signed_angle_about(r: &Rot3, axis: &Vec3) -> f64 {
    // trace gives |angle|; the skew part gives the sign relative to the axis
    let cos = ((r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    let skew = Vec3::new(
        r[(2, 1)] - r[(1, 2)],
        r[(0, 2)] - r[(2, 0)],
        r[(1, 0)] - r[(0, 1)],
    ) / 2.0;
    let sin = skew.dot(axis);
    sin.atan2(cos)
}

pub fn fundamental_domain(
    group: &FiniteSubgroup,
    image: &RotationImage,
    orbits: &[SpecialOrbit],
    h: f64,
) -> Result<FundamentalDomain> {
    if !(h > 0.0 && h <= 0.2) {
        return Err(Error::MeshTooCoarse(h));
    }
    if matches!(group.kind, GroupKind::BinaryCyclic(_)) {
        return Err(Error::InvalidArgument(
            "cyclic groups have no polyhedral fundamental domain".into(),
        ));
    }
    let face = orbits
        .iter()
        .find(|o| o.kind == SpecialPointKind::FaceCenter)
        .expect("non-cyclic groups have a face orbit");
    let edge = orbits
        .iter()
        .find(|o| o.kind == SpecialPointKind::EdgeCenter)
        .expect("edge orbit");
    let vertex = orbits
        .iter()
        .find(|o| o.kind == SpecialPointKind::Vertex)
        .expect("vertex orbit");

    let c_pt = vertex.representative;
    // nearest edge midpoint to the vertex
    let b_pt = *edge
        .points
        .iter()
        .min_by(|p, q| {
            geodesic_distance(p, &c_pt)
                .total_cmp(&geodesic_distance(q, &c_pt))
                .then(lex_key(q).cmp(&lex_key(p)))
        })
        .unwrap();
    // the half-turn around B
    let b_rot = *image
        .stabilizer_image(&b_pt)
        .iter()
        .find(|&&r| (image.rotations[r].trace() + 1.0).abs() <= 1e-6)
        .expect("edge stabilizer contains a half-turn");

    // candidate face centers near B; need bA = A' and a vertex rotation c with cA = A'
    let mut candidates: Vec<Vec3> = face.points.clone();
    candidates.sort_by(|p, q| {
        geodesic_distance(p, &b_pt)
            .total_cmp(&geodesic_distance(q, &b_pt))
            .then(lex_key(q).cmp(&lex_key(p)))
    });
    let c_stab = image.stabilizer_image(&c_pt);
    let mut found: Option<(Vec3, Vec3, usize)> = None;
    'outer: for a_pt in &candidates {
        let a2_pt = image.apply(b_rot, a_pt);
        if (a2_pt - a_pt).norm() <= POINT_TOL {
            continue;
        }
        for &cr in &c_stab {
            if cr == image.identity() {
                continue;
            }
            if (image.apply(cr, a_pt) - a2_pt).norm() <= POINT_TOL {
                found = Some((*a_pt, a2_pt, cr));
                break 'outer;
            }
        }
    }
    let (mut a_pt, mut a2_pt, mut c_rot) =
        found.ok_or_else(|| Error::InvalidArgument("no consistent corner assignment".into()))?;

    // orientation convention: c turns counterclockwise seen from outside at C
    let mut angle_c = signed_angle_about(&image.rotations[c_rot], &c_pt.normalize());
    if angle_c < -1e-9 {
        std::mem::swap(&mut a_pt, &mut a2_pt);
        let old = c_rot;
        c_rot = (0..image.order())
            .find(|&r| (image.rotations[r] * image.rotations[old] - Rot3::identity()).amax() <= 1e-9)
            .expect("inverse rotation exists");
        angle_c = signed_angle_about(&image.rotations[c_rot], &c_pt.normalize());
    }

    // a = (bc)^{-1}
    let bc = image.rotations[b_rot] * image.rotations[c_rot];
    let a_rot = (0..image.order())
        .find(|&r| (image.rotations[r] * bc - Rot3::identity()).amax() <= 1e-9)
        .expect("group is closed");
    // sanity: a fixes A
    if (image.apply(a_rot, &a_pt) - a_pt).norm() > POINT_TOL {
        return Err(Error::InvalidArgument(
            "abc = e rotation does not fix A".into(),
        ));
    }

    // mesh: ruled slerp patch, refined until the spacing bound holds
    let sides = [
        geodesic_distance(&a_pt, &b_pt),
        geodesic_distance(&b_pt, &a2_pt),
        geodesic_distance(&c_pt, &a2_pt),
        geodesic_distance(&a_pt, &c_pt),
    ];
    let longest = sides.iter().fold(0.0f64, |acc, &s| acc.max(s));
    let mut m = ((longest / h).ceil() as usize).max(2);
    let mesh = loop {
        let mut nodes = Vec::with_capacity((m + 1) * (m + 1));
        for i in 0..=m {
            let u = i as f64 / m as f64;
            let top = slerp(&a_pt, &b_pt, u);
            let bottom = slerp(&c_pt, &a2_pt, u);
            for j in 0..=m {
                let v = j as f64 / m as f64;
                nodes.push(slerp(&top, &bottom, v));
            }
        }
        let mesh = DomainMesh { m, h, nodes };
        if mesh.max_spacing() <= h {
            break mesh;
        }
        m += 1;
        if m > 4096 {
            return Err(Error::MeshTooCoarse(h));
        }
    };

    // boundary identification must be node-exact
    for &(x, bx) in &mesh.b_pairs() {
        debug_assert!(
            (image.apply(b_rot, &mesh.nodes[x]) - mesh.nodes[bx]).norm() <= 1e-9,
            "b-pairing misaligned"
        );
    }
    for &(x, cx) in &mesh.c_pairs() {
        debug_assert!(
            (image.apply(c_rot, &mesh.nodes[x]) - mesh.nodes[cx]).norm() <= 1e-9,
            "c-pairing misaligned"
        );
    }

    Ok(FundamentalDomain {
        corner_a: a_pt,
        corner_b: b_pt,
        corner_a2: a2_pt,
        corner_c: c_pt,
        gen_a: a_rot,
        gen_b: b_rot,
        gen_c: c_rot,
        mesh,
        orientation_angle_c: angle_c,
    })
}

impl FundamentalDomain {
    /// The four marked points in the order A, B, C, A'.
    pub fn marked_points(&self) -> [(char, Vec3); 4] {
        [
            ('A', self.corner_a),
            ('B', self.corner_b),
            ('C', self.corner_c),
            ('\'', self.corner_a2),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(kind: GroupKind) -> (FiniteSubgroup, RotationImage) {
        let g = FiniteSubgroup::build(kind).unwrap();
        let image = so3_image(&g);
        (g, image)
    }

    #[test]
    fn basis_is_orthonormal() {
        let s = sigma();
        let half = C64::new(0.5, 0.0);
        for k in 0..3 {
            for l in 0..3 {
                let val = 2.0 * (s[k] * half * s[l] * half).trace().re;
                let expect = if k == l { 1.0f64 } else { 0.0 };
                assert!((val - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cover_is_two_to_one_with_tau_in_kernel() {
        let (g, image) = setup(GroupKind::BinaryIcosahedral);
        assert_eq!(image.order(), g.order() / 2);
        assert_eq!(image.source[g.tau()], image.identity());
        let r = &image.rotations[image.identity()];
        assert!((r - Rot3::identity()).amax() < 1e-12);
    }

    #[test]
    fn image_is_a_homomorphism_of_rotations() {
        let (g, image) = setup(GroupKind::BinaryOctahedral);
        for a in (0..g.order()).step_by(5) {
            let ra = image.rotations[image.source[a]];
            assert!((ra * ra.transpose() - Rot3::identity()).amax() <= 1e-9);
            assert!((ra.determinant() - 1.0).abs() <= 1e-9);
            for b in (0..g.order()).step_by(7) {
                let rb = image.rotations[image.source[b]];
                let rab = image.rotations[image.source[g.mul(a, b)]];
                assert!((ra * rb - rab).amax() <= 1e-8);
            }
        }
    }

    #[test]
    fn generic_point_has_central_stabilizer() {
        let (g, image) = setup(GroupKind::BinaryIcosahedral);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = Vec3::new(
            rng.gen::<f64>() - 0.5,
            rng.gen::<f64>() - 0.5,
            rng.gen::<f64>() - 0.5,
        )
        .normalize();
        let stab = stabilizer(&g, &image, &p);
        assert_eq!(stab, vec![g.identity(), g.tau()]);
    }

    #[test]
    fn special_orbit_counts() {
        for kind in [
            GroupKind::BinaryDihedral(2),
            GroupKind::BinaryDihedral(3),
            GroupKind::BinaryDihedral(4),
            GroupKind::BinaryTetrahedral,
            GroupKind::BinaryOctahedral,
            GroupKind::BinaryIcosahedral,
        ] {
            let (g, image) = setup(kind);
            let orbits = special_orbits(&g, &image);
            assert_eq!(orbits.len(), 3, "{kind:?}");
        }
        let (g, image) = setup(GroupKind::BinaryCyclic(4));
        assert_eq!(special_orbits(&g, &image).len(), 2);
    }

    #[test]
    fn stabilizer_orders_match_the_polyhedra() {
        let orders = |kind: GroupKind| -> Vec<(SpecialPointKind, usize)> {
            let (g, image) = setup(kind);
            special_orbits(&g, &image)
                .iter()
                .map(|o| (o.kind, o.stabilizer_order_image))
                .collect()
        };
        assert_eq!(
            orders(GroupKind::BinaryIcosahedral),
            vec![
                (SpecialPointKind::FaceCenter, 3),
                (SpecialPointKind::EdgeCenter, 2),
                (SpecialPointKind::Vertex, 5),
            ]
        );
        assert_eq!(
            orders(GroupKind::BinaryOctahedral),
            vec![
                (SpecialPointKind::FaceCenter, 3),
                (SpecialPointKind::EdgeCenter, 2),
                (SpecialPointKind::Vertex, 4),
            ]
        );
        assert_eq!(
            orders(GroupKind::BinaryTetrahedral),
            vec![
                (SpecialPointKind::FaceCenter, 3),
                (SpecialPointKind::EdgeCenter, 2),
                (SpecialPointKind::Vertex, 3),
            ]
        );
    }

    #[test]
    fn icosahedron_vertex_preimage_has_order_ten() {
        let (g, image) = setup(GroupKind::BinaryIcosahedral);
        let orbits = special_orbits(&g, &image);
        let v = orbits
            .iter()
            .find(|o| o.kind == SpecialPointKind::Vertex)
            .unwrap();
        assert_eq!(v.stabilizer_preimage.len(), 10);
        let max_order = v
            .stabilizer_preimage
            .iter()
            .map(|&k| g.element_order(k))
            .max()
            .unwrap();
        assert_eq!(max_order, 10, "preimage of C5 is cyclic of order 10");
    }

    #[test]
    fn octahedron_vertex_stabilizer_contains_an_order_four_element() {
        let (g, image) = setup(GroupKind::BinaryOctahedral);
        let orbits = special_orbits(&g, &image);
        let v = orbits
            .iter()
            .find(|o| o.kind == SpecialPointKind::Vertex)
            .unwrap();
        assert!(v
            .stabilizer_preimage
            .iter()
            .any(|&k| g.element_order(k) == 4));
    }

    #[test]
    fn orbit_stabilizer_identity() {
        for kind in [
            GroupKind::BinaryDihedral(3),
            GroupKind::BinaryTetrahedral,
            GroupKind::BinaryIcosahedral,
        ] {
            let (g, image) = setup(kind);
            for o in special_orbits(&g, &image) {
                assert_eq!(
                    o.points.len() * o.stabilizer_order_image,
                    image.order(),
                    "{kind:?} {:?}",
                    o.kind
                );
            }
        }
    }

    #[test]
    fn rotations_preserve_the_unit_sphere() {
        let (_, image) = setup(GroupKind::BinaryTetrahedral);
        let p = Vec3::new(0.3, -0.4, 0.866025403784).normalize();
        for r in 0..image.order() {
            let q = image.apply(r, &p);
            assert!((q.norm() - 1.0).abs() < 1e-12);
        }
    }

    fn domain_for(kind: GroupKind, h: f64) -> (FiniteSubgroup, RotationImage, FundamentalDomain) {
        let (g, image) = setup(kind);
        let orbits = special_orbits(&g, &image);
        let fd = fundamental_domain(&g, &image, &orbits, h).unwrap();
        (g, image, fd)
    }

    #[test]
    fn domain_identities() {
        for kind in [
            GroupKind::BinaryDihedral(2),
            GroupKind::BinaryDihedral(3),
            GroupKind::BinaryTetrahedral,
            GroupKind::BinaryOctahedral,
            GroupKind::BinaryIcosahedral,
        ] {
            let (_, image, fd) = domain_for(kind, 0.15);
            let ra = image.rotations[fd.gen_a];
            let rb = image.rotations[fd.gen_b];
            let rc = image.rotations[fd.gen_c];
            assert!((ra * rb * rc - Rot3::identity()).amax() <= 1e-9, "{kind:?}");
            assert!((image.apply(fd.gen_c, &fd.corner_a) - fd.corner_a2).norm() <= 1e-9);
            assert!((image.apply(fd.gen_b, &fd.corner_a2) - fd.corner_a).norm() <= 1e-9);
            assert!((image.apply(fd.gen_a, &fd.corner_a) - fd.corner_a).norm() <= 1e-9);
            assert!((image.apply(fd.gen_b, &fd.corner_b) - fd.corner_b).norm() <= 1e-9);
            assert!((image.apply(fd.gen_c, &fd.corner_c) - fd.corner_c).norm() <= 1e-9);
        }
    }

    #[test]
    fn interior_mesh_points_have_trivial_stabilizer() {
        let (_, image, fd) = domain_for(GroupKind::BinaryOctahedral, 0.15);
        let m = fd.mesh.m;
        for i in 1..m {
            for j in 1..m {
                let stab = image.stabilizer_image(fd.mesh.node(i, j));
                assert_eq!(stab.len(), 1, "node ({i},{j})");
            }
        }
    }

    #[test]
    fn orbit_of_mesh_covers_the_sphere() {
        for kind in [GroupKind::BinaryDihedral(2), GroupKind::BinaryTetrahedral] {
            let h = 0.15;
            let (_, image, fd) = domain_for(kind, h);
            // golden-angle spiral sample
            let n_sample = 1500;
            let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
            let mut worst: f64 = 0.0;
            for k in 0..n_sample {
                let z = 1.0 - 2.0 * (k as f64 + 0.5) / n_sample as f64;
                let rad = (1.0 - z * z).sqrt();
                let th = golden * k as f64;
                let p = Vec3::new(rad * th.cos(), rad * th.sin(), z);
                let mut best = f64::INFINITY;
                for r in 0..image.order() {
                    let rp = image.rotations[r].transpose() * p;
                    for node in &fd.mesh.nodes {
                        best = best.min(geodesic_distance(&rp, node));
                        if best < 1e-3 {
                            break;
                        }
                    }
                    if best < 1e-3 {
                        break;
                    }
                }
                worst = worst.max(best);
            }
            assert!(worst < 2.0 * h, "{kind:?}: covering defect {worst}");
        }
    }

    #[test]
    fn mesh_resolution_is_validated() {
        let (g, image) = setup(GroupKind::BinaryTetrahedral);
        let orbits = special_orbits(&g, &image);
        assert!(matches!(
            fundamental_domain(&g, &image, &orbits, 0.5),
            Err(Error::MeshTooCoarse(_))
        ));
        assert!(matches!(
            fundamental_domain(&g, &image, &orbits, 0.0),
            Err(Error::MeshTooCoarse(_))
        ));
    }

    #[test]
    fn boundary_pairs_are_node_exact() {
        let (_, image, fd) = domain_for(GroupKind::BinaryIcosahedral, 0.12);
        for (x, bx) in fd.mesh.b_pairs() {
            assert!((image.apply(fd.gen_b, &fd.mesh.nodes[x]) - fd.mesh.nodes[bx]).norm() <= 1e-9);
        }
        for (x, cx) in fd.mesh.c_pairs() {
            assert!((image.apply(fd.gen_c, &fd.mesh.nodes[x]) - fd.mesh.nodes[cx]).norm() <= 1e-9);
        }
    }
}
