//! Finite subgroups of SU(2) as explicit matrix groups.
//!
//! Groups are built by closing a small generator set under multiplication.
//! Elements are identified by rounding matrix entries to a 1e-6 grid, with a
//! slow-path scan at 1e-9 so grid boundaries cannot split one element in two.
//! Element order is deterministic: sorted by rounded entries, identity first.

use crate::linalg::C64;
use crate::{Error, Result};
use nalgebra::{Matrix2, SMatrix};
use sha2::{Digest, Sha256};
use std::collections::HashMap;

pub type Mat2 = SMatrix<C64, 2, 2>;

const GRID: f64 = 1e-6;
const MATCH_TOL: f64 = 1e-9;
const CLOSURE_CAP: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKind {
    BinaryCyclic(usize),
    BinaryDihedral(usize),
    BinaryTetrahedral,
    BinaryOctahedral,
    BinaryIcosahedral,
}

impl GroupKind {
    pub fn name(&self) -> String {
        match self {
            GroupKind::BinaryCyclic(n) => format!("binary-cyclic-{n}"),
            GroupKind::BinaryDihedral(n) => format!("binary-dihedral-{n}"),
            GroupKind::BinaryTetrahedral => "binary-tetrahedral".into(),
            GroupKind::BinaryOctahedral => "binary-octahedral".into(),
            GroupKind::BinaryIcosahedral => "binary-icosahedral".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GroupElement {
    pub matrix: Mat2,
    pub index: usize,
}

/// A finite subgroup of SU(2) with its full multiplication table.
#[derive(Debug, Clone)]
pub struct FiniteSubgroup {
    pub kind: GroupKind,
    pub elements: Vec<GroupElement>,
    table: Vec<usize>,
    inverse: Vec<usize>,
    tau: usize,
}

/// 2x2 special unitary matrix of the unit quaternion a + bi + cj + dk.
pub fn quaternion(a: f64, b: f64, c: f64, d: f64) -> Mat2 {
    Matrix2::new(
        C64::new(a, b),
        C64::new(c, d),
        C64::new(-c, d),
        C64::new(a, -b),
    )
}

fn grid_key(m: &Mat2) -> [i64; 8] {
    let mut key = [0i64; 8];
    for (k, z) in m.iter().enumerate() {
        key[2 * k] = (z.re / GRID).round() as i64;
        key[2 * k + 1] = (z.im / GRID).round() as i64;
    }
    key
}

fn mat_dist(a: &Mat2, b: &Mat2) -> f64 {
    (a - b).iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

fn generators(kind: GroupKind) -> Result<Vec<Mat2>> {
    use std::f64::consts::PI;
    match kind {
        GroupKind::BinaryCyclic(n) => {
            if n < 2 {
                return Err(Error::InvalidArgument("cyclic order must be >= 2".into()));
            }
            if n % 2 == 1 {
                return Err(Error::OddCycleUnsupported(n));
            }
            let t = 2.0 * PI / n as f64;
            Ok(vec![Matrix2::new(
                C64::from_polar(1.0, t),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::from_polar(1.0, -t),
            )])
        }
        GroupKind::BinaryDihedral(n) => {
            if n < 2 {
                return Err(Error::InvalidArgument(
                    "dihedral parameter must be >= 2".into(),
                ));
            }
            let t = PI / n as f64;
            let r = Matrix2::new(
                C64::from_polar(1.0, t),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::from_polar(1.0, -t),
            );
            Ok(vec![r, quaternion(0.0, 0.0, 1.0, 0.0)])
        }
        GroupKind::BinaryTetrahedral => Ok(vec![
            quaternion(0.0, 1.0, 0.0, 0.0),
            quaternion(0.0, 0.0, 1.0, 0.0),
            quaternion(0.5, 0.5, 0.5, 0.5),
        ]),
        GroupKind::BinaryOctahedral => {
            let s = 0.5f64.sqrt();
            let mut gens = generators(GroupKind::BinaryTetrahedral)?;
            gens.push(quaternion(s, s, 0.0, 0.0));
            Ok(gens)
        }
        GroupKind::BinaryIcosahedral => {
            let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
            let mut gens = generators(GroupKind::BinaryTetrahedral)?;
            gens.push(quaternion(phi / 2.0, 1.0 / (2.0 * phi), 0.5, 0.0));
            Ok(gens)
        }
    }
}

struct ElementPool {
    mats: Vec<Mat2>,
    keys: HashMap<[i64; 8], usize>,
}

impl ElementPool {
    fn find(&self, m: &Mat2) -> Option<usize> {
        if let Some(&k) = self.keys.get(&grid_key(m)) {
            return Some(k);
        }
        // grid-boundary fallback
        self.mats.iter().position(|e| mat_dist(e, m) <= MATCH_TOL)
    }

    fn insert(&mut self, m: Mat2) -> Result<usize> {
        if let Some(k) = self.find(&m) {
            self.keys.entry(grid_key(&m)).or_insert(k);
            return Ok(k);
        }
        if self.mats.len() >= CLOSURE_CAP {
            return Err(Error::ClosureOverflow(CLOSURE_CAP));
        }
        let idx = self.mats.len();
        self.mats.push(m);
        self.keys.insert(grid_key(&m), idx);
        Ok(idx)
    }
}

impl FiniteSubgroup {
    /// Closes the standard generators of `kind` under multiplication and
    /// assembles the multiplication table.
    pub fn build(kind: GroupKind) -> Result<Self> {
        let gens = generators(kind)?;
        let mut pool = ElementPool {
            mats: Vec::new(),
            keys: HashMap::new(),
        };
        pool.insert(Mat2::identity())?;
        let mut frontier: Vec<usize> = vec![0];
        for g in &gens {
            let idx = pool.insert(*g)?;
            if idx == pool.mats.len() - 1 {
                frontier.push(idx);
            }
        }
        while let Some(k) = frontier.pop() {
            for g in &gens {
                let p = pool.mats[k] * g;
                let before = pool.mats.len();
                let idx = pool.insert(p)?;
                if idx == before {
                    frontier.push(idx);
                }
            }
        }

        // deterministic ordering: sorted by rounded entries, identity first
        let mut mats = pool.mats;
        mats.sort_by_key(grid_key);
        let id_pos = mats
            .iter()
            .position(|m| mat_dist(m, &Mat2::identity()) <= MATCH_TOL)
            .expect("identity must be in the closure");
        let id = mats.remove(id_pos);
        mats.insert(0, id);
        // keep the identity bit-exact
        mats[0] = Mat2::identity();

        let n = mats.len();
        let mut keys = HashMap::new();
        for (k, m) in mats.iter().enumerate() {
            keys.insert(grid_key(m), k);
        }
        let pool = ElementPool {
            mats: mats.clone(),
            keys,
        };

        let mut table = vec![0usize; n * n];
        for a in 0..n {
            for b in 0..n {
                let p = mats[a] * mats[b];
                table[a * n + b] = pool.find(&p).ok_or(Error::ClosureOverflow(CLOSURE_CAP))?;
            }
        }
        let mut inverse = vec![0usize; n];
        for a in 0..n {
            inverse[a] = (0..n)
                .find(|&b| table[a * n + b] == 0)
                .expect("row of a group table contains the identity");
        }
        let minus_id = -Mat2::identity();
        let tau = pool
            .find(&minus_id)
            .ok_or_else(|| Error::InvalidArgument("group does not contain -I".into()))?;

        let elements = mats
            .into_iter()
            .enumerate()
            .map(|(index, matrix)| GroupElement { matrix, index })
            .collect();
        let group = FiniteSubgroup {
            kind,
            elements,
            table,
            inverse,
            tau,
        };
        group.check_separation()?;
        Ok(group)
    }

    fn check_separation(&self) -> Result<()> {
        let n = self.order();
        for a in 0..n {
            if !self.elements[a].matrix.is_special_unitary(1e-9) {
                return Err(Error::InvalidArgument(format!(
                    "element {a} is not special unitary"
                )));
            }
            for b in (a + 1)..n {
                if mat_dist(&self.elements[a].matrix, &self.elements[b].matrix) <= GRID {
                    return Err(Error::InvalidArgument(format!(
                        "elements {a} and {b} are not separated"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn matrix(&self, g: usize) -> &Mat2 {
        &self.elements[g].matrix
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// h g h^{-1}
    pub fn conjugate(&self, h: usize, g: usize) -> usize {
        self.mul(self.mul(h, g), self.inv(h))
    }

    /// Smallest k >= 1 with g^k = e, from the table.
    pub fn element_order(&self, g: usize) -> usize {
        let mut p = g;
        let mut k = 1;
        while p != 0 {
            p = self.mul(p, g);
            k += 1;
        }
        k
    }

    /// All h commuting with g.
    pub fn centralizer(&self, g: usize) -> Vec<usize> {
        (0..self.order())
            .filter(|&h| self.mul(h, g) == self.mul(g, h))
            .collect()
    }

    /// SHA-256 of the row-major table, for reproducibility reports.
    pub fn table_checksum(&self) -> String {
        let mut hasher = Sha256::new();
        for &v in &self.table {
            hasher.update((v as u32).to_le_bytes());
        }
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }
}

trait SpecialUnitary {
    fn is_special_unitary(&self, tol: f64) -> bool;
}

impl SpecialUnitary for Mat2 {
    fn is_special_unitary(&self, tol: f64) -> bool {
        let uu = self * self.adjoint() - Mat2::identity();
        let unitary = uu.iter().all(|z| z.norm() <= tol);
        let det = self.determinant();
        unitary && (det - C64::new(1.0, 0.0)).norm() <= tol
    }
}
