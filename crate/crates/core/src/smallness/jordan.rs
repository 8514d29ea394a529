use nalgebra::{Complex, DMatrix};
use serde::Serialize;
use std::collections::HashMap;

use crate::error::{LabError, Result};
use crate::linalg::MatrixElement;

/// Default cap for closing a generating set.
pub const CLOSURE_CAP: usize = 100_000;
const EQ_TOL: f64 = 1e-9;

/// A finite matrix group, stored as its element list.
#[derive(Debug, Clone)]
pub struct FiniteGroup<M: MatrixElement> {
    elements: Vec<M>,
    index: HashMap<M::Key, usize>,
}

impl<M: MatrixElement> FiniteGroup<M> {
    /// Closes `gens` under multiplication.
    pub fn generate(gens: &[M], cap: usize) -> Result<Self> {
        let first = gens.first().ok_or_else(|| LabError::Empty("generators".into()))?;
        let id = first.identity_like();
        let mut elements = vec![id.clone()];
        let mut index = HashMap::new();
        index.insert(id.key(), 0);
        let mut frontier = vec![id];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for a in &frontier {
                for g in gens {
                    let b = a.mul(g);
                    let k = b.key();
                    if !index.contains_key(&k) {
                        index.insert(k, elements.len());
                        elements.push(b.clone());
                        next.push(b);
                        if elements.len() > cap {
                            return Err(LabError::CapExceeded { cap });
                        }
                    }
                }
            }
            frontier = next;
        }
        Ok(Self { elements, index })
    }

    /// Accepts an explicit element list after checking closure.
    pub fn from_elements(elements: Vec<M>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, e) in elements.iter().enumerate() {
            index.insert(e.key(), i);
        }
        if index.len() != elements.len() {
            return Err(LabError::pre("duplicate elements"));
        }
        let g = Self { elements, index };
        for a in &g.elements {
            for b in &g.elements {
                if g.position(&a.mul(b)).is_none() {
                    return Err(LabError::NotClosed("a product falls outside the set".into()));
                }
            }
        }
        Ok(g)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[M] {
        &self.elements
    }

    pub fn position(&self, x: &M) -> Option<usize> {
        self.index.get(&x.key()).copied().filter(|&i| self.elements[i].approx_eq(x, EQ_TOL))
    }

    fn commute(&self, i: usize, j: usize) -> bool {
        let (a, b) = (&self.elements[i], &self.elements[j]);
        a.mul(b).approx_eq(&b.mul(a), EQ_TOL)
    }

    /// Subgroup generated by the listed elements (indices into the group).
    pub fn subgroup_closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut inside = vec![false; self.order()];
        let id = self.position(&self.elements[0].identity_like()).expect("identity present");
        inside[id] = true;
        let mut members = vec![id];
        let mut frontier = vec![id];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &a in &frontier {
                for &g in gens {
                    if let Some(p) = self.position(&self.elements[a].mul(&self.elements[g])) {
                        if !inside[p] {
                            inside[p] = true;
                            members.push(p);
                            next.push(p);
                        }
                    }
                }
            }
            frontier = next;
        }
        members.sort_unstable();
        members
    }

    /// A largest abelian subgroup, as sorted element indices: a maximum
    /// clique of the commuting graph (a maximum set of pairwise commuting
    /// elements is closed under products, hence a subgroup).
    pub fn max_abelian_subgroup(&self) -> Vec<usize> {
        let n = self.order();
        let adj: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i != j && self.commute(i, j)).collect()).collect();
        let mut best = Vec::new();
        bron_kerbosch(&adj, Vec::new(), (0..n).collect(), Vec::new(), &mut best);
        best.sort_unstable();
        best
    }

    /// Whether the listed elements pairwise commute.
    pub fn is_abelian(&self, members: &[usize]) -> bool {
        members.iter().all(|&i| members.iter().all(|&j| self.commute(i, j)))
    }
}

fn bron_kerbosch(adj: &[Vec<bool>], r: Vec<usize>, mut p: Vec<usize>, mut x: Vec<usize>, best: &mut Vec<usize>) {
    if p.is_empty() && x.is_empty() {
        if r.len() > best.len() {
            *best = r;
        }
        return;
    }
    if r.len() + p.len() <= best.len() {
        return;
    }
    let pivot =
        p.iter().chain(&x).copied().max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count()).expect("nonempty");
    let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
    for v in candidates {
        let mut r2 = r.clone();
        r2.push(v);
        let p2 = p.iter().copied().filter(|&u| adj[v][u]).collect();
        let x2 = x.iter().copied().filter(|&u| adj[v][u]).collect();
        bron_kerbosch(adj, r2, p2, x2, best);
        p.retain(|&u| u != v);
        x.push(v);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct JordanReport {
    pub group_order: usize,
    pub epsilon: f64,
    /// `|A|` for `A = <F cap Omega_eps>`.
    pub abelian_size: usize,
    /// `[F : A]`.
    pub index: usize,
    pub verified_abelian: bool,
    /// Smallest index of an abelian subgroup, by exhaustive search.
    pub oracle_index: usize,
    /// `A`, as element indices.
    pub subgroup: Vec<usize>,
    /// A largest abelian subgroup found by the exhaustive search.
    pub oracle_subgroup: Vec<usize>,
    pub oracle_verified_abelian: bool,
}

/// `A = <F cap Omega>` with `Omega = {g : dist(g, 1) < eps}` in the given
/// metric.
pub fn jordan_abelian_index_with<M: MatrixElement>(
    f: &FiniteGroup<M>,
    epsilon: f64,
    dist: impl Fn(&M) -> f64,
) -> Result<JordanReport> {
    if !(epsilon > 0.0) {
        return Err(LabError::pre("epsilon must be positive"));
    }
    let small: Vec<usize> = (0..f.order()).filter(|&i| dist(&f.elements[i]) < epsilon).collect();
    let a = f.subgroup_closure(&small);
    let abelian = f.is_abelian(&a);
    if !abelian {
        return Err(LabError::pre(format!(
            "epsilon = {epsilon} is too large: the {} small elements generate a non-abelian subgroup",
            small.len()
        )));
    }
    let best = f.max_abelian_subgroup();
    let closed = f.subgroup_closure(&best) == best;
    Ok(JordanReport {
        group_order: f.order(),
        epsilon,
        abelian_size: a.len(),
        index: f.order() / a.len(),
        verified_abelian: abelian,
        oracle_index: f.order() / best.len(),
        subgroup: a,
        oracle_verified_abelian: closed && f.is_abelian(&best),
        oracle_subgroup: best,
    })
}

/// Jordan index in the Frobenius metric.
pub fn jordan_abelian_index<M: MatrixElement>(f: &FiniteGroup<M>, epsilon: f64) -> Result<JordanReport> {
    jordan_abelian_index_with(f, epsilon, |m| m.dist_to_identity())
}

/// Rotation angle of an element of SO(3), in `[0, pi]`.
pub fn so3_angle(m: &DMatrix<f64>) -> f64 {
    ((m.trace() - 1.0) / 2.0).clamp(-1.0, 1.0).acos()
}

/// Angle of the rotation of SO(3) covered by an element of SU(2), in
/// `[0, pi]`.
pub fn su2_angle(m: &DMatrix<Complex<f64>>) -> f64 {
    2.0 * (m.trace().re.abs() / 2.0).clamp(-1.0, 1.0).acos()
}

/// Rotation by `theta` about the unit vector along `axis`.
pub fn rotation3(axis: [f64; 3], theta: f64) -> DMatrix<f64> {
    let n = (axis[0].powi(2) + axis[1].powi(2) + axis[2].powi(2)).sqrt();
    let [x, y, z] = axis.map(|a| a / n);
    let (s, c) = theta.sin_cos();
    let t = 1.0 - c;
    DMatrix::from_row_slice(
        3,
        3,
        &[
            c + x * x * t,
            x * y * t - z * s,
            x * z * t + y * s,
            y * x * t + z * s,
            c + y * y * t,
            y * z * t - x * s,
            z * x * t - y * s,
            z * y * t + x * s,
            c + z * z * t,
        ],
    )
}

/// The rotation group of the icosahedron (A_5, order 60), generated by a
/// fifth turn about a vertex `(0, 1, phi)` and a third turn about a face
/// center `(1, 1, 1)`.
pub fn icosahedral_group() -> Result<FiniteGroup<DMatrix<f64>>> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let a = rotation3([0.0, 1.0, phi], std::f64::consts::TAU / 5.0);
    let b = rotation3([1.0, 1.0, 1.0], std::f64::consts::TAU / 3.0);
    FiniteGroup::generate(&[a, b], CLOSURE_CAP)
}

/// The quaternion group Q8 in SU(2).
pub fn quaternion_group() -> Result<FiniteGroup<DMatrix<Complex<f64>>>> {
    let z = |re: f64, im: f64| Complex::new(re, im);
    let i = DMatrix::from_row_slice(2, 2, &[z(0.0, 1.0), z(0.0, 0.0), z(0.0, 0.0), z(0.0, -1.0)]);
    let j = DMatrix::from_row_slice(2, 2, &[z(0.0, 0.0), z(1.0, 0.0), z(-1.0, 0.0), z(0.0, 0.0)]);
    FiniteGroup::generate(&[i, j], CLOSURE_CAP)
}

/// `max_{a,b} d(f(ab), f(a) f(b))` over a finite group given by its
/// elements and multiplication.
pub fn quasi_morphism_defect<D, T>(
    domain: &[D],
    op: impl Fn(&D, &D) -> D,
    f: impl Fn(&D) -> T,
    target_op: impl Fn(&T, &T) -> T,
    dist: impl Fn(&T, &T) -> f64,
) -> f64 {
    let mut worst: f64 = 0.0;
    for a in domain {
        for b in domain {
            worst = worst.max(dist(&f(&op(a, b)), &target_op(&f(a), &f(b))));
        }
    }
    worst
}

/// Angle metric on the unit circle.
pub fn circle_distance(u: &Complex<f64>, v: &Complex<f64>) -> f64 {
    (u * v.conj()).arg().abs()
}

/// Defect of `k -> images[k]` from `Z/n` to the circle.
pub fn cyclic_circle_defect(images: &[Complex<f64>]) -> Result<f64> {
    let n = images.len();
    if n == 0 {
        return Err(LabError::Empty("domain".into()));
    }
    let dom: Vec<usize> = (0..n).collect();
    Ok(quasi_morphism_defect(&dom, |a, b| (a + b) % n, |&k| images[k], |u, v| u * v, circle_distance))
}
