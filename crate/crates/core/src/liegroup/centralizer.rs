//! Centralizers of finite sets of group elements and their conjugacy-class
//! labels.
//!
//! The identity component comes from the simultaneous fixed space of the
//! adjoint operators. The component group is decided per family by a closed
//! list of candidates:
//!
//! * SU2 and U2: centralizers are connected except the centre `{±I}` of SU2.
//! * SO3: a one-dimensional centralizer algebra with axis `n` gives SO(2) or
//!   O(2), decided by one half-turn about an axis orthogonal to `n`. A finite
//!   centralizer consists of half-turns only; their axes are read off from the
//!   space of symmetric matrices `P` with `g P gᵀ = P`, whose dimension is 1, 2
//!   or 3 for `e`, `Z2`, `V`.
//! * O2: reflections among the elements leave the centre or a Klein four
//!   group; otherwise SO(2) or all of O(2).
//! * O3 = SO3 × {±I}: classify `det(g)·g` in SO3 and double the components.

use std::cmp::Ordering;
use std::fmt;

use nalgebra::{DMatrix, Matrix3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

use super::{adjoint_operator, reflection, AlgebraElement, CMatrix, GroupElement, GroupSpec, C64};
use crate::error::{Error, Result};
use crate::linalg;
use crate::tolerance::Tolerances;

/// Conjugacy class `(K)` of a stabilizer subgroup.
///
/// Ordered by the dimension of the identity component, then by the number of
/// components: the smallest label is the generic one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrbitTypeLabel {
    pub group: GroupSpec,
    pub symbol: String,
    pub identity_dim: usize,
    pub components: usize,
}

impl OrbitTypeLabel {
    fn new(group: GroupSpec, symbol: &str, identity_dim: usize, components: usize) -> Self {
        OrbitTypeLabel {
            group,
            symbol: symbol.to_string(),
            identity_dim,
            components,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.identity_dim == 0
    }
}

impl Ord for OrbitTypeLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.identity_dim, self.components, &self.symbol, self.group).cmp(&(
            other.identity_dim,
            other.components,
            &other.symbol,
            other.group,
        ))
    }
}

impl PartialOrd for OrbitTypeLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for OrbitTypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.symbol)
    }
}

/// Full centralizer of a set of elements.
#[derive(Debug, Clone)]
pub struct Centralizer {
    /// Orthonormal basis of the centralizer Lie algebra.
    pub algebra: Vec<AlgebraElement>,
    /// One representative per connected component, identity first.
    pub components: Vec<GroupElement>,
    pub label: OrbitTypeLabel,
    /// Largest `‖z g − g z‖_F` over the component representatives.
    pub max_commutator: f64,
}

/// Coordinates (as columns) of an orthonormal basis of the simultaneous fixed
/// space of `Ad(g_i)`.
pub(crate) fn centralizer_algebra_coords(
    spec: GroupSpec,
    elements: &[GroupElement],
) -> DMatrix<f64> {
    let d = spec.algebra_dim();
    let blocks: Vec<DMatrix<f64>> = elements
        .iter()
        .map(|g| adjoint_operator(g) - DMatrix::identity(d, d))
        .collect();
    let stacked = linalg::vstack(&blocks, d);
    linalg::kernel(&stacked, Tolerances::current().rank)
}

/// Orthonormal basis of `∩ ker(Ad(g_i) − I)`.
pub fn centralizer_algebra(spec: GroupSpec, elements: &[GroupElement]) -> Vec<AlgebraElement> {
    let k = centralizer_algebra_coords(spec, elements);
    k.column_iter()
        .map(|c| AlgebraElement::from_coords(spec, c.as_slice()))
        .collect()
}

pub fn classify_centralizer(spec: GroupSpec, elements: &[GroupElement]) -> Result<OrbitTypeLabel> {
    centralizer(spec, elements).map(|c| c.label)
}

fn membership_tol() -> f64 {
    Tolerances::current().rank
}

fn commutes_with_all(z: &GroupElement, elements: &[GroupElement]) -> f64 {
    elements
        .iter()
        .map(|g| z.commutator_norm(g))
        .fold(0.0, f64::max)
}

fn unsupported(spec: GroupSpec, detail: impl Into<String>) -> Error {
    Error::UnsupportedGroup {
        group: spec.to_string(),
        detail: detail.into(),
    }
}

pub fn centralizer(spec: GroupSpec, elements: &[GroupElement]) -> Result<Centralizer> {
    if let Some(g) = elements.iter().find(|g| g.spec() != spec) {
        return Err(Error::invalid(format!(
            "element of {} passed to a {spec} centralizer",
            g.spec()
        )));
    }
    let algebra_coords = centralizer_algebra_coords(spec, elements);
    let dim = algebra_coords.ncols();
    let algebra: Vec<AlgebraElement> = algebra_coords
        .column_iter()
        .map(|c| AlgebraElement::from_coords(spec, c.as_slice()))
        .collect();
    let identity = spec.identity();
    let (label, components) = match spec {
        GroupSpec::Su2 => match dim {
            3 => (OrbitTypeLabel::new(spec, "SU2", 3, 1), vec![identity]),
            1 => (OrbitTypeLabel::new(spec, "T", 1, 1), vec![identity]),
            0 => (
                OrbitTypeLabel::new(spec, "Z", 0, 2),
                vec![identity, spec.scalar(C64::new(-1.0, 0.0))],
            ),
            _ => {
                return Err(unsupported(
                    spec,
                    format!("centralizer algebra of dimension {dim}"),
                ))
            }
        },
        GroupSpec::U2 => match dim {
            4 => (OrbitTypeLabel::new(spec, "U2", 4, 1), vec![identity]),
            2 => (OrbitTypeLabel::new(spec, "T", 2, 1), vec![identity]),
            1 => (OrbitTypeLabel::new(spec, "Z", 1, 1), vec![identity]),
            _ => {
                return Err(unsupported(
                    spec,
                    format!("centralizer algebra of dimension {dim}"),
                ))
            }
        },
        GroupSpec::Torus(k) => (
            OrbitTypeLabel::new(spec, &format!("T^{k}"), k, 1),
            vec![identity],
        ),
        GroupSpec::So3 => {
            let rotations: Vec<Matrix3<f64>> = elements.iter().map(real3).collect();
            let (symbol, idim, reps) = so3_tree(&rotations, &algebra_coords)?;
            let reps = reps
                .into_iter()
                .map(|m| GroupElement::from_parts_unchecked(spec, from_real3(&m)))
                .collect::<Vec<_>>();
            (OrbitTypeLabel::new(spec, symbol, idim, reps.len()), reps)
        }
        GroupSpec::O3 => {
            let rotations: Vec<Matrix3<f64>> = elements
                .iter()
                .map(|g| {
                    let m = real3(g);
                    if m.determinant() < 0.0 {
                        -m
                    } else {
                        m
                    }
                })
                .collect();
            let (symbol, idim, reps) = so3_tree(&rotations, &algebra_coords)?;
            let mut all: Vec<GroupElement> = reps
                .iter()
                .map(|m| GroupElement::from_parts_unchecked(spec, from_real3(m)))
                .collect();
            all.extend(
                reps.iter()
                    .map(|m| GroupElement::from_parts_unchecked(spec, from_real3(&-m))),
            );
            let symbol = format!("{symbol}×Z2");
            (OrbitTypeLabel::new(spec, &symbol, idim, all.len()), all)
        }
        GroupSpec::O2 => {
            let tol = membership_tol();
            let flip = GroupElement::from_parts_unchecked(spec, reflection(2));
            let minus = spec.scalar(C64::new(-1.0, 0.0));
            match elements.iter().find(|g| g.component() < 0) {
                None => {
                    if dim != 1 {
                        return Err(unsupported(spec, "rotations with a finite centralizer"));
                    }
                    if commutes_with_all(&flip, elements) <= tol {
                        (OrbitTypeLabel::new(spec, "O2", 1, 2), vec![identity, flip])
                    } else {
                        (OrbitTypeLabel::new(spec, "SO2", 1, 1), vec![identity])
                    }
                }
                Some(f) => {
                    if dim != 0 {
                        return Err(unsupported(
                            spec,
                            "reflection with a continuous centralizer",
                        ));
                    }
                    if commutes_with_all(f, elements) <= tol {
                        let minus_f = f.mul(&minus);
                        (
                            OrbitTypeLabel::new(spec, "V", 0, 4),
                            vec![identity, minus, f.clone(), minus_f],
                        )
                    } else {
                        (OrbitTypeLabel::new(spec, "Z2", 0, 2), vec![identity, minus])
                    }
                }
            }
        }
    };
    let max_commutator = components
        .iter()
        .map(|z| commutes_with_all(z, elements))
        .fold(0.0, f64::max);
    if max_commutator > membership_tol() {
        return Err(unsupported(
            spec,
            format!(
                "component candidate fails to commute ({max_commutator:.3e}) for label {label}"
            ),
        ));
    }
    Ok(Centralizer {
        algebra,
        components,
        label,
        max_commutator,
    })
}

fn real3(g: &GroupElement) -> Matrix3<f64> {
    let m = g.matrix();
    Matrix3::from_fn(|i, j| m[(i, j)].re)
}

fn from_real3(m: &Matrix3<f64>) -> CMatrix {
    CMatrix::from_fn(3, 3, |i, j| C64::new(m[(i, j)], 0.0))
}

fn half_turn(axis: &Vector3<f64>) -> Matrix3<f64> {
    let a = axis.normalize();
    2.0 * a * a.transpose() - Matrix3::identity()
}

fn max_commutator3(z: &Matrix3<f64>, rotations: &[Matrix3<f64>]) -> f64 {
    rotations
        .iter()
        .map(|g| (z * g - g * z).norm())
        .fold(0.0, f64::max)
}

/// SO3 decision tree. Returns the class symbol, the identity-component
/// dimension and one rotation per component.
fn so3_tree(
    rotations: &[Matrix3<f64>],
    algebra: &DMatrix<f64>,
) -> Result<(&'static str, usize, Vec<Matrix3<f64>>)> {
    let tol = membership_tol();
    let id = Matrix3::identity();
    let spec = GroupSpec::So3;
    match algebra.ncols() {
        3 => Ok(("SO3", 3, vec![id])),
        1 => {
            // The L_k/√2 basis makes algebra coordinates the rotation axis.
            let n = Vector3::new(algebra[(0, 0)], algebra[(1, 0)], algebra[(2, 0)]).normalize();
            let k = n.iamin();
            let m = n.cross(&Vector3::ith(k, 1.0));
            let h = half_turn(&m);
            if max_commutator3(&h, rotations) <= tol {
                Ok(("O2", 1, vec![id, h]))
            } else {
                Ok(("SO2", 1, vec![id]))
            }
        }
        0 => {
            let w = symmetric_commutant(rotations);
            match w.ncols() {
                1 => Ok(("e", 0, vec![id])),
                2 => {
                    let p = traceless_part(&w);
                    let eig = SymmetricEigen::new(p);
                    let mut order = [0usize, 1, 2];
                    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
                    let lam = order.map(|i| eig.eigenvalues[i]);
                    let distinct = if lam[1] - lam[0] > lam[2] - lam[1] {
                        order[0]
                    } else {
                        order[2]
                    };
                    let axis = eig.eigenvectors.column(distinct).into_owned();
                    Ok(("Z2", 0, vec![id, half_turn(&axis)]))
                }
                3 => {
                    let frame = generic_frame(&w).ok_or_else(|| {
                        unsupported(spec, "symmetric commutant without a distinguished frame")
                    })?;
                    let mut reps = vec![id];
                    reps.extend(frame.iter().map(half_turn));
                    Ok(("V", 0, reps))
                }
                k => Err(unsupported(
                    spec,
                    format!("symmetric commutant of dimension {k}"),
                )),
            }
        }
        dim => Err(unsupported(
            spec,
            format!("centralizer algebra of dimension {dim}"),
        )),
    }
}

/// Orthonormal basis of `{P ∈ Sym(3) : g P gᵀ = P for all g}` in the
/// coordinates `(P00, P11, P22, √2 P01, √2 P02, √2 P12)`.
fn symmetric_commutant(rotations: &[Matrix3<f64>]) -> DMatrix<f64> {
    let basis = sym_basis();
    let blocks: Vec<DMatrix<f64>> = rotations
        .iter()
        .map(|g| {
            let mut block = DMatrix::zeros(6, 6);
            for (c, b) in basis.iter().enumerate() {
                let image = g * b * g.transpose() - b;
                block.set_column(c, &nalgebra::DVector::from_vec(sym_coords(&image).to_vec()));
            }
            block
        })
        .collect();
    let stacked = linalg::vstack(&blocks, 6);
    linalg::kernel(&stacked, Tolerances::current().rank)
}

fn sym_basis() -> [Matrix3<f64>; 6] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = [Matrix3::zeros(); 6];
    for i in 0..3 {
        out[i][(i, i)] = 1.0;
    }
    for (k, (i, j)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
        out[3 + k][(i, j)] = r;
        out[3 + k][(j, i)] = r;
    }
    out
}

fn sym_coords(m: &Matrix3<f64>) -> [f64; 6] {
    let s = std::f64::consts::SQRT_2;
    [
        m[(0, 0)],
        m[(1, 1)],
        m[(2, 2)],
        s * m[(0, 1)],
        s * m[(0, 2)],
        s * m[(1, 2)],
    ]
}

fn sym_from_coords(c: &[f64]) -> Matrix3<f64> {
    sym_basis()
        .iter()
        .zip(c)
        .fold(Matrix3::zeros(), |acc, (b, &x)| acc + b * x)
}

/// The element of the commutant orthogonal to the identity with the largest
/// norm (the commutant always contains `I`).
fn traceless_part(w: &DMatrix<f64>) -> Matrix3<f64> {
    let ident = nalgebra::DVector::from_vec(vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0]) / 3f64.sqrt();
    let best = w
        .column_iter()
        .map(|c| c - &ident * ident.dot(&c))
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("non-empty commutant");
    sym_from_coords(best.as_slice())
}

/// Common eigenframe of a three-dimensional commutant, read off from a generic
/// combination with well separated eigenvalues.
fn generic_frame(w: &DMatrix<f64>) -> Option<[Vector3<f64>; 3]> {
    const WEIGHTS: [[f64; 3]; 3] = [[1.0, 0.618, 0.276], [0.3, -1.0, 0.71], [-0.45, 0.2, 1.0]];
    for weights in WEIGHTS {
        let coords = w * nalgebra::DVector::from_column_slice(&weights);
        let p = sym_from_coords(coords.as_slice());
        let eig = SymmetricEigen::new(p);
        let mut lam: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        lam.sort_by(f64::total_cmp);
        if lam[1] - lam[0] > 1e-3 && lam[2] - lam[1] > 1e-3 {
            let v = &eig.eigenvectors;
            return Some([0, 1, 2].map(|i| v.column(i).into_owned()));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liegroup::{exp, AlgebraElement};
    use nalgebra::Complex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn su2(a: [C64; 4]) -> GroupElement {
        GroupElement::new(GroupSpec::Su2, CMatrix::from_row_slice(2, 2, &a)).unwrap()
    }

    fn i_sigma_x() -> GroupElement {
        let z = C64::new(0.0, 0.0);
        su2([z, C64::new(0.0, 1.0), C64::new(0.0, 1.0), z])
    }

    fn i_sigma_y() -> GroupElement {
        let z = C64::new(0.0, 0.0);
        su2([z, C64::new(1.0, 0.0), C64::new(-1.0, 0.0), z])
    }

    fn torus_su2(theta: f64) -> GroupElement {
        let z = C64::new(0.0, 0.0);
        su2([
            Complex::from_polar(1.0, theta),
            z,
            z,
            Complex::from_polar(1.0, -theta),
        ])
    }

    fn so3_diag(a: f64, b: f64, c: f64) -> GroupElement {
        GroupElement::new(
            GroupSpec::So3,
            CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                C64::new(a, 0.0),
                C64::new(b, 0.0),
                C64::new(c, 0.0),
            ])),
        )
        .unwrap()
    }

    fn so3_rotation(axis: [f64; 3], angle: f64) -> GroupElement {
        // Coordinates in the L_k/√2 basis are √2 times the rotation vector.
        let v = Vector3::from(axis).normalize() * angle * std::f64::consts::SQRT_2;
        exp(&AlgebraElement::from_coords(GroupSpec::So3, v.as_slice()))
    }

    #[test]
    fn su2_algebra_dimensions() {
        let spec = GroupSpec::Su2;
        assert_eq!(centralizer_algebra(spec, &[spec.identity()]).len(), 3);
        assert_eq!(centralizer_algebra(spec, &[torus_su2(0.4)]).len(), 1);
        assert_eq!(
            centralizer_algebra(spec, &[i_sigma_x(), i_sigma_y()]).len(),
            0
        );
    }

    #[test]
    fn su2_labels() {
        let spec = GroupSpec::Su2;
        let minus = spec.scalar(C64::new(-1.0, 0.0));
        assert_eq!(
            classify_centralizer(spec, &[minus.clone(), spec.identity()])
                .unwrap()
                .symbol,
            "SU2"
        );
        assert_eq!(
            classify_centralizer(spec, &[torus_su2(0.4), minus])
                .unwrap()
                .symbol,
            "T"
        );
        let c = centralizer(spec, &[i_sigma_x(), i_sigma_y()]).unwrap();
        assert_eq!(c.label.symbol, "Z");
        assert_eq!(c.components.len(), 2);
    }

    #[test]
    fn so3_decision_tree() {
        let spec = GroupSpec::So3;
        let x = so3_diag(1.0, -1.0, -1.0);
        let y = so3_diag(-1.0, 1.0, -1.0);
        let c = centralizer(spec, &[x.clone(), y.clone()]).unwrap();
        assert_eq!(c.label.symbol, "V");
        assert_eq!(c.components.len(), 4);
        assert_eq!(
            classify_centralizer(spec, std::slice::from_ref(&x))
                .unwrap()
                .symbol,
            "O2"
        );
        assert_eq!(
            classify_centralizer(spec, &[so3_rotation([0.0, 0.0, 1.0], 0.7)])
                .unwrap()
                .symbol,
            "SO2"
        );
        // Rotation about z plus a half-turn about x: only the half-turn about z survives.
        let zx = [so3_rotation([0.0, 0.0, 1.0], 0.7), x.clone()];
        assert_eq!(classify_centralizer(spec, &zx).unwrap().symbol, "Z2");
        let generic = [
            so3_rotation([0.0, 0.0, 1.0], 0.7),
            so3_rotation([1.0, 0.2, 0.0], 1.1),
        ];
        assert_eq!(classify_centralizer(spec, &generic).unwrap().symbol, "e");
        assert_eq!(classify_centralizer(spec, &[]).unwrap().symbol, "SO3");
    }

    #[test]
    fn o2_and_o3_labels() {
        let o2 = GroupSpec::O2;
        let f = GroupElement::new(o2, reflection(2)).unwrap();
        let minus = o2.scalar(C64::new(-1.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let r = o2.random_element(1, &mut rng);
        assert_eq!(
            classify_centralizer(o2, std::slice::from_ref(&minus))
                .unwrap()
                .symbol,
            "O2"
        );
        assert_eq!(
            classify_centralizer(o2, std::slice::from_ref(&r))
                .unwrap()
                .symbol,
            "SO2"
        );
        assert_eq!(
            classify_centralizer(o2, &[f.clone(), minus])
                .unwrap()
                .symbol,
            "V"
        );
        assert_eq!(classify_centralizer(o2, &[f, r]).unwrap().symbol, "Z2");

        let o3 = GroupSpec::O3;
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(-1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
        ]));
        let g = GroupElement::new(o3, m).unwrap();
        let c = centralizer(o3, &[g]).unwrap();
        assert_eq!(c.label.symbol, "O2×Z2");
        assert_eq!(c.components.len(), 4);
    }

    #[test]
    fn labels_are_conjugation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let cases: Vec<(GroupSpec, Vec<GroupElement>)> = vec![
            (GroupSpec::Su2, vec![torus_su2(0.3), torus_su2(1.2)]),
            (GroupSpec::Su2, vec![i_sigma_x(), i_sigma_y()]),
            (
                GroupSpec::So3,
                vec![so3_diag(1.0, -1.0, -1.0), so3_diag(-1.0, 1.0, -1.0)],
            ),
            (
                GroupSpec::So3,
                vec![
                    so3_rotation([0.0, 0.0, 1.0], 0.7),
                    so3_diag(1.0, -1.0, -1.0),
                ],
            ),
            (GroupSpec::So3, vec![so3_diag(1.0, -1.0, -1.0)]),
        ];
        for (spec, elems) in cases {
            let base = centralizer(spec, &elems).unwrap();
            for _ in 0..50 {
                let h = spec.random_element(1, &mut rng);
                let conj: Vec<GroupElement> = elems.iter().map(|g| g.conjugated_by(&h)).collect();
                let c = centralizer(spec, &conj).unwrap();
                assert_eq!(c.label, base.label);
                assert_eq!(c.algebra.len(), base.algebra.len());
            }
        }
    }

    #[test]
    fn random_pairs_have_minimal_centralizers() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for spec in [GroupSpec::Su2, GroupSpec::So3, GroupSpec::U2] {
            for _ in 0..20 {
                let pair = [
                    spec.random_element(1, &mut rng),
                    spec.random_element(1, &mut rng),
                ];
                let c = centralizer(spec, &pair).unwrap();
                assert_eq!(c.algebra.len(), spec.center_dim());
                let expect = match spec {
                    GroupSpec::Su2 | GroupSpec::U2 => "Z",
                    _ => "e",
                };
                assert_eq!(c.label.symbol, expect);
                let _ = rng.random::<u8>();
            }
        }
    }
}
