//! Compact matrix groups SU(2), SO(3), U(2), O(2), O(3) and tori, with their
//! Lie algebras, adjoint actions and the invariant inner product.
//!
//! Every group element is stored as a dense complex matrix; the real families
//! keep zero imaginary parts. Lie-algebra vectors are handled either as
//! matrices ([`AlgebraElement`]) or as coordinates in the frozen orthonormal
//! basis returned by [`GroupSpec::basis`]. With the default scale the inner
//! product is `⟨X, Y⟩ = −Re tr(XY)` and the basis is:
//!
//! | family | basis                                   |
//! |--------|-----------------------------------------|
//! | SU2    | `−iσ_x/√2, −iσ_y/√2, −iσ_z/√2`           |
//! | U2     | the SU2 basis followed by `iI/√2`        |
//! | SO3,O3 | `L_x/√2, L_y/√2, L_z/√2` (rotation generators) |
//! | O2     | `J/√2`, `J = [[0,−1],[1,0]]`              |
//! | T^k    | `i·E_jj`, j = 1..k                       |
//!
//! The SU2 and SO3 bases are matched so that the adjoint matrix of an SU2
//! element is literally the SO3 matrix of its image under the double cover.

mod centralizer;

pub use centralizer::{
    centralizer, centralizer_algebra, classify_centralizer, Centralizer, OrbitTypeLabel,
};

use std::fmt;
use std::str::FromStr;

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

const ZERO: C64 = Complex { re: 0.0, im: 0.0 };
const ONE: C64 = Complex { re: 1.0, im: 0.0 };
const I: C64 = Complex { re: 0.0, im: 1.0 };

/// Supported compact matrix groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum GroupSpec {
    Su2,
    So3,
    U2,
    O2,
    O3,
    /// Diagonal torus `(S¹)^k`, k ≥ 1.
    Torus(usize),
}

impl GroupSpec {
    pub fn algebra_dim(self) -> usize {
        match self {
            GroupSpec::Su2 | GroupSpec::So3 | GroupSpec::O3 => 3,
            GroupSpec::U2 => 4,
            GroupSpec::O2 => 1,
            GroupSpec::Torus(k) => k,
        }
    }

    pub fn matrix_size(self) -> usize {
        match self {
            GroupSpec::Su2 | GroupSpec::U2 | GroupSpec::O2 => 2,
            GroupSpec::So3 | GroupSpec::O3 => 3,
            GroupSpec::Torus(k) => k,
        }
    }

    pub fn is_complex(self) -> bool {
        matches!(self, GroupSpec::Su2 | GroupSpec::U2 | GroupSpec::Torus(_))
    }

    pub fn is_connected(self) -> bool {
        !matches!(self, GroupSpec::O2 | GroupSpec::O3)
    }

    pub fn is_abelian(self) -> bool {
        matches!(self, GroupSpec::Torus(_))
    }

    /// Dimension of the Lie algebra of the centre.
    pub fn center_dim(self) -> usize {
        match self {
            GroupSpec::U2 => 1,
            GroupSpec::Torus(k) => k,
            _ => 0,
        }
    }

    /// Human-readable description of the centre.
    pub fn center_description(self) -> &'static str {
        match self {
            GroupSpec::Su2 => "{±I}",
            GroupSpec::So3 => "{I}",
            GroupSpec::U2 => "S¹·I",
            GroupSpec::O2 => "{±I}",
            GroupSpec::O3 => "{±I}",
            GroupSpec::Torus(_) => "the whole torus",
        }
    }

    /// Frozen orthonormal basis of the Lie algebra (unit scale).
    pub fn basis(self) -> Vec<CMatrix> {
        let r2 = std::f64::consts::FRAC_1_SQRT_2;
        let c = |re: f64, im: f64| Complex::new(re, im);
        let m2 = |a: [C64; 4]| CMatrix::from_row_slice(2, 2, &a);
        let real3 = |a: [f64; 9]| CMatrix::from_row_slice(3, 3, &a.map(|x| c(x * r2, 0.0)));
        let su2 = || {
            vec![
                m2([ZERO, c(0.0, -r2), c(0.0, -r2), ZERO]),
                m2([ZERO, c(-r2, 0.0), c(r2, 0.0), ZERO]),
                m2([c(0.0, -r2), ZERO, ZERO, c(0.0, r2)]),
            ]
        };
        let so3 = || {
            vec![
                real3([0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0]),
                real3([0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0]),
                real3([0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            ]
        };
        match self {
            GroupSpec::Su2 => su2(),
            GroupSpec::U2 => {
                let mut b = su2();
                b.push(m2([c(0.0, r2), ZERO, ZERO, c(0.0, r2)]));
                b
            }
            GroupSpec::So3 | GroupSpec::O3 => so3(),
            GroupSpec::O2 => vec![m2([ZERO, c(-r2, 0.0), c(r2, 0.0), ZERO])],
            GroupSpec::Torus(k) => (0..k)
                .map(|j| {
                    let mut m = CMatrix::zeros(k, k);
                    m[(j, j)] = I;
                    m
                })
                .collect(),
        }
    }

    /// Coordinates of (the anti-hermitian part of) `x` in the frozen basis.
    /// For any square matrix this is the orthogonal projection onto the
    /// algebra followed by taking coordinates.
    pub fn coords_of(self, x: &CMatrix) -> Vec<f64> {
        self.basis()
            .iter()
            .map(|e| -trace_product(e, x).re)
            .collect()
    }

    pub fn matrix_from_coords(self, coords: &[f64]) -> CMatrix {
        let n = self.matrix_size();
        let mut m = CMatrix::zeros(n, n);
        for (e, &a) in self.basis().iter().zip(coords) {
            m += e * Complex::new(a, 0.0);
        }
        m
    }

    pub fn identity(self) -> GroupElement {
        let n = self.matrix_size();
        GroupElement {
            spec: self,
            matrix: CMatrix::identity(n, n),
        }
    }

    /// `s·I` for a unit complex scalar; caller guarantees it lies in the group.
    pub fn scalar(self, s: C64) -> GroupElement {
        let n = self.matrix_size();
        GroupElement {
            spec: self,
            matrix: CMatrix::identity(n, n) * s,
        }
    }

    /// True when `g` lies in the centre of the group.
    pub fn is_central(self, g: &GroupElement) -> bool {
        if self.is_abelian() {
            return true;
        }
        let tol = Tolerances::current().group;
        let m = &g.matrix;
        let d = m[(0, 0)];
        let n = m.nrows();
        (0..n).all(|i| (0..n).all(|j| (m[(i, j)] - if i == j { d } else { ZERO }).norm() <= tol))
    }

    /// Haar-ish random element in the component with determinant sign
    /// `component` (+1 identity component, −1 the other one; ignored for
    /// connected groups). Gaussian matrices are projected onto the group, so
    /// the law is not guaranteed to be exactly Haar.
    pub fn random_element<R: Rng + ?Sized>(self, component: i8, rng: &mut R) -> GroupElement {
        if let GroupSpec::Torus(k) = self {
            let angles: Vec<f64> = (0..k)
                .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
                .collect();
            return torus_from_angles(&angles);
        }
        let n = self.matrix_size();
        loop {
            let m = CMatrix::from_fn(n, n, |_, _| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = if self.is_complex() {
                    rng.sample(StandardNormal)
                } else {
                    0.0
                };
                Complex::new(re, im)
            });
            let base = match self {
                GroupSpec::O2 => GroupSpec::O2,
                GroupSpec::O3 => GroupSpec::So3,
                other => other,
            };
            let Ok(mut g) = project_to_group(&m, base) else {
                continue;
            };
            if self == GroupSpec::O2 {
                let sign = if g.det().re > 0.0 { 1 } else { -1 };
                if sign != component.signum() {
                    g.matrix = &g.matrix * reflection(2);
                }
            } else if self == GroupSpec::O3 {
                g.spec = GroupSpec::O3;
                if component < 0 {
                    g.matrix = -g.matrix;
                }
            }
            return g;
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Su2 => write!(f, "SU2"),
            GroupSpec::So3 => write!(f, "SO3"),
            GroupSpec::U2 => write!(f, "U2"),
            GroupSpec::O2 => write!(f, "O2"),
            GroupSpec::O3 => write!(f, "O3"),
            GroupSpec::Torus(k) => write!(f, "T{k}"),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// Accepts `SU2`, `SO3`, `U2`, `O2`, `O3`, and tori as `T3`, `Torus3` or
    /// `TorusK(3)` (case-insensitive).
    fn from_str(s: &str) -> Result<Self> {
        let u = s.trim().to_ascii_uppercase();
        let spec = match u.as_str() {
            "SU2" | "SU(2)" => GroupSpec::Su2,
            "SO3" | "SO(3)" => GroupSpec::So3,
            "U2" | "U(2)" => GroupSpec::U2,
            "O2" | "O(2)" => GroupSpec::O2,
            "O3" | "O(3)" => GroupSpec::O3,
            _ => {
                let digits = u
                    .strip_prefix("TORUSK(")
                    .and_then(|r| r.strip_suffix(')'))
                    .or_else(|| u.strip_prefix("TORUS"))
                    .or_else(|| u.strip_prefix('T'))
                    .ok_or_else(|| Error::invalid(format!("unknown group `{s}`")))?;
                let k: usize = digits
                    .parse()
                    .map_err(|_| Error::invalid(format!("unknown group `{s}`")))?;
                if k == 0 {
                    return Err(Error::invalid("torus rank must be at least 1"));
                }
                GroupSpec::Torus(k)
            }
        };
        Ok(spec)
    }
}

impl From<GroupSpec> for String {
    fn from(g: GroupSpec) -> String {
        g.to_string()
    }
}

impl TryFrom<String> for GroupSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// A point of one of the supported groups.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    spec: GroupSpec,
    matrix: CMatrix,
}

impl GroupElement {
    /// Validate membership within `τ_group`.
    pub fn new(spec: GroupSpec, matrix: CMatrix) -> Result<Self> {
        let tol = Tolerances::current().group;
        let n = spec.matrix_size();
        if matrix.shape() != (n, n) {
            return Err(Error::invalid(format!(
                "{spec} element must be {n}×{n}, got {}×{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::invalid("matrix has non-finite entries"));
        }
        if !spec.is_complex() && matrix.iter().any(|z| z.im.abs() > tol) {
            return Err(Error::invalid(format!("{spec} element must be real")));
        }
        let defect = (matrix.adjoint() * &matrix - CMatrix::identity(n, n)).norm();
        if defect > tol {
            return Err(Error::invalid(format!(
                "matrix is not in {spec}: ‖M*M − I‖ = {defect:.3e}"
            )));
        }
        let det = matrix.determinant();
        let det_ok = match spec {
            GroupSpec::Su2 | GroupSpec::So3 => (det - ONE).norm() <= tol,
            GroupSpec::U2 => (det.norm() - 1.0).abs() <= tol,
            GroupSpec::O2 | GroupSpec::O3 => (det - ONE).norm() <= tol || (det + ONE).norm() <= tol,
            GroupSpec::Torus(_) => {
                (0..n).all(|i| (0..n).all(|j| i == j || matrix[(i, j)].norm() <= tol))
            }
        };
        if !det_ok {
            return Err(Error::invalid(format!(
                "matrix fails the determinant/shape constraint of {spec} (det = {det})"
            )));
        }
        let mut matrix = matrix;
        if !spec.is_complex() {
            matrix.iter_mut().for_each(|z| z.im = 0.0);
        }
        Ok(GroupElement { spec, matrix })
    }

    pub fn spec(&self) -> GroupSpec {
        self.spec
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn det(&self) -> C64 {
        self.matrix.determinant()
    }

    /// +1 on the identity component, −1 on the other component of O(2)/O(3).
    pub fn component(&self) -> i8 {
        if self.spec.is_connected() || self.det().re > 0.0 {
            1
        } else {
            -1
        }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            spec: self.spec,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            spec: self.spec,
            matrix: &self.matrix * &other.matrix,
        }
    }

    /// Frobenius distance to another element.
    pub fn distance(&self, other: &GroupElement) -> f64 {
        (&self.matrix - &other.matrix).norm()
    }

    pub fn distance_to_identity(&self) -> f64 {
        let n = self.matrix.nrows();
        (&self.matrix - CMatrix::identity(n, n)).norm()
    }

    /// `‖g h − h g‖_F`.
    pub fn commutator_norm(&self, other: &GroupElement) -> f64 {
        (&self.matrix * &other.matrix - &other.matrix * &self.matrix).norm()
    }

    /// `g X g⁻¹`.
    pub fn conjugate_algebra(&self, x: &AlgebraElement) -> AlgebraElement {
        AlgebraElement {
            spec: x.spec,
            matrix: &self.matrix * &x.matrix * self.matrix.adjoint(),
        }
    }

    /// `h g h⁻¹`.
    pub fn conjugated_by(&self, h: &GroupElement) -> GroupElement {
        GroupElement {
            spec: self.spec,
            matrix: &h.matrix * &self.matrix * h.matrix.adjoint(),
        }
    }

    pub(crate) fn from_parts_unchecked(spec: GroupSpec, matrix: CMatrix) -> GroupElement {
        GroupElement { spec, matrix }
    }
}

/// A Lie-algebra vector, stored as a matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    spec: GroupSpec,
    matrix: CMatrix,
}

impl AlgebraElement {
    pub fn new(spec: GroupSpec, matrix: CMatrix) -> Result<Self> {
        let tol = Tolerances::current().group;
        let n = spec.matrix_size();
        if matrix.shape() != (n, n) {
            return Err(Error::invalid("algebra element has the wrong shape"));
        }
        let x = AlgebraElement::from_coords(spec, &spec.coords_of(&matrix));
        let defect = (&x.matrix - &matrix).norm();
        if defect > tol {
            return Err(Error::invalid(format!(
                "matrix is not in the Lie algebra of {spec} (distance {defect:.3e})"
            )));
        }
        Ok(x)
    }

    pub fn from_coords(spec: GroupSpec, coords: &[f64]) -> Self {
        assert_eq!(coords.len(), spec.algebra_dim(), "coordinate count");
        AlgebraElement {
            spec,
            matrix: spec.matrix_from_coords(coords),
        }
    }

    pub fn zero(spec: GroupSpec) -> Self {
        let n = spec.matrix_size();
        AlgebraElement {
            spec,
            matrix: CMatrix::zeros(n, n),
        }
    }

    pub fn spec(&self) -> GroupSpec {
        self.spec
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn coords(&self) -> Vec<f64> {
        self.spec.coords_of(&self.matrix)
    }

    pub fn scaled(&self, t: f64) -> AlgebraElement {
        AlgebraElement {
            spec: self.spec,
            matrix: &self.matrix * Complex::new(t, 0.0),
        }
    }

    pub fn bracket(&self, other: &AlgebraElement) -> AlgebraElement {
        AlgebraElement {
            spec: self.spec,
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        }
    }

    /// Unit-scale norm.
    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }
}

/// `⟨X, Y⟩ = −scale · Re tr(XY)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerProduct {
    pub scale: f64,
}

impl Default for InnerProduct {
    fn default() -> Self {
        InnerProduct { scale: 1.0 }
    }
}

impl InnerProduct {
    pub fn new(scale: f64) -> Result<Self> {
        if scale > 0.0 && scale.is_finite() {
            Ok(InnerProduct { scale })
        } else {
            Err(Error::invalid("inner product scale must be positive"))
        }
    }

    pub fn apply(&self, x: &AlgebraElement, y: &AlgebraElement) -> f64 {
        -self.scale * trace_product(&x.matrix, &y.matrix).re
    }

    /// Inner product of coordinate vectors in the frozen basis.
    pub fn apply_coords(&self, x: &[f64], y: &[f64]) -> f64 {
        self.scale * x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>()
    }
}

/// `tr(AB)` without forming the product.
fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut s = ZERO;
    for i in 0..n {
        for j in 0..n {
            s += a[(i, j)] * b[(j, i)];
        }
    }
    s
}

pub(crate) fn reflection(n: usize) -> CMatrix {
    let mut m = CMatrix::identity(n, n);
    m[(n - 1, n - 1)] = -ONE;
    m
}

fn torus_from_angles(angles: &[f64]) -> GroupElement {
    let k = angles.len();
    let mut m = CMatrix::zeros(k, k);
    for (j, &a) in angles.iter().enumerate() {
        m[(j, j)] = Complex::from_polar(1.0, a);
    }
    GroupElement::from_parts_unchecked(GroupSpec::Torus(k), m)
}

/// Matrix exponential of a complex matrix by scaling and squaring of the
/// Taylor series.
pub fn expm(x: &CMatrix) -> CMatrix {
    let n = x.nrows();
    let norm = x.norm();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let y = x * Complex::new(0.5f64.powi(squarings), 0.0);
    let mut result = CMatrix::identity(n, n);
    let mut term = CMatrix::identity(n, n);
    for k in 1..=30 {
        term = &term * &y * Complex::new(1.0 / k as f64, 0.0);
        result += &term;
        if term.norm() <= f64::EPSILON * 1e-3 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Group exponential.
pub fn exp(x: &AlgebraElement) -> GroupElement {
    let spec = x.spec;
    if let GroupSpec::Torus(_) = spec {
        return torus_from_angles(&x.coords());
    }
    let mut m = expm(&x.matrix);
    if !spec.is_complex() {
        m.iter_mut().for_each(|z| z.im = 0.0);
    }
    GroupElement::from_parts_unchecked(spec, m)
}

/// Principal logarithm (eigenvalue arguments in (−π, π]).
///
/// Fails with [`Error::BranchCut`] for SU2, SO3 and the identity components
/// of O2/O3 when an eigenvalue is within `τ_branch` of −1; U2 and tori always
/// admit the principal branch.
pub fn log(g: &GroupElement) -> Result<AlgebraElement> {
    let spec = g.spec;
    let tol = Tolerances::current();
    if let GroupSpec::Torus(k) = spec {
        let angles: Vec<f64> = (0..k).map(|j| g.matrix[(j, j)].arg()).collect();
        return Ok(AlgebraElement::from_coords(spec, &angles));
    }
    if g.component() < 0 {
        return Err(Error::NotInIdentityComponent);
    }
    let (q, t) = nalgebra::Schur::new(g.matrix.clone()).unpack();
    let ambiguous = !matches!(spec, GroupSpec::U2);
    let n = t.nrows();
    let mut diag = CMatrix::zeros(n, n);
    for j in 0..n {
        let lambda = t[(j, j)];
        let distance = (lambda + ONE).norm();
        if ambiguous && distance < tol.branch {
            return Err(Error::BranchCut { distance });
        }
        diag[(j, j)] = Complex::new(lambda.norm().ln(), lambda.arg());
    }
    let l = &q * diag * q.adjoint();
    Ok(AlgebraElement::from_coords(spec, &spec.coords_of(&l)))
}

/// Matrix of `Ad(g)` on the Lie algebra in the frozen orthonormal basis.
pub fn adjoint_operator(g: &GroupElement) -> DMatrix<f64> {
    let spec = g.spec;
    let d = spec.algebra_dim();
    if spec.is_abelian() {
        return DMatrix::identity(d, d);
    }
    let basis = spec.basis();
    let ginv = g.matrix.adjoint();
    let mut ad = DMatrix::zeros(d, d);
    for (b, e) in basis.iter().enumerate() {
        let conj = &g.matrix * e * &ginv;
        for (a, f) in basis.iter().enumerate() {
            ad[(a, b)] = -trace_product(f, &conj).re;
        }
    }
    ad
}

/// Nearest group element by the polar decomposition, with the determinant
/// fixed up per family (SU2: phase removed; SO3: reflection through the
/// weakest singular direction; O2/O3/U2 untouched). Tori project each
/// diagonal entry onto the unit circle.
pub fn project_to_group(m: &CMatrix, spec: GroupSpec) -> Result<GroupElement> {
    let n = spec.matrix_size();
    if m.shape() != (n, n) {
        return Err(Error::invalid("matrix has the wrong shape for projection"));
    }
    let rank_tol = Tolerances::current().rank;
    if let GroupSpec::Torus(k) = spec {
        let mut out = CMatrix::zeros(k, k);
        let smax = (0..k).map(|j| m[(j, j)].norm()).fold(0.0, f64::max);
        for j in 0..k {
            let z = m[(j, j)];
            if z.norm() <= rank_tol * smax.max(f64::MIN_POSITIVE) {
                return Err(Error::SingularProjection {
                    sigma_min: z.norm(),
                });
            }
            out[(j, j)] = z / z.norm();
        }
        return Ok(GroupElement::from_parts_unchecked(spec, out));
    }
    let svd = m.clone().svd(true, true);
    let sigma = &svd.singular_values;
    let (smin, smax) = (sigma.min(), sigma.max());
    if smax == 0.0 || smin < rank_tol * smax {
        return Err(Error::SingularProjection { sigma_min: smin });
    }
    let mut w = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let mut u = &w * &vt;
    match spec {
        GroupSpec::Su2 => {
            let det = u.determinant();
            u *= Complex::from_polar(1.0, -det.arg() / 2.0);
        }
        GroupSpec::So3 if u.determinant().re < 0.0 => {
            let weakest = sigma.argmin().0;
            let mut col = w.column_mut(weakest);
            col.neg_mut();
            u = &w * &vt;
        }
        _ => {}
    }
    if !spec.is_complex() {
        u.iter_mut().for_each(|z| z.im = 0.0);
    }
    Ok(GroupElement::from_parts_unchecked(spec, u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const FAMILIES: [GroupSpec; 6] = [
        GroupSpec::Su2,
        GroupSpec::So3,
        GroupSpec::U2,
        GroupSpec::O2,
        GroupSpec::O3,
        GroupSpec::Torus(2),
    ];

    fn random_algebra(spec: GroupSpec, scale: f64, rng: &mut ChaCha8Rng) -> AlgebraElement {
        let c: Vec<f64> = (0..spec.algebra_dim())
            .map(|_| rng.random_range(-1.0..1.0) * scale)
            .collect();
        AlgebraElement::from_coords(spec, &c)
    }

    /// Plain truncated Taylor series, only trusted for small arguments.
    fn series_exp(x: &CMatrix, terms: usize) -> CMatrix {
        let n = x.nrows();
        let mut out = CMatrix::identity(n, n);
        let mut term = CMatrix::identity(n, n);
        for k in 1..terms {
            term = &term * x / Complex::new(k as f64, 0.0);
            out += &term;
        }
        out
    }

    #[test]
    fn bases_are_orthonormal_and_dimensioned() {
        let ip = InnerProduct::default();
        for spec in FAMILIES {
            let b = spec.basis();
            assert_eq!(b.len(), spec.algebra_dim());
            for (i, x) in b.iter().enumerate() {
                let x = AlgebraElement::new(spec, x.clone()).unwrap();
                for (j, y) in b.iter().enumerate() {
                    let y = AlgebraElement::new(spec, y.clone()).unwrap();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((ip.apply(&x, &y) - expect).abs() < 1e-15, "{spec}");
                }
            }
        }
    }

    #[test]
    fn exp_of_zero_is_exact_identity() {
        for spec in FAMILIES {
            let g = exp(&AlgebraElement::zero(spec));
            assert_eq!(g.matrix(), spec.identity().matrix());
        }
    }

    #[test]
    fn exp_of_half_turn_diagonal_is_minus_identity() {
        let x = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex::new(0.0, std::f64::consts::PI),
                ZERO,
                ZERO,
                Complex::new(0.0, -std::f64::consts::PI),
            ],
        );
        let g = exp(&AlgebraElement::new(GroupSpec::Su2, x).unwrap());
        assert!((g.matrix() + CMatrix::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn exp_matches_series_and_inverts() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for spec in FAMILIES {
            for _ in 0..100 {
                let x = random_algebra(spec, 1.0, &mut rng);
                let t: f64 = rng.random_range(-3.0..3.0);
                let a = exp(&x.scaled(t));
                let b = exp(&x.scaled(-t));
                assert!(a.mul(&b).distance_to_identity() < 1e-12);
                GroupElement::new(spec, a.matrix().clone()).unwrap();
                let small = x.scaled(1e-2);
                let diff = (expm(small.matrix()) - series_exp(small.matrix(), 12)).norm();
                assert!(diff < 1e-15, "{spec}: {diff}");
            }
        }
    }

    #[test]
    fn log_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for spec in FAMILIES {
            assert!(log(&spec.identity()).unwrap().norm() < 1e-15);
            for _ in 0..100 {
                let mut x = random_algebra(spec, 1.0, &mut rng);
                if x.norm() >= 1.0 {
                    x = x.scaled(0.9 / x.norm());
                }
                let back = log(&exp(&x)).unwrap();
                assert!((back.matrix() - x.matrix()).norm() < 1e-10, "{spec}");
                let g = spec.random_element(1, &mut rng);
                if let Ok(l) = log(&g) {
                    assert!(exp(&l).distance(&g) < 1e-10, "{spec}");
                }
            }
        }
    }

    #[test]
    fn log_refuses_minus_identity_in_su2() {
        let minus = GroupSpec::Su2.scalar(-ONE);
        assert!(matches!(log(&minus), Err(Error::BranchCut { .. })));
        let rotation_pi = GroupElement::new(
            GroupSpec::So3,
            CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![ONE, -ONE, -ONE])),
        )
        .unwrap();
        assert!(matches!(log(&rotation_pi), Err(Error::BranchCut { .. })));
        // U2 has a principal logarithm of −I.
        let l = log(&GroupSpec::U2.scalar(-ONE)).unwrap();
        assert!((exp(&l).matrix() + CMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn adjoint_of_identity_and_torus_rotation() {
        for spec in FAMILIES {
            let d = spec.algebra_dim();
            assert!(
                (adjoint_operator(&spec.identity()) - DMatrix::<f64>::identity(d, d)).norm()
                    < 1e-15
            );
        }
        let theta = 0.37;
        let g = GroupElement::new(
            GroupSpec::Su2,
            CMatrix::from_row_slice(
                2,
                2,
                &[
                    Complex::from_polar(1.0, theta),
                    ZERO,
                    ZERO,
                    Complex::from_polar(1.0, -theta),
                ],
            ),
        )
        .unwrap();
        let ad = adjoint_operator(&g);
        // Direct conjugation of the basis: g (−iσ_x) g⁻¹ = −i(cos 2θ σ_x − sin 2θ σ_y)
        // up to the orientation fixed by the basis, i.e. a rotation by 2θ in the
        // (e_x, e_y) root plane fixing e_z.
        let (c, s) = ((2.0 * theta).cos(), (2.0 * theta).sin());
        let expect = DMatrix::from_row_slice(3, 3, &[c, s, 0.0, -s, c, 0.0, 0.0, 0.0, 1.0]);
        let flipped = DMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0]);
        assert!(
            (&ad - &expect).norm() < 1e-14 || (&ad - &flipped).norm() < 1e-14,
            "{ad}"
        );
        // Independent check of the sense of rotation from the matrices themselves.
        let ex = &GroupSpec::Su2.basis()[0];
        let moved = g.matrix() * ex * g.matrix().adjoint();
        let coords = GroupSpec::Su2.coords_of(&moved);
        assert!((coords[0] - c).abs() < 1e-14);
        assert!((coords[1] - ad[(1, 0)]).abs() < 1e-14);
        assert!((coords[1].abs() - s.abs()).abs() < 1e-14);
    }

    #[test]
    fn adjoint_is_orthogonal_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ip = InnerProduct::default();
        for spec in FAMILIES {
            let d = spec.algebra_dim();
            for _ in 0..1000 {
                let g = spec.random_element(if rng.random_bool(0.5) { 1 } else { -1 }, &mut rng);
                let h = spec.random_element(1, &mut rng);
                let x = random_algebra(spec, 1.0, &mut rng);
                let y = random_algebra(spec, 1.0, &mut rng);
                let lhs = ip.apply(&g.conjugate_algebra(&x), &g.conjugate_algebra(&y));
                assert!((lhs - ip.apply(&x, &y)).abs() <= 1e-10);
                let adg = adjoint_operator(&g);
                let hom = adjoint_operator(&g.mul(&h)) - &adg * adjoint_operator(&h);
                assert!(hom.norm() <= 1e-10);
                let round = &adg * adjoint_operator(&g.inverse()) - DMatrix::<f64>::identity(d, d);
                assert!(round.norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn projection_is_idempotent_and_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = project_to_group(
            &(CMatrix::identity(3, 3) * Complex::new(1.01, 0.0)),
            GroupSpec::So3,
        )
        .unwrap();
        assert!(p.distance_to_identity() < 1e-15);
        for spec in FAMILIES {
            let n = spec.matrix_size();
            for _ in 0..100 {
                let g = spec.random_element(if rng.random_bool(0.5) { 1 } else { -1 }, &mut rng);
                let again = project_to_group(g.matrix(), spec).unwrap();
                assert!(again.distance(&g) < 1e-14);
                let noise = CMatrix::from_fn(n, n, |i, j| {
                    let re = rng.random_range(-1.0..1.0);
                    let im = if spec.is_complex() {
                        rng.random_range(-1.0..1.0)
                    } else {
                        0.0
                    };
                    // Tori only carry diagonal entries.
                    if matches!(spec, GroupSpec::Torus(_)) && i != j {
                        ZERO
                    } else {
                        Complex::new(re, im)
                    }
                });
                let noise = &noise * Complex::new(1e-3 / noise.norm(), 0.0);
                let p = project_to_group(&(g.matrix() + noise), spec).unwrap();
                assert!(p.distance(&g) < 2e-3);
                GroupElement::new(spec, p.matrix().clone()).unwrap();
            }
        }
        assert!(matches!(
            project_to_group(&CMatrix::zeros(2, 2), GroupSpec::Su2),
            Err(Error::SingularProjection { .. })
        ));
    }

    #[test]
    fn membership_validation() {
        assert!(GroupElement::new(GroupSpec::Su2, CMatrix::identity(3, 3)).is_err());
        let refl = reflection(2);
        assert!(GroupElement::new(GroupSpec::O2, refl.clone()).is_ok());
        assert!(GroupElement::new(GroupSpec::Su2, refl).is_err());
        let scaled = CMatrix::identity(2, 2) * Complex::new(1.1, 0.0);
        assert!(GroupElement::new(GroupSpec::U2, scaled).is_err());
    }

    #[test]
    fn group_names_parse() {
        for spec in FAMILIES {
            assert_eq!(spec.to_string().parse::<GroupSpec>().unwrap(), spec);
        }
        assert_eq!(
            "TorusK(3)".parse::<GroupSpec>().unwrap(),
            GroupSpec::Torus(3)
        );
        assert!("SU7".parse::<GroupSpec>().is_err());
        assert!("T0".parse::<GroupSpec>().is_err());
    }

    #[test]
    fn random_elements_respect_components() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for spec in [GroupSpec::O2, GroupSpec::O3] {
            for comp in [1i8, -1] {
                let g = spec.random_element(comp, &mut rng);
                assert_eq!(g.component(), comp);
                GroupElement::new(spec, g.matrix().clone()).unwrap();
            }
        }
    }
}
