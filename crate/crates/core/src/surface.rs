//! The standard presentation of a closed surface group, representations into
//! the supported groups, and the twisted cochain complex
//! `g --d0--> g^{2ℓ} --d1--> g` of the presentation 2-complex with
//! coefficients in `g` through `Ad ∘ ρ`.
//!
//! Cochains are stored as flat coordinate vectors: block `i` (of length
//! `dim g`) holds the value on generator `i` in the order
//! `x_1, y_1, …, x_ℓ, y_ℓ`. Values on words follow the crossed-homomorphism
//! rule `u(ab) = u(a) + Ad(ρ(a)) u(b)`, `u(x⁻¹) = −Ad(ρ(x))⁻¹ u(x)`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liegroup::{adjoint_operator, AlgebraElement, GroupElement, GroupSpec};
use crate::linalg;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    /// Zero-based generator index.
    pub generator: usize,
    /// +1 or −1.
    pub exponent: i8,
}

impl Letter {
    pub fn new(generator: usize, exponent: i8) -> Self {
        assert!(exponent == 1 || exponent == -1, "exponent must be ±1");
        Letter {
            generator,
            exponent,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word { letters }
    }

    pub fn identity() -> Self {
        Word::default()
    }

    pub fn generator(i: usize) -> Self {
        Word::new(vec![Letter::new(i, 1)])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self
                .letters
                .iter()
                .rev()
                .map(|l| Letter::new(l.generator, -l.exponent))
                .collect(),
        }
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.letters.iter().map(|l| l.generator).max()
    }
}

/// Canonical generator name: index 0 → `x1`, 1 → `y1`, 2 → `x2`, …
pub fn generator_name(i: usize) -> String {
    format!(
        "{}{}",
        if i.is_multiple_of(2) { 'x' } else { 'y' },
        i / 2 + 1
    )
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for l in &self.letters {
            write!(f, "{}", generator_name(l.generator))?;
            if l.exponent < 0 {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}

/// `⟨x_1, y_1, …, x_ℓ, y_ℓ | ∏ x_j y_j x_j⁻¹ y_j⁻¹⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfacePresentation {
    pub genus: usize,
    pub relator: Word,
}

impl SurfacePresentation {
    pub fn generator_count(&self) -> usize {
        2 * self.genus
    }

    pub fn generator_names(&self) -> Vec<String> {
        (0..self.generator_count()).map(generator_name).collect()
    }
}

pub fn presentation(genus: usize) -> Result<SurfacePresentation> {
    if genus == 0 {
        return Err(Error::invalid("genus must be at least 1"));
    }
    Ok(SurfacePresentation {
        genus,
        relator: relator_word(genus),
    })
}

fn relator_word(genus: usize) -> Word {
    let mut letters = Vec::with_capacity(4 * genus);
    for j in 0..genus {
        let (x, y) = (2 * j, 2 * j + 1);
        letters.extend([
            Letter::new(x, 1),
            Letter::new(y, 1),
            Letter::new(x, -1),
            Letter::new(y, -1),
        ]);
    }
    Word::new(letters)
}

/// Topological type of the bundle: target group, genus, the central value of
/// the relator, and for disconnected groups the component assignment of the
/// generators.
#[derive(Debug, Clone, PartialEq)]
pub struct BundleData {
    spec: GroupSpec,
    genus: usize,
    central: GroupElement,
    phi: Option<Vec<i8>>,
}

impl BundleData {
    pub fn new(
        spec: GroupSpec,
        genus: usize,
        central: GroupElement,
        phi: Option<Vec<i8>>,
    ) -> Result<Self> {
        if genus == 0 {
            return Err(Error::invalid("genus must be at least 1"));
        }
        if central.spec() != spec {
            return Err(Error::invalid(
                "central target belongs to a different group",
            ));
        }
        if !spec.is_central(&central) {
            return Err(Error::invalid(format!(
                "central target must lie in the centre {} of {spec}",
                spec.center_description()
            )));
        }
        match (&phi, spec.is_connected()) {
            (Some(_), true) => {
                return Err(Error::invalid(format!(
                    "{spec} is connected; no component map allowed"
                )))
            }
            (None, false) => {
                return Err(Error::invalid(format!(
                    "{spec} is disconnected; a component map is required"
                )))
            }
            (Some(p), false) => {
                if p.len() != 2 * genus {
                    return Err(Error::invalid(format!(
                        "component map needs {} entries, got {}",
                        2 * genus,
                        p.len()
                    )));
                }
                if p.iter().any(|&s| s != 1 && s != -1) {
                    return Err(Error::invalid("component map entries must be ±1"));
                }
                if p.iter().all(|&s| s == 1) {
                    return Err(Error::invalid(
                        "component map must be non-trivial (connected total space)",
                    ));
                }
            }
            (None, true) => {}
        }
        Ok(BundleData {
            spec,
            genus,
            central,
            phi,
        })
    }

    /// `c = I`; disconnected groups get `φ(x_1) = −1`, `φ = +1` elsewhere.
    pub fn flat(spec: GroupSpec, genus: usize) -> Result<Self> {
        let phi = (!spec.is_connected()).then(|| default_phi(genus));
        BundleData::new(spec, genus, spec.identity(), phi)
    }

    pub fn spec(&self) -> GroupSpec {
        self.spec
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn central(&self) -> &GroupElement {
        &self.central
    }

    pub fn phi(&self) -> Option<&[i8]> {
        self.phi.as_deref()
    }

    pub fn generator_count(&self) -> usize {
        2 * self.genus
    }

    pub fn relator(&self) -> Word {
        relator_word(self.genus)
    }

    /// Component prescribed for generator `i` (always +1 when connected).
    pub fn component_of(&self, i: usize) -> i8 {
        self.phi.as_ref().map_or(1, |p| p[i])
    }

    pub fn is_flat(&self) -> bool {
        self.central.distance_to_identity() <= Tolerances::current().group
    }
}

pub fn default_phi(genus: usize) -> Vec<i8> {
    let mut p = vec![1; 2 * genus];
    p[0] = -1;
    p
}

/// A point of `Hom_ξ(Γ, G)`: holonomies `(u_1, v_1, …, u_ℓ, v_ℓ)` with
/// `∏[u_j, v_j] = c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    bundle: BundleData,
    holonomies: Vec<GroupElement>,
}

impl Representation {
    /// Validated constructor: group membership, prescribed components and
    /// relator residual within `τ_rep`.
    pub fn new(bundle: BundleData, holonomies: Vec<GroupElement>) -> Result<Self> {
        let rep = Representation::candidate(bundle, holonomies)?;
        let r = rep.residual();
        if r > Tolerances::current().rep {
            return Err(Error::invalid(format!(
                "holonomies violate the relator equation (residual {r:.3e})"
            )));
        }
        Ok(rep)
    }

    /// Checks membership and components but not the relator equation.
    pub fn candidate(bundle: BundleData, holonomies: Vec<GroupElement>) -> Result<Self> {
        if holonomies.len() != bundle.generator_count() {
            return Err(Error::invalid(format!(
                "expected {} holonomies, got {}",
                bundle.generator_count(),
                holonomies.len()
            )));
        }
        let holonomies = holonomies
            .into_iter()
            .enumerate()
            .map(|(i, g)| {
                if g.spec() != bundle.spec {
                    return Err(Error::invalid(format!(
                        "holonomy {} is in the wrong group",
                        generator_name(i)
                    )));
                }
                let g = GroupElement::new(bundle.spec, g.into_matrix())?;
                if g.component() != bundle.component_of(i) {
                    return Err(Error::invalid(format!(
                        "holonomy {} is not in the component prescribed by φ",
                        generator_name(i)
                    )));
                }
                Ok(g)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Representation { bundle, holonomies })
    }

    #[cfg(test)]
    pub(crate) fn from_parts_unchecked(bundle: BundleData, holonomies: Vec<GroupElement>) -> Self {
        Representation { bundle, holonomies }
    }

    pub fn bundle(&self) -> &BundleData {
        &self.bundle
    }

    pub fn spec(&self) -> GroupSpec {
        self.bundle.spec
    }

    pub fn genus(&self) -> usize {
        self.bundle.genus
    }

    pub fn holonomies(&self) -> &[GroupElement] {
        &self.holonomies
    }

    /// `‖μ(ρ) c⁻¹ − I‖_F`.
    pub fn residual(&self) -> f64 {
        relator_residual(&self.bundle, &self.holonomies)
    }

    /// `h ρ h⁻¹`.
    pub fn conjugated_by(&self, h: &GroupElement) -> Representation {
        Representation {
            bundle: self.bundle.clone(),
            holonomies: self.holonomies.iter().map(|g| g.conjugated_by(h)).collect(),
        }
    }

    /// Adjoint matrices of the holonomies.
    pub fn adjoints(&self) -> Vec<DMatrix<f64>> {
        self.holonomies.iter().map(adjoint_operator).collect()
    }

    pub fn cochain_dim(&self) -> usize {
        self.holonomies.len() * self.spec().algebra_dim()
    }
}

pub(crate) fn relator_residual(bundle: &BundleData, holonomies: &[GroupElement]) -> f64 {
    let mu = evaluate_holonomies(bundle.spec, holonomies, &bundle.relator());
    mu.mul(&bundle.central.inverse()).distance_to_identity()
}

fn evaluate_holonomies(spec: GroupSpec, holonomies: &[GroupElement], w: &Word) -> GroupElement {
    let mut acc = spec.identity();
    for l in w.letters() {
        let g = &holonomies[l.generator];
        acc = if l.exponent > 0 {
            acc.mul(g)
        } else {
            acc.mul(&g.inverse())
        };
    }
    acc
}

pub fn evaluate_word(rho: &Representation, w: &Word) -> Result<GroupElement> {
    if let Some(m) = w.max_generator() {
        if m >= rho.holonomies.len() {
            return Err(Error::invalid(format!(
                "word uses generator {} beyond the presentation",
                m + 1
            )));
        }
    }
    Ok(evaluate_holonomies(rho.spec(), &rho.holonomies, w))
}

pub fn relator_value(rho: &Representation) -> GroupElement {
    evaluate_holonomies(rho.spec(), &rho.holonomies, &rho.bundle.relator())
}

/// Value of the crossed homomorphism determined by the cochain `u` on `w`,
/// given the adjoint matrices of the holonomies. Coordinates in the frozen
/// basis.
pub(crate) fn extend_cochain(ads: &[DMatrix<f64>], u: &DVector<f64>, w: &Word) -> DVector<f64> {
    let d = ads.first().map_or(0, |a| a.nrows());
    let mut prefix = DMatrix::<f64>::identity(d, d);
    let mut value = DVector::zeros(d);
    for l in w.letters() {
        let ui = u.rows(l.generator * d, d);
        let ad = &ads[l.generator];
        if l.exponent > 0 {
            value += &prefix * ui;
            prefix = &prefix * ad;
        } else {
            let ad_inv = ad.transpose();
            value -= &prefix * (&ad_inv * ui);
            prefix = &prefix * ad_inv;
        }
    }
    value
}

pub fn crossed_extension(
    rho: &Representation,
    u: &DVector<f64>,
    w: &Word,
) -> Result<AlgebraElement> {
    if u.len() != rho.cochain_dim() {
        return Err(Error::invalid("cochain has the wrong length"));
    }
    if let Some(m) = w.max_generator() {
        if m >= rho.holonomies.len() {
            return Err(Error::invalid(
                "word uses a generator beyond the presentation",
            ));
        }
    }
    let v = extend_cochain(&rho.adjoints(), u, w);
    Ok(AlgebraElement::from_coords(rho.spec(), v.as_slice()))
}

/// The two coboundary maps of the presentation complex.
#[derive(Debug, Clone)]
pub struct Differentials {
    /// `(2ℓ·d) × d`, block `i` is `Ad(ρ(g_i)) − I`.
    pub d0: DMatrix<f64>,
    /// `d × (2ℓ·d)`, `u ↦ u(r)`.
    pub d1: DMatrix<f64>,
}

pub(crate) fn d0_from_adjoints(ads: &[DMatrix<f64>]) -> DMatrix<f64> {
    let d = ads.first().map_or(0, |a| a.nrows());
    let blocks: Vec<DMatrix<f64>> = ads.iter().map(|a| a - DMatrix::identity(d, d)).collect();
    linalg::vstack(&blocks, d)
}

/// `d1` assembled column by column from the crossed-extension rule.
pub(crate) fn d1_from_adjoints(ads: &[DMatrix<f64>], relator: &Word) -> DMatrix<f64> {
    let d = ads.first().map_or(0, |a| a.nrows());
    let n = ads.len() * d;
    let mut d1 = DMatrix::zeros(d, n);
    let mut basis = DVector::zeros(n);
    for col in 0..n {
        basis[col] = 1.0;
        d1.set_column(col, &extend_cochain(ads, &basis, relator));
        basis[col] = 0.0;
    }
    d1
}

/// Coboundary `ξ ↦ (Ad(ρ(g_i))ξ − ξ)_i` and the relator derivative `d1`.
///
/// The coboundary uses `Ad(ρ(g))`, not its inverse, so that it is a crossed
/// homomorphism for the same rule as [`crossed_extension`] and `d1 ∘ d0 = 0`.
pub fn differentials(rho: &Representation) -> Differentials {
    let ads = rho.adjoints();
    Differentials {
        d0: d0_from_adjoints(&ads),
        d1: d1_from_adjoints(&ads, &rho.bundle.relator()),
    }
}

/// Twisted cohomology of the presentation complex with harmonic
/// representatives: `H⁰ = ker d0`, `H¹ = ker d1 ∩ (im d0)^⊥`,
/// `H² = (im d1)^⊥`. Bases are orthonormal columns.
#[derive(Debug, Clone)]
pub struct TwistedCohomology {
    pub d0: DMatrix<f64>,
    pub d1: DMatrix<f64>,
    pub h0: usize,
    pub h1: usize,
    pub h2: usize,
    pub harmonic0: DMatrix<f64>,
    pub harmonic1: DMatrix<f64>,
    pub harmonic2: DMatrix<f64>,
    pub rank_d0: usize,
    pub rank_d1: usize,
    /// Orthonormal basis of `ker d1` (cocycles, including coboundaries).
    pub cocycles: DMatrix<f64>,
}

impl TwistedCohomology {
    pub fn euler_characteristic(&self) -> i64 {
        self.h0 as i64 - self.h1 as i64 + self.h2 as i64
    }
}

pub fn cohomology(rho: &Representation) -> Result<TwistedCohomology> {
    let Differentials { d0, d1 } = differentials(rho);
    cohomology_from(d0, d1)
}

pub(crate) fn cohomology_from(d0: DMatrix<f64>, d1: DMatrix<f64>) -> Result<TwistedCohomology> {
    let rel = Tolerances::current().rank;
    let d = d0.ncols();
    let n = d1.ncols();

    let (s0, v0) = linalg::right_svd(&d0);
    let rank_d0 = linalg::strict_rank(&s0, rel, "d0")?;
    let (s1, v1) = linalg::right_svd(&d1);
    let rank_d1 = linalg::strict_rank(&s1, rel, "d1")?;

    let h0 = d - rank_d0;
    let h2 = d - rank_d1;
    let kernel_dim = n - rank_d1;
    if rank_d0 > kernel_dim {
        return Err(Error::invalid("rank of d0 exceeds the dimension of ker d1"));
    }
    let h1 = kernel_dim - rank_d0;

    let harmonic0 = linalg::trailing_right_vectors(&v0, h0);
    let cocycles = linalg::trailing_right_vectors(&v1, kernel_dim);
    let harmonic1 = if h1 == 0 {
        DMatrix::zeros(n, 0)
    } else {
        let restricted = d0.transpose() * &cocycles;
        &cocycles * linalg::kernel_of_dim(&restricted, h1)
    };
    let harmonic2 = linalg::kernel_of_dim(&d1.transpose(), h2);

    Ok(TwistedCohomology {
        d0,
        d1,
        h0,
        h1,
        h2,
        harmonic0,
        harmonic1,
        harmonic2,
        rank_d0,
        rank_d1,
        cocycles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liegroup::{CMatrix, C64};
    use nalgebra::Complex;
    use rand::SeedableRng;
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

    fn minus_i() -> GroupElement {
        GroupSpec::Su2.scalar(C64::new(-1.0, 0.0))
    }

    #[test]
    fn relator_shapes() {
        let p1 = presentation(1).unwrap();
        assert_eq!(p1.relator.to_string(), "x1y1x1^-1y1^-1");
        assert_eq!(p1.relator.len(), 4);
        assert_eq!(presentation(2).unwrap().relator.len(), 8);
        let p3 = presentation(3).unwrap();
        assert_eq!(p3.generator_count(), 6);
        assert_eq!(p3.relator.len(), 12);
        assert_eq!(p3.generator_names()[5], "y3");
        assert!(presentation(0).is_err());
    }

    #[test]
    fn bundle_validation() {
        let spec = GroupSpec::Su2;
        assert!(BundleData::new(spec, 1, torus_su2(0.3), None).is_err());
        assert!(BundleData::new(spec, 1, minus_i(), None).is_ok());
        assert!(BundleData::new(GroupSpec::O2, 2, GroupSpec::O2.identity(), None).is_err());
        assert!(
            BundleData::new(GroupSpec::O2, 2, GroupSpec::O2.identity(), Some(vec![1; 4])).is_err()
        );
        assert!(BundleData::new(
            GroupSpec::O2,
            2,
            GroupSpec::O2.identity(),
            Some(vec![-1, 1, 1, 1])
        )
        .is_ok());
        assert!(BundleData::new(spec, 2, spec.identity(), Some(vec![-1, 1, 1, 1])).is_err());
    }

    #[test]
    fn word_evaluation() {
        let bundle = BundleData::new(GroupSpec::Su2, 1, minus_i(), None).unwrap();
        let rho = Representation::new(bundle, vec![i_sigma_x(), i_sigma_y()]).unwrap();
        assert_eq!(
            evaluate_word(&rho, &Word::identity()).unwrap(),
            GroupSpec::Su2.identity()
        );
        assert_eq!(
            evaluate_word(&rho, &Word::generator(0)).unwrap(),
            i_sigma_x()
        );
        assert!((relator_value(&rho).matrix() + CMatrix::identity(2, 2)).norm() < 1e-15);
        let w1 = Word::new(vec![Letter::new(0, 1), Letter::new(1, -1)]);
        let w2 = Word::new(vec![Letter::new(1, 1), Letter::new(0, 1)]);
        let lhs = evaluate_word(&rho, &w1.concat(&w2)).unwrap();
        let rhs = evaluate_word(&rho, &w1)
            .unwrap()
            .mul(&evaluate_word(&rho, &w2).unwrap());
        assert!(lhs.distance(&rhs) < 1e-15);
        assert!(evaluate_word(&rho, &Word::generator(2)).is_err());
    }

    #[test]
    fn abelian_and_central_relators_are_trivial() {
        let bundle = BundleData::flat(GroupSpec::Su2, 2).unwrap();
        let rho = Representation::new(
            bundle.clone(),
            vec![
                torus_su2(0.1),
                torus_su2(2.0),
                torus_su2(-0.7),
                torus_su2(1.3),
            ],
        )
        .unwrap();
        assert!(relator_value(&rho).distance_to_identity() < 1e-15);
        let rho = Representation::new(
            bundle.clone(),
            vec![minus_i(), GroupSpec::Su2.identity(), minus_i(), minus_i()],
        )
        .unwrap();
        assert_eq!(relator_value(&rho).distance_to_identity(), 0.0);
        assert!(Representation::new(
            BundleData::flat(GroupSpec::Su2, 1).unwrap(),
            vec![i_sigma_x(), i_sigma_y()]
        )
        .is_err());
    }

    #[test]
    fn crossed_extension_rules() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bundle = BundleData::flat(GroupSpec::So3, 2).unwrap();
        let hol: Vec<GroupElement> = (0..4)
            .map(|_| GroupSpec::So3.random_element(1, &mut rng))
            .collect();
        let rho = Representation::from_parts_unchecked(bundle, hol);
        let u = DVector::from_fn(12, |i, _| (i as f64 * 0.37).sin());
        let single = crossed_extension(&rho, &u, &Word::generator(2)).unwrap();
        assert!((DVector::from_vec(single.coords()) - u.rows(6, 3)).norm() < 1e-15);
        let cancel = Word::new(vec![Letter::new(1, 1), Letter::new(1, -1)]);
        assert!(crossed_extension(&rho, &u, &cancel).unwrap().norm() < 1e-14);
        // u(ab) = u(a) + Ad(a) u(b)
        let a = Word::new(vec![Letter::new(0, 1), Letter::new(3, -1)]);
        let b = Word::new(vec![Letter::new(2, -1), Letter::new(1, 1)]);
        let ua = DVector::from_vec(crossed_extension(&rho, &u, &a).unwrap().coords());
        let ub = DVector::from_vec(crossed_extension(&rho, &u, &b).unwrap().coords());
        let uab = DVector::from_vec(crossed_extension(&rho, &u, &a.concat(&b)).unwrap().coords());
        let ad_a = adjoint_operator(&evaluate_word(&rho, &a).unwrap());
        assert!((uab - (ua + ad_a * ub)).norm() < 1e-14);
    }

    #[test]
    fn trivial_rep_has_zero_differentials() {
        for genus in 1..=3 {
            let bundle = BundleData::flat(GroupSpec::Su2, genus).unwrap();
            let rho =
                Representation::new(bundle, vec![GroupSpec::Su2.identity(); 2 * genus]).unwrap();
            let diff = differentials(&rho);
            assert!(diff.d0.norm() < 1e-14 && diff.d1.norm() < 1e-14);
            let h = cohomology(&rho).unwrap();
            assert_eq!((h.h0, h.h1, h.h2), (3, 6 * genus, 3));
        }
    }

    #[test]
    fn torus_rep_differentials_split() {
        let bundle = BundleData::flat(GroupSpec::Su2, 2).unwrap();
        let rho = Representation::new(
            bundle,
            vec![
                torus_su2(0.4),
                torus_su2(1.1),
                torus_su2(-0.9),
                torus_su2(2.5),
            ],
        )
        .unwrap();
        let Differentials { d0, d1 } = differentials(&rho);
        // The torus direction is e_z (index 2): no mixing with the root plane.
        for i in 0..4 {
            for r in 0..2 {
                assert!(d0[(3 * i + r, 2)].abs() < 1e-15);
                assert!(d0[(3 * i + 2, r)].abs() < 1e-15);
                assert!(d1[(2, 3 * i + r)].abs() < 1e-15);
                assert!(d1[(r, 3 * i + 2)].abs() < 1e-15);
            }
        }
        let h = cohomology(&rho).unwrap();
        assert_eq!((h.h0, h.h1, h.h2), (1, 8, 1));
    }

    #[test]
    fn coboundary_extends_to_zero_on_relator() {
        let bundle = BundleData::new(GroupSpec::Su2, 1, minus_i(), None).unwrap();
        let rho = Representation::new(bundle, vec![i_sigma_x(), i_sigma_y()]).unwrap();
        let Differentials { d0, d1 } = differentials(&rho);
        let xi = DVector::from_vec(vec![0.3, -1.2, 0.5]);
        let u = &d0 * &xi;
        let at_r = crossed_extension(&rho, &u, &rho.bundle().relator()).unwrap();
        assert!(at_r.norm() < 1e-14);
        assert!((&d1 * &d0).norm() < 1e-14);
        let h = cohomology(&rho).unwrap();
        assert_eq!((h.h0, h.h1, h.h2), (0, 0, 0));
    }
}
