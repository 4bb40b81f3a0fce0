//! Independent checks of the cochain complex: Fox derivatives assembled by
//! hand, and finite differences of the relator map.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ymstrata::liegroup::{adjoint_operator, exp, AlgebraElement, CMatrix, GroupElement, GroupSpec};
use ymstrata::surface::{differentials, BundleData, Representation};
use ymstrata::variety::{solve, SolverConfig};

/// `∂r/∂x_i` under `Ad∘ρ`: each occurrence of `x_i` contributes
/// `+Ad(ρ(prefix))`, each occurrence of `x_i⁻¹` contributes
/// `−Ad(ρ(prefix · x_i⁻¹))`.
fn fox_d1(rho: &Representation) -> DMatrix<f64> {
    let spec = rho.spec();
    let d = spec.algebra_dim();
    let hol = rho.holonomies();
    let n = hol.len();
    let mut out = DMatrix::zeros(d, d * n);
    let mut prefix = spec.identity();
    for letter in rho.bundle().relator().letters() {
        let g = &hol[letter.generator];
        let mut block = out.view_mut((0, letter.generator * d), (d, d));
        if letter.exponent > 0 {
            block += adjoint_operator(&prefix);
            prefix = prefix.mul(g);
        } else {
            prefix = prefix.mul(&g.inverse());
            block -= adjoint_operator(&prefix);
        }
    }
    out
}

fn relator_map(rho: &Representation, hol: &[GroupElement]) -> DVector<f64> {
    let spec = rho.spec();
    let n = spec.matrix_size();
    let mut mu = spec.identity();
    for pair in hol.chunks(2) {
        mu = mu
            .mul(&pair[0])
            .mul(&pair[1])
            .mul(&pair[0].inverse())
            .mul(&pair[1].inverse());
    }
    let m = mu.mul(&rho.bundle().central().inverse()).into_matrix() - CMatrix::identity(n, n);
    DVector::from_vec(spec.coords_of(&m))
}

fn moved(rho: &Representation, u: &DVector<f64>, eps: f64) -> Vec<GroupElement> {
    let spec = rho.spec();
    let d = spec.algebra_dim();
    rho.holonomies()
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let x: Vec<f64> = u.rows(i * d, d).iter().map(|v| v * eps).collect();
            exp(&AlgebraElement::from_coords(spec, &x)).mul(g)
        })
        .collect()
}

fn families() -> Vec<GroupSpec> {
    vec![
        GroupSpec::Su2,
        GroupSpec::So3,
        GroupSpec::U2,
        GroupSpec::O2,
        GroupSpec::O3,
        GroupSpec::Torus(2),
    ]
}

#[test]
fn d1_matches_fox_derivatives() {
    for spec in families() {
        for genus in 1..=3 {
            let bundle = BundleData::flat(spec, genus).unwrap();
            for seed in 0..5 {
                let rho = solve(&bundle, &SolverConfig::with_seed(seed), None).unwrap();
                let err = (differentials(&rho).d1 - fox_d1(&rho)).norm();
                assert!(err < 1e-12, "{spec} genus {genus}: {err}");
            }
        }
    }
}

#[test]
fn d1_matches_fox_derivatives_off_the_variety() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let bundle = BundleData::flat(GroupSpec::Su2, 2).unwrap();
    let hol: Vec<GroupElement> = (0..4)
        .map(|_| GroupSpec::Su2.random_element(1, &mut rng))
        .collect();
    let rho = Representation::candidate(bundle, hol).unwrap();
    let err = (differentials(&rho).d1 - fox_d1(&rho)).norm();
    assert!(err < 1e-12, "{err}");
}

#[test]
fn d1_d0_vanishes_on_solutions() {
    for spec in families() {
        let rho = solve(
            &BundleData::flat(spec, 2).unwrap(),
            &SolverConfig::with_seed(3),
            None,
        )
        .unwrap();
        let d = differentials(&rho);
        assert!((&d.d1 * &d.d0).norm() < 1e-10, "{spec}");
    }
}

#[test]
fn relator_derivative_is_d1() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for spec in [GroupSpec::Su2, GroupSpec::So3, GroupSpec::U2] {
        let rho = solve(
            &BundleData::flat(spec, 2).unwrap(),
            &SolverConfig::with_seed(5),
            None,
        )
        .unwrap();
        let d1 = differentials(&rho).d1;
        let u = DVector::from_fn(rho.cochain_dim(), |_, _| rng.random_range(-1.0..1.0));
        let f0 = relator_map(&rho, rho.holonomies());
        let err =
            |eps: f64| (relator_map(&rho, &moved(&rho, &u, eps)) - &f0 - &d1 * &u * eps).norm();
        let ratio = err(1e-3) / err(5e-4);
        assert!(ratio > 3.6 && ratio < 4.4, "{spec}: {ratio}");
    }
}

#[test]
fn adjoint_is_orthogonal_and_multiplicative() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for spec in families() {
        for _ in 0..20 {
            let a = spec.random_element(1, &mut rng);
            let b = spec.random_element(if spec.is_connected() { 1 } else { -1 }, &mut rng);
            let (ad_a, ad_b) = (adjoint_operator(&a), adjoint_operator(&b));
            let d = ad_a.nrows();
            assert!((ad_a.transpose() * &ad_a - DMatrix::identity(d, d)).norm() < 1e-12);
            assert!((adjoint_operator(&a.mul(&b)) - ad_a * ad_b).norm() < 1e-12);
        }
    }
}
