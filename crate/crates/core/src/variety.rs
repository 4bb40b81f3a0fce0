//! Points of the representation variety: the relator-equation solver, random
//! tangent perturbations, and the maps between SU2, SO3, U2 and O3 varieties.

use log::debug;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liegroup::{
    adjoint_operator, exp, project_to_group, AlgebraElement, CMatrix, GroupElement, GroupSpec, C64,
};
use crate::linalg;
use crate::surface::{self, BundleData, Representation};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub residual_target: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 500,
            residual_target: 1e-12,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn with_seed(seed: u64) -> Self {
        SolverConfig {
            seed,
            ..Self::default()
        }
    }
}

/// `‖μ(ρ) c⁻¹ − I‖_F`.
pub fn residual(rho: &Representation) -> f64 {
    rho.residual()
}

/// Random holonomies in the components prescribed by the bundle.
pub fn random_holonomies<R: Rng + ?Sized>(bundle: &BundleData, rng: &mut R) -> Vec<GroupElement> {
    (0..bundle.generator_count())
        .map(|i| bundle.spec().random_element(bundle.component_of(i), rng))
        .collect()
}

/// Find a point of the variety. Without an initial guess the holonomies are
/// drawn from the seeded generator.
pub fn solve(
    bundle: &BundleData,
    cfg: &SolverConfig,
    initial: Option<Vec<GroupElement>>,
) -> Result<Representation> {
    if cfg.residual_target >= Tolerances::current().rep {
        return Err(Error::invalid(
            "residual target must be below the representation tolerance",
        ));
    }
    let holonomies = match initial {
        Some(h) => Representation::candidate(bundle.clone(), h)?
            .holonomies()
            .to_vec(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            random_holonomies(bundle, &mut rng)
        }
    };
    refine(bundle, holonomies, cfg)
}

/// Gauss-Newton on the right-translated relator residual with backtracking,
/// falling back to steepest descent. Holonomies move by `g ← P((I + X) g)`
/// with `P` the projection onto the group, so components are preserved.
fn refine(
    bundle: &BundleData,
    mut holonomies: Vec<GroupElement>,
    cfg: &SolverConfig,
) -> Result<Representation> {
    let spec = bundle.spec();
    let relator = bundle.relator();
    let c_inv = bundle.central().inverse();
    let mut r = surface::relator_residual(bundle, &holonomies);
    for iter in 0..cfg.max_iters {
        if r <= cfg.residual_target {
            break;
        }
        let ads: Vec<DMatrix<f64>> = holonomies.iter().map(adjoint_operator).collect();
        let jac = surface::d1_from_adjoints(&ads, &relator);
        let mu = relator_product(spec, &holonomies).mul(&c_inv);
        let n = spec.matrix_size();
        let err = DVector::from_vec(spec.coords_of(&(mu.matrix() - CMatrix::identity(n, n))));

        let gn = -linalg::lstsq(&jac, &err, 1e-10);
        if let Some((h, r_new)) = line_search(bundle, &holonomies, &gn, r) {
            holonomies = h;
            r = r_new;
            continue;
        }
        let descent = -(jac.transpose() * &err);
        if let Some((h, r_new)) = line_search(bundle, &holonomies, &descent, r) {
            debug!("iteration {iter}: gradient fallback");
            holonomies = h;
            r = r_new;
            continue;
        }
        debug!("iteration {iter}: stagnated at residual {r:.3e}");
        return Err(Error::NoConvergence { final_residual: r });
    }
    if r > cfg.residual_target {
        return Err(Error::NoConvergence { final_residual: r });
    }
    Representation::new(bundle.clone(), holonomies)
}

fn relator_product(spec: GroupSpec, holonomies: &[GroupElement]) -> GroupElement {
    let mut acc = spec.identity();
    for pair in holonomies.chunks(2) {
        let (u, v) = (&pair[0], &pair[1]);
        acc = acc.mul(u).mul(v).mul(&u.inverse()).mul(&v.inverse());
    }
    acc
}

fn apply_step(
    spec: GroupSpec,
    holonomies: &[GroupElement],
    step: &DVector<f64>,
    alpha: f64,
) -> Option<Vec<GroupElement>> {
    let d = spec.algebra_dim();
    let n = spec.matrix_size();
    holonomies
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let coords: Vec<f64> = step.rows(i * d, d).iter().map(|x| x * alpha).collect();
            let x = spec.matrix_from_coords(&coords);
            let moved = (CMatrix::identity(n, n) + x) * g.matrix();
            project_to_group(&moved, spec).ok()
        })
        .collect()
}

fn line_search(
    bundle: &BundleData,
    holonomies: &[GroupElement],
    step: &DVector<f64>,
    r: f64,
) -> Option<(Vec<GroupElement>, f64)> {
    if step.norm() == 0.0 || !step.iter().all(|x| x.is_finite()) {
        return None;
    }
    let mut alpha = 1.0;
    for _ in 0..40 {
        if let Some(h) = apply_step(bundle.spec(), holonomies, step, alpha) {
            let r_new = surface::relator_residual(bundle, &h);
            if r_new < r {
                return Some((h, r_new));
            }
        }
        alpha *= 0.5;
    }
    None
}

/// Random move along a cocycle direction followed by a re-solve. The
/// direction is a unit-norm Gaussian combination of an orthonormal basis of
/// `ker d1`.
pub fn tangent_perturb(
    rho: &Representation,
    magnitude: f64,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<Representation> {
    let d1 = surface::differentials(rho).d1;
    let directions = linalg::kernel(&d1, Tolerances::current().rank);
    tangent_perturb_in(rho, &directions, magnitude, seed, cfg)
}

/// As [`tangent_perturb`], restricted to the span of the given cochains
/// (columns).
pub fn tangent_perturb_in(
    rho: &Representation,
    directions: &DMatrix<f64>,
    magnitude: f64,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<Representation> {
    if magnitude == 0.0 || directions.ncols() == 0 {
        return Ok(rho.clone());
    }
    if directions.nrows() != rho.cochain_dim() {
        return Err(Error::invalid(
            "perturbation directions have the wrong length",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = DVector::from_fn(directions.ncols(), |_, _| {
        rng.sample::<f64, _>(StandardNormal)
    });
    let mut u = directions * coeffs;
    let norm = u.norm();
    if norm == 0.0 {
        return Ok(rho.clone());
    }
    u /= norm;
    let moved = move_along(rho, &u, magnitude);
    refine(rho.bundle(), moved, cfg)
}

/// `g_i ← exp(s·u_i) g_i`.
pub fn move_along(rho: &Representation, u: &DVector<f64>, s: f64) -> Vec<GroupElement> {
    let spec = rho.spec();
    let d = spec.algebra_dim();
    rho.holonomies()
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let coords: Vec<f64> = u.rows(i * d, d).iter().map(|x| x * s).collect();
            exp(&AlgebraElement::from_coords(spec, &coords)).mul(g)
        })
        .collect()
}

fn snap_sign(g: &GroupElement, spec: GroupSpec) -> Result<GroupElement> {
    let tol = Tolerances::current().rep;
    let plus = spec.identity();
    let minus = spec.scalar(C64::new(-1.0, 0.0));
    if g.distance(&plus) <= tol {
        Ok(plus)
    } else if g.distance(&minus) <= tol {
        Ok(minus)
    } else {
        Err(Error::invalid("relator value is not ±I"))
    }
}

/// Push an SU2 representation through the double cover `SU2 → SO3`.
pub fn project_su2_so3(rho: &Representation) -> Result<Representation> {
    if rho.spec() != GroupSpec::Su2 {
        return Err(Error::invalid("expected an SU2 representation"));
    }
    snap_sign(rho.bundle().central(), GroupSpec::Su2)?;
    let holonomies = rho
        .holonomies()
        .iter()
        .map(su2_to_so3)
        .collect::<Result<Vec<_>>>()?;
    Representation::new(BundleData::flat(GroupSpec::So3, rho.genus())?, holonomies)
}

fn su2_to_so3(g: &GroupElement) -> Result<GroupElement> {
    let ad = adjoint_operator(g);
    GroupElement::new(GroupSpec::So3, ad.map(|x| C64::new(x, 0.0)))
}

/// One preimage of a rotation under the double cover, from its unit
/// quaternion `(w, x, y, z)`: `w·I − i(xσ_x + yσ_y + zσ_z)`.
pub fn lift_rotation(r: &GroupElement) -> Result<GroupElement> {
    if r.spec() != GroupSpec::So3 {
        return Err(Error::invalid("expected an SO3 element"));
    }
    let m = r.matrix().map(|z| z.re);
    let tr = m[(0, 0)] + m[(1, 1)] + m[(2, 2)];
    let (w, x, y, z) = if tr > 0.0 {
        let s = (tr + 1.0).sqrt() * 2.0;
        (
            s / 4.0,
            (m[(2, 1)] - m[(1, 2)]) / s,
            (m[(0, 2)] - m[(2, 0)]) / s,
            (m[(1, 0)] - m[(0, 1)]) / s,
        )
    } else if m[(0, 0)] > m[(1, 1)] && m[(0, 0)] > m[(2, 2)] {
        let s = (1.0 + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).sqrt() * 2.0;
        (
            (m[(2, 1)] - m[(1, 2)]) / s,
            s / 4.0,
            (m[(0, 1)] + m[(1, 0)]) / s,
            (m[(0, 2)] + m[(2, 0)]) / s,
        )
    } else if m[(1, 1)] > m[(2, 2)] {
        let s = (1.0 + m[(1, 1)] - m[(0, 0)] - m[(2, 2)]).sqrt() * 2.0;
        (
            (m[(0, 2)] - m[(2, 0)]) / s,
            (m[(0, 1)] + m[(1, 0)]) / s,
            s / 4.0,
            (m[(1, 2)] + m[(2, 1)]) / s,
        )
    } else {
        let s = (1.0 + m[(2, 2)] - m[(0, 0)] - m[(1, 1)]).sqrt() * 2.0;
        (
            (m[(1, 0)] - m[(0, 1)]) / s,
            (m[(0, 2)] + m[(2, 0)]) / s,
            (m[(1, 2)] + m[(2, 1)]) / s,
            s / 4.0,
        )
    };
    let g = CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(w, -z),
            C64::new(-y, -x),
            C64::new(y, -x),
            C64::new(w, z),
        ],
    );
    let g = project_to_group(&g, GroupSpec::Su2)?;
    let err = (adjoint_operator(&g) - &m).norm();
    if err > Tolerances::current().rep {
        return Err(Error::invalid(format!(
            "rotation lift failed (error {err:.3e})"
        )));
    }
    Ok(g)
}

/// All sign-twisted lifts of an SO3 representation and their common central
/// value `c ∈ {±I}`.
#[derive(Debug, Clone)]
pub struct Lifts {
    pub central: GroupElement,
    pub lifts: Vec<Representation>,
}

pub fn lift_so3_su2(rho: &Representation) -> Result<Lifts> {
    if rho.spec() != GroupSpec::So3 {
        return Err(Error::invalid("expected an SO3 representation"));
    }
    let base = rho
        .holonomies()
        .iter()
        .map(lift_rotation)
        .collect::<Result<Vec<_>>>()?;
    let mu = relator_product(GroupSpec::Su2, &base);
    let central = snap_sign(&mu, GroupSpec::Su2)?;
    let bundle = BundleData::new(GroupSpec::Su2, rho.genus(), central.clone(), None)?;
    let n = base.len();
    let minus = GroupSpec::Su2.scalar(C64::new(-1.0, 0.0));
    let lifts = (0u64..1 << n)
        .map(|mask| {
            let hol = base
                .iter()
                .enumerate()
                .map(|(i, g)| {
                    if mask >> i & 1 == 1 {
                        g.mul(&minus)
                    } else {
                        g.clone()
                    }
                })
                .collect();
            Representation::new(bundle.clone(), hol)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Lifts { central, lifts })
}

/// Push a U2 representation through `U2 → U2/S¹ ≅ SO3` (adjoint action on
/// the traceless part).
pub fn quotient_by_central_torus(rho: &Representation) -> Result<Representation> {
    if rho.spec() != GroupSpec::U2 {
        return Err(Error::invalid("expected a U2 representation"));
    }
    let holonomies = rho
        .holonomies()
        .iter()
        .map(|g| {
            let ad = adjoint_operator(g);
            GroupElement::new(
                GroupSpec::So3,
                ad.view((0, 0), (3, 3)).map(|x| C64::new(x, 0.0)),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Representation::new(BundleData::flat(GroupSpec::So3, rho.genus())?, holonomies)
}

/// Multiply holonomy `i` of a U2 representation by `e^{iθ_i}`.
pub fn twist_by_centre(rho: &Representation, angles: &[f64]) -> Result<Representation> {
    if rho.spec() != GroupSpec::U2 || angles.len() != rho.holonomies().len() {
        return Err(Error::invalid(
            "central twist needs a U2 representation and one angle per generator",
        ));
    }
    let hol = rho
        .holonomies()
        .iter()
        .zip(angles)
        .map(|(g, &a)| {
            GroupElement::new(
                GroupSpec::U2,
                g.matrix() * nalgebra::Complex::from_polar(1.0, a),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Representation::new(rho.bundle().clone(), hol)
}

/// View an SU2 representation as a U2 representation.
pub fn embed_su2_u2(rho: &Representation) -> Result<Representation> {
    if rho.spec() != GroupSpec::Su2 {
        return Err(Error::invalid("expected an SU2 representation"));
    }
    let central = GroupElement::new(GroupSpec::U2, rho.bundle().central().matrix().clone())?;
    let bundle = BundleData::new(GroupSpec::U2, rho.genus(), central, None)?;
    let hol = rho
        .holonomies()
        .iter()
        .map(|g| GroupElement::new(GroupSpec::U2, g.matrix().clone()))
        .collect::<Result<Vec<_>>>()?;
    Representation::new(bundle, hol)
}

/// Split an O3 representation into its SO3 part `det(g)·g` and the signs
/// `det(g)`.
pub fn split_o3(rho: &Representation) -> Result<(Representation, Vec<i8>)> {
    if rho.spec() != GroupSpec::O3 {
        return Err(Error::invalid("expected an O3 representation"));
    }
    let mut signs = Vec::with_capacity(rho.holonomies().len());
    let hol = rho
        .holonomies()
        .iter()
        .map(|g| {
            let s = g.component();
            signs.push(s);
            GroupElement::new(GroupSpec::So3, g.matrix() * C64::new(s as f64, 0.0))
        })
        .collect::<Result<Vec<_>>>()?;
    let central = GroupElement::new(GroupSpec::So3, rho.bundle().central().matrix().clone())?;
    let bundle = BundleData::new(GroupSpec::So3, rho.genus(), central, None)?;
    Ok((Representation::new(bundle, hol)?, signs))
}

/// Inverse of [`split_o3`].
pub fn assemble_o3(so3: &Representation, signs: &[i8]) -> Result<Representation> {
    if so3.spec() != GroupSpec::So3 || signs.len() != so3.holonomies().len() {
        return Err(Error::invalid(
            "assembly needs an SO3 representation and one sign per generator",
        ));
    }
    let hol = so3
        .holonomies()
        .iter()
        .zip(signs)
        .map(|(g, &s)| GroupElement::new(GroupSpec::O3, g.matrix() * C64::new(s as f64, 0.0)))
        .collect::<Result<Vec<_>>>()?;
    let bundle = BundleData::new(
        GroupSpec::O3,
        so3.genus(),
        GroupSpec::O3.identity(),
        Some(signs.to_vec()),
    )?;
    Representation::new(bundle, hol)
}
