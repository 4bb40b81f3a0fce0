//! Local model at a point: cup pairings on the relator cell, the symplectic
//! form on `H¹`, the quadratic moment `Θ(η) = ½[η,η]` and second-order
//! checks of the cone structure.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liegroup::{exp, AlgebraElement, GroupElement, GroupSpec, InnerProduct};
use crate::linalg;
use crate::strata;
use crate::surface::{self, cohomology, Representation, TwistedCohomology};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pairing {
    Inner(InnerProduct),
    Bracket,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CupValue {
    Real(f64),
    Algebra(AlgebraElement),
}

/// Evaluate the cup product of two 1-cochains on the fundamental 2-chain of
/// the relator cell:
///
/// `Σ_t P(u(p_{t−1}), Ad(p_{t−1}) v(a_t)) + Σ_{a_t = x⁻¹} P(u(x), v(x))`
///
/// where `p_t` are the prefixes of the relator. The second sum is the
/// contribution of the degenerate chains `[x | x⁻¹]` needed to close the
/// cycle when the relator contains inverse letters.
pub fn cup_pair(
    rho: &Representation,
    u: &DVector<f64>,
    v: &DVector<f64>,
    pairing: Pairing,
) -> Result<CupValue> {
    let n = rho.cochain_dim();
    if u.len() != n || v.len() != n {
        return Err(Error::invalid(
            "cochain length does not match the representation",
        ));
    }
    let spec = rho.spec();
    let d = spec.algebra_dim();
    let ads = rho.adjoints();
    let relator = rho.bundle().relator();

    let mut real = 0.0;
    let mut alg = DVector::zeros(d);
    let mut accumulate = |a: &DVector<f64>, b: &DVector<f64>| match pairing {
        Pairing::Inner(ip) => real += ip.apply_coords(a.as_slice(), b.as_slice()),
        Pairing::Bracket => alg += bracket_coords(spec, a, b),
    };

    let mut prefix_u = DVector::zeros(d);
    let mut prefix_ad = DMatrix::identity(d, d);
    for letter in relator.letters() {
        let i = letter.generator;
        let ux = u.rows(i * d, d).into_owned();
        let vx = v.rows(i * d, d).into_owned();
        let (ua, va, ad_a) = if letter.exponent > 0 {
            (ux, vx, ads[i].clone())
        } else {
            let inv = ads[i].transpose();
            accumulate(&ux, &vx);
            (-(&inv * ux), -(&inv * vx), inv)
        };
        accumulate(&prefix_u, &(&prefix_ad * &va));
        prefix_u += &prefix_ad * ua;
        prefix_ad *= ad_a;
    }
    Ok(match pairing {
        Pairing::Inner(_) => CupValue::Real(real),
        Pairing::Bracket => CupValue::Algebra(AlgebraElement::from_coords(spec, alg.as_slice())),
    })
}

fn bracket_coords(spec: GroupSpec, a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
    let x = AlgebraElement::from_coords(spec, a.as_slice());
    let y = AlgebraElement::from_coords(spec, b.as_slice());
    DVector::from_vec(x.bracket(&y).coords())
}

pub fn cup_inner(
    rho: &Representation,
    u: &DVector<f64>,
    v: &DVector<f64>,
    ip: InnerProduct,
) -> Result<f64> {
    match cup_pair(rho, u, v, Pairing::Inner(ip))? {
        CupValue::Real(x) => Ok(x),
        CupValue::Algebra(_) => unreachable!("inner pairing is real-valued"),
    }
}

pub fn cup_bracket(
    rho: &Representation,
    u: &DVector<f64>,
    v: &DVector<f64>,
) -> Result<DVector<f64>> {
    match cup_pair(rho, u, v, Pairing::Bracket)? {
        CupValue::Algebra(x) => Ok(DVector::from_vec(x.coords())),
        CupValue::Real(_) => unreachable!("bracket pairing is algebra-valued"),
    }
}

/// `Ω` on harmonic `H¹` coordinates. Sign fixed so that on an abelian
/// target `Ω(x̂_j, ŷ_j) = +scale`.
#[derive(Debug, Clone)]
pub struct SymplecticForm {
    pub harmonic1: DMatrix<f64>,
    pub omega: DMatrix<f64>,
    pub scale: f64,
}

impl SymplecticForm {
    pub fn antisymmetry_defect(&self) -> f64 {
        (&self.omega + self.omega.transpose()).norm()
    }

    pub fn singular_values(&self) -> Vec<f64> {
        linalg::right_svd(&self.omega).0
    }

    pub fn is_nondegenerate(&self) -> bool {
        nondegenerate(&self.omega)
    }

    /// `|Pf(Ω)| = |det Ω|^{1/2}`.
    pub fn abs_pfaffian(&self) -> f64 {
        if self.omega.is_empty() {
            return 1.0;
        }
        self.omega.determinant().abs().sqrt()
    }

    /// Restriction to the span of orthonormal columns `basis` (in harmonic
    /// coordinates).
    pub fn restricted(&self, basis: &DMatrix<f64>) -> DMatrix<f64> {
        basis.transpose() * &self.omega * basis
    }
}

fn nondegenerate(omega: &DMatrix<f64>) -> bool {
    let (smin, smax) = linalg::extreme_singular_values(omega);
    omega.is_empty() || smin > Tolerances::current().rank * smax
}

pub fn symplectic_form(rho: &Representation) -> Result<SymplecticForm> {
    symplectic_form_scaled(rho, InnerProduct::default())
}

pub fn symplectic_form_scaled(rho: &Representation, ip: InnerProduct) -> Result<SymplecticForm> {
    let coh = cohomology(rho)?;
    let omega = form_on(rho, &coh.harmonic1, ip)?;
    if !nondegenerate(&omega) && strata::classify_point(rho)?.nonsingular {
        let (sigma_min, sigma_max) = linalg::extreme_singular_values(&omega);
        return Err(Error::DegenerateForm {
            sigma_min,
            sigma_max,
        });
    }
    Ok(SymplecticForm {
        harmonic1: coh.harmonic1,
        omega,
        scale: ip.scale,
    })
}

/// Antisymmetrized cup pairing on the columns of `basis`.
pub fn form_on(
    rho: &Representation,
    basis: &DMatrix<f64>,
    ip: InnerProduct,
) -> Result<DMatrix<f64>> {
    let k = basis.ncols();
    let cols: Vec<DVector<f64>> = basis.column_iter().map(|c| c.into_owned()).collect();
    let mut raw = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            raw[(i, j)] = cup_inner(rho, &cols[i], &cols[j], ip)?;
        }
    }
    Ok((&raw - raw.transpose()) * 0.5)
}

/// Symmetric bilinear form `B` with `Θ(η) = ½ B(η, η)`, one `h1 × h1`
/// matrix per harmonic `H²` coordinate.
#[derive(Debug, Clone)]
pub struct QuadraticMoment {
    pub harmonic1: DMatrix<f64>,
    pub harmonic2: DMatrix<f64>,
    pub forms: Vec<DMatrix<f64>>,
}

impl QuadraticMoment {
    pub fn new(rho: &Representation) -> Result<Self> {
        let coh = cohomology(rho)?;
        Self::from_cohomology(rho, &coh)
    }

    pub fn from_cohomology(rho: &Representation, coh: &TwistedCohomology) -> Result<Self> {
        let h1 = coh.h1;
        let cols: Vec<DVector<f64>> = coh
            .harmonic1
            .column_iter()
            .map(|c| c.into_owned())
            .collect();
        let mut forms = vec![DMatrix::zeros(h1, h1); coh.h2];
        for i in 0..h1 {
            for j in i..h1 {
                let b = coh.harmonic2.transpose() * cup_bracket(rho, &cols[i], &cols[j])?;
                let b_sym = if i == j {
                    b
                } else {
                    (b + coh.harmonic2.transpose() * cup_bracket(rho, &cols[j], &cols[i])?) * 0.5
                };
                for (k, form) in forms.iter_mut().enumerate() {
                    form[(i, j)] = b_sym[k];
                    form[(j, i)] = b_sym[k];
                }
            }
        }
        Ok(QuadraticMoment {
            harmonic1: coh.harmonic1.clone(),
            harmonic2: coh.harmonic2.clone(),
            forms,
        })
    }

    /// `Θ(η)` in harmonic `H²` coordinates.
    pub fn evaluate(&self, eta: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.forms.len(),
            self.forms.iter().map(|b| 0.5 * eta.dot(&(b * eta))),
        )
    }
}

/// `Θ(η)` for `η` in harmonic `H¹` coordinates.
pub fn moment(rho: &Representation, eta: &DVector<f64>) -> Result<DVector<f64>> {
    let q = QuadraticMoment::new(rho)?;
    if eta.len() != q.harmonic1.ncols() {
        return Err(Error::invalid("η has the wrong number of coordinates"));
    }
    Ok(q.evaluate(eta))
}

/// Outcome of the second-order comparison between the variety and the cone
/// `Θ⁻¹(0)` along one direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeReport {
    pub scales: Vec<f64>,
    pub plain_residuals: Vec<f64>,
    pub corrected_residuals: Vec<f64>,
    /// Log-log slope of the uncorrected curve `exp(sη)·ρ`.
    pub plain_slope: f64,
    /// Slope of `exp(sη + ½s²β)·ρ`; infinite when every residual sits below
    /// the noise floor.
    pub corrected_slope: f64,
    /// Norm of the part of the second-order term outside `im d1`.
    pub obstruction: f64,
    /// Norm of the least-squares `β`.
    pub beta_norm: f64,
}

impl ConeReport {
    pub fn best_slope(&self) -> f64 {
        if self.corrected_residuals.is_empty() {
            self.plain_slope
        } else {
            self.plain_slope.max(self.corrected_slope)
        }
    }
}

const NOISE_FLOOR: f64 = 1e-12;

fn curve(
    rho: &Representation,
    eta: &DVector<f64>,
    beta: Option<&DVector<f64>>,
    s: f64,
) -> Vec<GroupElement> {
    let spec = rho.spec();
    let d = spec.algebra_dim();
    rho.holonomies()
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let mut x = eta.rows(i * d, d) * s;
            if let Some(b) = beta {
                x += b.rows(i * d, d) * (0.5 * s * s);
            }
            exp(&AlgebraElement::from_coords(spec, x.as_slice())).mul(g)
        })
        .collect()
}

fn relator_error(rho: &Representation, holonomies: &[GroupElement]) -> DVector<f64> {
    let spec = rho.spec();
    let n = spec.matrix_size();
    let mut mu = spec.identity();
    for pair in holonomies.chunks(2) {
        let (u, v) = (&pair[0], &pair[1]);
        mu = mu.mul(u).mul(v).mul(&u.inverse()).mul(&v.inverse());
    }
    let m = mu.mul(&rho.bundle().central().inverse()).into_matrix()
        - crate::liegroup::CMatrix::identity(n, n);
    DVector::from_vec(spec.coords_of(&m))
}

fn second_order_term(rho: &Representation, eta: &DVector<f64>) -> DVector<f64> {
    let q = |s: f64| {
        (relator_error(rho, &curve(rho, eta, None, s))
            + relator_error(rho, &curve(rho, eta, None, -s)))
            / (2.0 * s * s)
    };
    let s = 1e-3;
    (q(s / 2.0) * 4.0 - q(s)) / 3.0
}

/// Least-squares slope of `log y` against `log x` over points above the noise
/// floor; infinite when fewer than two remain.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(_, &y)| y > NOISE_FLOOR)
        .map(|(&x, &y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::INFINITY;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Logarithmically spaced scales from `1e-2` down to `1e-4`.
pub fn default_scales() -> Vec<f64> {
    (0..9).map(|k| 10f64.powf(-2.0 - 0.25 * k as f64)).collect()
}

/// Compare the variety with its quadratic cone along the cocycle `eta` (full
/// cochain coordinates). With `correction_search`, solves
/// `d1 β = −2Q` in least squares, `Q` the second-order term of the relator
/// map along `exp(sη)`, and measures the corrected curve.
pub fn cone_consistency(
    rho: &Representation,
    eta: &DVector<f64>,
    correction_search: bool,
) -> Result<ConeReport> {
    if eta.len() != rho.cochain_dim() {
        return Err(Error::invalid("η has the wrong length"));
    }
    let d1 = surface::differentials(rho).d1;
    let cocycle_defect = (&d1 * eta).norm();
    if cocycle_defect > Tolerances::current().rep * eta.norm().max(1.0) {
        return Err(Error::invalid(format!(
            "η is not a cocycle (‖d1 η‖ = {cocycle_defect:.3e})"
        )));
    }
    let scales = default_scales();
    let plain: Vec<f64> = scales
        .iter()
        .map(|&s| relator_error(rho, &curve(rho, eta, None, s)).norm())
        .collect();
    let plain_slope = loglog_slope(&scales, &plain);

    let q = second_order_term(rho, eta);
    let beta = linalg::lstsq(&d1, &(q.clone() * -2.0), 1e-10);
    let obstruction = (&q + &d1 * &beta * 0.5).norm();
    let (corrected, corrected_slope) = if correction_search {
        let r: Vec<f64> = scales
            .iter()
            .map(|&s| relator_error(rho, &curve(rho, eta, Some(&beta), s)).norm())
            .collect();
        let slope = loglog_slope(&scales, &r);
        (r, slope)
    } else {
        (Vec::new(), f64::NAN)
    };
    Ok(ConeReport {
        scales,
        plain_residuals: plain,
        corrected_residuals: corrected,
        plain_slope,
        corrected_slope,
        obstruction,
        beta_norm: beta.norm(),
    })
}
