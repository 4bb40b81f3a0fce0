//! Explicit constructions of known strata, with verification records.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::liegroup::{
    adjoint_operator, classify_centralizer, CMatrix, GroupElement, GroupSpec, C64,
};
use crate::strata::{self, census, CensusConfig};
use crate::surface::{cohomology, BundleData, Representation};
use crate::tolerance::Tolerances;
use crate::variety::{self, SolverConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogRecord {
    pub name: String,
    pub parameters: Value,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl CatalogRecord {
    fn new(name: &str, parameters: Value) -> Self {
        CatalogRecord {
            name: name.to_string(),
            parameters,
            checks: Vec::new(),
            passed: true,
        }
    }

    fn check(&mut self, name: &str, passed: bool, detail: Value) {
        self.passed &= passed;
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail,
        });
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn minus(spec: GroupSpec) -> GroupElement {
    spec.scalar(C64::new(-1.0, 0.0))
}

fn real(spec: GroupSpec, rows: usize, entries: &[f64]) -> GroupElement {
    let m = CMatrix::from_row_slice(
        rows,
        rows,
        &entries
            .iter()
            .map(|&x| C64::new(x, 0.0))
            .collect::<Vec<_>>(),
    );
    GroupElement::new(spec, m).expect("exact group element")
}

fn diag_su2(theta: f64) -> GroupElement {
    let m = CMatrix::from_diagonal(&DVector::from_vec(vec![
        C64::from_polar(1.0, theta),
        C64::from_polar(1.0, -theta),
    ]));
    GroupElement::new(GroupSpec::Su2, m).expect("diagonal SU2 element")
}

fn rot_z(theta: f64) -> GroupElement {
    let (s, c) = theta.sin_cos();
    real(GroupSpec::So3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0])
}

/// All `2^{2ℓ}` homomorphisms into the centre `{±I}` of SU2.
pub fn central_su2_reps(genus: usize) -> Result<Vec<Representation>> {
    let bundle = BundleData::flat(GroupSpec::Su2, genus)?;
    let n = 2 * genus;
    (0u64..1 << n)
        .map(|mask| {
            let hol = (0..n)
                .map(|i| {
                    if mask >> i & 1 == 1 {
                        minus(GroupSpec::Su2)
                    } else {
                        GroupSpec::Su2.identity()
                    }
                })
                .collect();
            Representation::new(bundle.clone(), hol)
        })
        .collect()
}

/// Holonomies in the diagonal torus with random angles.
pub fn su2_torus_rep<R: Rng + ?Sized>(genus: usize, rng: &mut R) -> Result<Representation> {
    let hol = (0..2 * genus)
        .map(|_| diag_su2(rng.random_range(-PI..PI)))
        .collect();
    Representation::new(BundleData::flat(GroupSpec::Su2, genus)?, hol)
}

pub fn so3_torus_rep<R: Rng + ?Sized>(genus: usize, rng: &mut R) -> Result<Representation> {
    let hol = (0..2 * genus)
        .map(|_| rot_z(rng.random_range(-PI..PI)))
        .collect();
    Representation::new(BundleData::flat(GroupSpec::So3, genus)?, hol)
}

/// `(iσ_x, iσ_y, I, …, I)` on the bundle with `c = −I`; irreducible.
pub fn quaternion_rep(genus: usize) -> Result<Representation> {
    let z = C64::new(0.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    let sx = GroupElement::new(GroupSpec::Su2, CMatrix::from_row_slice(2, 2, &[z, i, i, z]))?;
    let sy = GroupElement::new(
        GroupSpec::Su2,
        CMatrix::from_row_slice(2, 2, &[z, one, -one, z]),
    )?;
    let mut hol = vec![sx, sy];
    hol.extend((2..2 * genus).map(|_| GroupSpec::Su2.identity()));
    let bundle = BundleData::new(GroupSpec::Su2, genus, minus(GroupSpec::Su2), None)?;
    Representation::new(bundle, hol)
}

/// Klein-four-valued SO3 representation of genus 2:
/// `x₁ ↦ diag(1,−1,−1)`, `y₁ ↦ diag(−1,1,−1)`, `x₂, y₂ ↦ I`.
pub fn ramanathan_rep() -> Result<Representation> {
    let so3 = GroupSpec::So3;
    let a = real(so3, 3, &[1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0]);
    let b = real(so3, 3, &[-1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0]);
    Representation::new(
        BundleData::flat(so3, 2)?,
        vec![a, b, so3.identity(), so3.identity()],
    )
}

fn matches_bundle(rho: &Representation, bundle: &BundleData) -> bool {
    rho.bundle() == bundle
}

/// Known representatives of lower strata for the given bundle, used to seed
/// the census.
pub fn targeted_representations(bundle: &BundleData, seed: u64) -> Vec<(String, Representation)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_ca7a_1090_u64);
    let genus = bundle.genus();
    let mut out: Vec<(String, Representation)> = Vec::new();
    let mut push = |name: String, r: Result<Representation>| {
        if let Ok(r) = r {
            if matches_bundle(&r, bundle) {
                out.push((name, r));
            }
        }
    };
    match bundle.spec() {
        GroupSpec::Su2 => {
            if let Ok(reps) = central_su2_reps(genus) {
                for (k, r) in reps.into_iter().enumerate() {
                    push(format!("central-{k}"), Ok(r));
                }
            }
            push("torus".into(), su2_torus_rep(genus, &mut rng));
            push("quaternion".into(), quaternion_rep(genus));
        }
        GroupSpec::So3 => {
            push(
                "trivial".into(),
                BundleData::flat(GroupSpec::So3, genus).and_then(|b| {
                    Representation::new(b, vec![GroupSpec::So3.identity(); 2 * genus])
                }),
            );
            push("torus".into(), so3_torus_rep(genus, &mut rng));
            if genus == 2 {
                push("klein-four".into(), ramanathan_rep());
            }
        }
        GroupSpec::U2 => {
            let flat = bundle.is_flat();
            if flat {
                let central = (0..2 * genus)
                    .map(|_| GroupSpec::U2.scalar(C64::from_polar(1.0, rng.random_range(-PI..PI))))
                    .collect();
                push(
                    "central".into(),
                    Representation::new(bundle.clone(), central),
                );
                let torus = su2_torus_rep(genus, &mut rng).and_then(|r| variety::embed_su2_u2(&r));
                push("torus".into(), torus);
            } else if let Ok(q) = quaternion_rep(genus).and_then(|r| variety::embed_su2_u2(&r)) {
                let angles: Vec<f64> = (0..2 * genus).map(|_| rng.random_range(-PI..PI)).collect();
                push(
                    "quaternion-twisted".into(),
                    variety::twist_by_centre(&q, &angles),
                );
            }
        }
        GroupSpec::O3 => {
            if let Some(phi) = bundle.phi() {
                let trivial = BundleData::flat(GroupSpec::So3, genus).and_then(|b| {
                    Representation::new(b, vec![GroupSpec::So3.identity(); 2 * genus])
                });
                push(
                    "trivial-with-signs".into(),
                    trivial.and_then(|t| variety::assemble_o3(&t, phi)),
                );
            }
        }
        GroupSpec::O2 | GroupSpec::Torus(_) => {}
    }
    out
}

fn census_cfg(seed: u64, density_trials: usize) -> CensusConfig {
    CensusConfig {
        solver: SolverConfig::with_seed(seed),
        density_trials,
        ..CensusConfig::default()
    }
}

/// Genus-one model `(T × T)/W`: commuting torus pairs.
pub fn genus1_torus_model(spec: GroupSpec, n_samples: usize, seed: u64) -> Result<CatalogRecord> {
    let mut rec = CatalogRecord::new(
        "genus1-torus",
        json!({"group": spec, "samples": n_samples, "seed": seed}),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (generic, fixed, generic_symbol) = match spec {
        GroupSpec::Su2 => (
            su2_torus_rep(1, &mut rng)?,
            Representation::new(
                BundleData::flat(spec, 1)?,
                vec![minus(spec), spec.identity()],
            )?,
            "T",
        ),
        GroupSpec::So3 => (
            so3_torus_rep(1, &mut rng)?,
            Representation::new(BundleData::flat(spec, 1)?, vec![rot_z(PI), spec.identity()])?,
            "SO2",
        ),
        other => {
            return Err(Error::UnsupportedGroup {
                group: other.to_string(),
                detail: "the genus-one torus model covers SU2 and SO3".into(),
            })
        }
    };
    let g = strata::classify_point(&generic)?;
    rec.check(
        "generic label",
        g.label.symbol == generic_symbol,
        json!(g.label.to_string()),
    );
    let f = strata::classify_point(&fixed)?;
    rec.check(
        "weyl-fixed label is larger",
        f.label > g.label,
        json!(f.label.to_string()),
    );

    let bundle = BundleData::flat(spec, 1)?;
    let mut irreducible = 0;
    let mut non_liftable = 0;
    let mut converged = 0;
    for s in strata::derived_seeds(seed, n_samples) {
        let Ok(rho) = variety::solve(&bundle, &SolverConfig::with_seed(s), None) else {
            continue;
        };
        converged += 1;
        if strata::is_representation_irreducible(&rho)? {
            irreducible += 1;
            if spec == GroupSpec::So3
                && variety::lift_so3_su2(&rho)?.central == minus(GroupSpec::Su2)
            {
                non_liftable += 1;
            }
        }
    }
    rec.check(
        "samples converged",
        converged == n_samples,
        json!(converged),
    );
    match spec {
        GroupSpec::Su2 => rec.check(
            "no irreducible points",
            irreducible == 0,
            json!(irreducible),
        ),
        _ => rec.check(
            "irreducible points only on the non-liftable component",
            irreducible == non_liftable,
            json!({"irreducible": irreducible, "non_liftable": non_liftable}),
        ),
    }
    Ok(rec)
}

/// The three SU2 strata `(SU2)`, `(T)`, `(Z)` in genus `ℓ ≥ 2`.
pub fn su2_strata(genus: usize, seed: u64) -> Result<CatalogRecord> {
    if genus < 2 {
        return Err(Error::invalid("su2 strata need genus at least 2"));
    }
    let mut rec = CatalogRecord::new("su2-strata", json!({"genus": genus, "seed": seed}));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let central = central_su2_reps(genus)?;
    let torus = su2_torus_rep(genus, &mut rng)?;
    let irr = variety::solve(
        &BundleData::flat(GroupSpec::Su2, genus)?,
        &SolverConfig::with_seed(seed),
        None,
    )?;

    let c_central = central
        .iter()
        .map(strata::classify_point)
        .collect::<Result<Vec<_>>>()?;
    let c_torus = strata::classify_point(&torus)?;
    let c_irr = strata::classify_point(&irr)?;
    let labels = [
        c_central[0].label.symbol.as_str(),
        c_torus.label.symbol.as_str(),
        c_irr.label.symbol.as_str(),
    ];
    rec.check("labels", labels == ["SU2", "T", "Z"], json!(labels));
    let dims = [
        c_central[0].stratum_dim,
        c_torus.stratum_dim,
        c_irr.stratum_dim,
    ];
    rec.check(
        "stratum dimensions",
        dims == [0, 2 * genus, 6 * genus - 6],
        json!(dims),
    );

    let distinct: BTreeSet<Vec<i8>> = central
        .iter()
        .map(|r| {
            r.holonomies()
                .iter()
                .map(|g| {
                    if g.distance_to_identity() < 1e-12 {
                        1
                    } else {
                        -1
                    }
                })
                .collect()
        })
        .collect();
    let all_central = c_central
        .iter()
        .all(|c| c.label.symbol == "SU2" && c.stratum_dim == 0);
    rec.check(
        "central points",
        distinct.len() == 1 << (2 * genus) && all_central,
        json!({"count": distinct.len(), "all_dim_zero": all_central}),
    );
    rec.check("irreducible point is top", c_irr.top, json!(c_irr.top));

    let w = real(GroupSpec::Su2, 2, &[0.0, 1.0, -1.0, 0.0]);
    let swapped = torus.conjugated_by(&w);
    let weyl_err = torus
        .holonomies()
        .iter()
        .zip(swapped.holonomies())
        .map(|(a, b)| (a.matrix().map(|z| z.conj()) - b.matrix()).norm())
        .fold(0.0, f64::max);
    rec.check(
        "weyl element conjugates torus coordinates",
        weyl_err < 1e-14,
        json!(weyl_err),
    );
    let contains_centre = c_torus
        .stabilizer_algebra
        .iter()
        .all(|x| minus(GroupSpec::Su2).conjugate_algebra(x).matrix() == x.matrix())
        && torus
            .holonomies()
            .iter()
            .all(|g| g.commutator_norm(&minus(GroupSpec::Su2)) < 1e-15);
    rec.check(
        "torus stabilizer contains the centre",
        contains_centre,
        json!(contains_centre),
    );
    Ok(rec)
}

/// Deck transformations of `Hom(π, SU2) → Hom(π, SO3)`.
pub fn so3_covering(genus: usize, seed: u64) -> Result<CatalogRecord> {
    let mut rec = CatalogRecord::new("so3-covering", json!({"genus": genus, "seed": seed}));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let flat = BundleData::flat(GroupSpec::So3, genus)?;
    let trivial = Representation::new(flat.clone(), vec![GroupSpec::So3.identity(); 2 * genus])?;
    let torus = so3_torus_rep(genus, &mut rng)?;
    let generic = variety::solve(&flat, &SolverConfig::with_seed(seed), None)?;

    let expected_lifts = 1usize << (2 * genus);
    for (name, rho, upstairs) in [
        ("trivial", &trivial, "SU2"),
        ("torus", &torus, "T"),
        ("generic", &generic, "Z"),
    ] {
        let lifts = variety::lift_so3_su2(rho)?;
        let distinct = distinct_tuples(&lifts.lifts);
        let back = lifts
            .lifts
            .iter()
            .map(|l| variety::project_su2_so3(l).map(|p| max_distance(&p, rho)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        rec.check(
            &format!("{name}: lifts"),
            lifts.lifts.len() == expected_lifts && distinct == expected_lifts && back < 1e-12,
            json!({"lifts": lifts.lifts.len(), "distinct": distinct, "projection_error": back}),
        );
        let down = strata::classify_point(rho)?.label;
        let up: BTreeSet<String> = lifts
            .lifts
            .iter()
            .map(|l| strata::classify_point(l).map(|c| c.label.symbol))
            .collect::<Result<_>>()?;
        rec.check(
            &format!("{name}: labels correspond"),
            up.len() == 1 && up.contains(upstairs),
            json!({"so3": down.to_string(), "su2": up}),
        );
    }
    Ok(rec)
}

fn distinct_tuples(reps: &[Representation]) -> usize {
    let mut count = 0;
    for (i, a) in reps.iter().enumerate() {
        if reps[..i].iter().all(|b| max_distance(a, b) > 1e-8) {
            count += 1;
        }
    }
    count
}

fn max_distance(a: &Representation, b: &Representation) -> f64 {
    a.holonomies()
        .iter()
        .zip(b.holonomies())
        .map(|(x, y)| x.distance(y))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl std::str::FromStr for Parity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            _ => Err(Error::invalid(format!("unknown parity {s:?}"))),
        }
    }
}

/// U2 bundles: `c = I` (even) or `c = −I` (odd).
pub fn u2_bundle(genus: usize, parity: Parity) -> Result<BundleData> {
    let c = match parity {
        Parity::Even => GroupSpec::U2.identity(),
        Parity::Odd => minus(GroupSpec::U2),
    };
    BundleData::new(GroupSpec::U2, genus, c, None)
}

/// Fibre-twist invariance of `U2 → SO3` (even) or single-stratum census
/// (odd).
pub fn u2_parity(
    genus: usize,
    parity: Parity,
    n_samples: usize,
    seed: u64,
) -> Result<CatalogRecord> {
    let mut rec = CatalogRecord::new(
        "u2-parity",
        json!({"genus": genus, "parity": parity, "samples": n_samples, "seed": seed}),
    );
    let bundle = u2_bundle(genus, parity)?;
    match parity {
        Parity::Even => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut worst: f64 = 0.0;
            let mut flat_targets = true;
            let seeds = strata::derived_seeds(seed, n_samples);
            for &s in &seeds {
                let rho = variety::solve(&bundle, &SolverConfig::with_seed(s), None)?;
                let base = variety::quotient_by_central_torus(&rho)?;
                flat_targets &= base.bundle().is_flat();
                for _ in 0..5 {
                    let angles: Vec<f64> =
                        (0..2 * genus).map(|_| rng.random_range(-PI..PI)).collect();
                    let twisted = variety::twist_by_centre(&rho, &angles)?;
                    worst = worst.max(max_distance(
                        &variety::quotient_by_central_torus(&twisted)?,
                        &base,
                    ));
                }
            }
            rec.check(
                "quotient invariant under central twists",
                worst < 1e-12 && flat_targets,
                json!({"points": seeds.len(), "max_error": worst}),
            );
            let su2 = variety::solve(
                &BundleData::flat(GroupSpec::Su2, genus)?,
                &SolverConfig::with_seed(seed),
                None,
            )?;
            let via_u2 = variety::quotient_by_central_torus(&variety::embed_su2_u2(&su2)?)?;
            let direct = variety::project_su2_so3(&su2)?;
            let err = max_distance(&via_u2, &direct);
            rec.check("embedded SU2 square commutes", err < 1e-12, json!(err));
        }
        Parity::Odd => {
            let report = census(&bundle, n_samples, &census_cfg(seed, 0));
            let labels: Vec<String> = report.labels.iter().map(|l| l.label.to_string()).collect();
            rec.check(
                "single stratum",
                labels.len() == 1 && report.samples_converged == n_samples,
                json!({"labels": labels, "converged": report.samples_converged}),
            );
        }
    }
    Ok(rec)
}

/// O2 representations in prescribed components.
pub fn o2_variety(
    genus: usize,
    phi: Option<Vec<i8>>,
    n_samples: usize,
    seed: u64,
) -> Result<CatalogRecord> {
    let phi = phi.unwrap_or_else(|| crate::surface::default_phi(genus));
    let mut rec = CatalogRecord::new(
        "o2-variety",
        json!({"genus": genus, "phi": phi, "samples": n_samples, "seed": seed}),
    );
    let bundle = BundleData::new(GroupSpec::O2, genus, GroupSpec::O2.identity(), Some(phi))?;
    let mut hs = BTreeSet::new();
    let mut labels = BTreeSet::new();
    let mut finite = true;
    let mut components_ok = true;
    for s in strata::derived_seeds(seed, n_samples) {
        let rho = variety::solve(&bundle, &SolverConfig::with_seed(s), None)?;
        components_ok &= rho
            .holonomies()
            .iter()
            .enumerate()
            .all(|(i, g)| g.component() == bundle.component_of(i));
        let c = strata::classify_point(&rho)?;
        hs.insert(c.h);
        finite &= c.label.is_finite();
        labels.insert(c.label.to_string());
    }
    let expected_h1 = 2 * genus - 2;
    rec.check("holonomy components", components_ok, json!(components_ok));
    rec.check("h0 vanishes", hs.iter().all(|h| h.0 == 0), json!(hs));
    rec.check(
        "h1 = 2g - 2",
        hs.iter().all(|h| h.1 == expected_h1),
        json!(expected_h1),
    );
    rec.check("finite stabilizers", finite, json!(labels));
    if genus == 1 {
        rec.check(
            "boundary case: isolated points",
            hs.iter().all(|h| h.1 == 0),
            json!("genus one"),
        );
    }
    Ok(rec)
}

/// `O3 = SO3 × Z/2`: split and reassemble, and compare strata.
pub fn o3_splitting(
    genus: usize,
    phi: Option<Vec<i8>>,
    n_samples: usize,
    seed: u64,
) -> Result<CatalogRecord> {
    let phi = phi.unwrap_or_else(|| crate::surface::default_phi(genus));
    let mut rec = CatalogRecord::new(
        "o3-splitting",
        json!({"genus": genus, "phi": phi, "samples": n_samples, "seed": seed}),
    );
    let bundle = BundleData::new(
        GroupSpec::O3,
        genus,
        GroupSpec::O3.identity(),
        Some(phi.clone()),
    )?;
    let mut worst: f64 = 0.0;
    let mut signs_ok = true;
    let mut labels_ok = true;
    let mut dims_ok = true;
    let mut o3_labels = BTreeSet::new();
    let mut so3_labels = BTreeSet::new();
    for s in strata::derived_seeds(seed, n_samples) {
        let rho = variety::solve(&bundle, &SolverConfig::with_seed(s), None)?;
        let (so3, signs) = variety::split_o3(&rho)?;
        signs_ok &= signs == phi;
        worst = worst.max(max_distance(&variety::assemble_o3(&so3, &signs)?, &rho));
        let a = strata::classify_point(&rho)?;
        let b = strata::classify_point(&so3)?;
        labels_ok &= a.label.symbol == format!("{}×Z2", b.label.symbol)
            && a.label.components == 2 * b.label.components;
        dims_ok &= a.stratum_dim == b.stratum_dim && a.h == b.h;
        o3_labels.insert(a.label.to_string());
        so3_labels.insert(b.label.to_string());
    }
    rec.check(
        "split round trip",
        worst < 1e-14 && signs_ok,
        json!({"max_error": worst, "signs_match_phi": signs_ok}),
    );
    rec.check(
        "stabilizer is SO3 part times Z/2",
        labels_ok,
        json!({"o3": o3_labels, "so3": so3_labels}),
    );
    rec.check("strata dimensions agree", dims_ok, json!(dims_ok));

    // Fixed points of a trivial SO3 part keep the whole SO3 × Z/2.
    let trivial = Representation::new(
        BundleData::flat(GroupSpec::So3, genus)?,
        vec![GroupSpec::So3.identity(); 2 * genus],
    )?;
    let lifted = variety::assemble_o3(&trivial, &phi)?;
    let label = classify_centralizer(GroupSpec::O3, lifted.holonomies())?;
    rec.check(
        "trivial SO3 part",
        label.symbol == "SO3×Z2",
        json!(label.to_string()),
    );
    Ok(rec)
}

/// Klein-four SO3 representation of genus 2: irreducible, yet its finite
/// stabilizer acts non-trivially on `H¹`.
pub fn ramanathan_example() -> Result<CatalogRecord> {
    let mut rec = CatalogRecord::new("ramanathan", json!({"n": 3, "genus": 2}));
    let rho = ramanathan_rep()?;
    let c = strata::classify_point(&rho)?;
    let stab = strata::stabilizer(&rho)?;
    let coh = cohomology(&rho)?;
    let action = strata::z_action_on_h1(&rho, &stab, &coh);
    let distances: Vec<f64> = action
        .group
        .iter()
        .map(|op| (op - nalgebra::DMatrix::identity(op.nrows(), op.ncols())).norm())
        .collect();
    let max_distance = distances.iter().cloned().fold(0.0, f64::max);
    let orthogonal = action
        .group
        .iter()
        .map(|op| {
            (op.transpose() * op - nalgebra::DMatrix::identity(op.nrows(), op.ncols())).norm()
        })
        .fold(0.0, f64::max);

    rec.check("irreducible", c.irreducible, json!(c.irreducible));
    rec.check(
        "label",
        c.label.symbol == "V" && c.component_generators.len() == 4,
        json!(c.label.to_string()),
    );
    rec.check("cohomology", c.h.0 == 0 && c.h.1 == 6, json!(c.h));
    rec.check(
        "component action is non-trivial",
        max_distance >= 0.5 && orthogonal < Tolerances::current().num * 10.0,
        json!({"distances": distances, "orthogonality_defect": orthogonal}),
    );
    rec.check(
        "not top",
        !c.top && !c.nonsingular,
        json!({"top": c.top, "stratum_dim": c.stratum_dim}),
    );
    let lift = variety::lift_so3_su2(&rho)?;
    rec.check(
        "lifts live on the twisted SU2 bundle",
        lift.central == minus(GroupSpec::Su2),
        json!(lift.central.distance_to_identity() > 1.0),
    );
    let klein_ads = stab
        .component_generators
        .iter()
        .map(adjoint_operator)
        .collect::<Vec<_>>();
    rec.check(
        "stabilizer elements are involutions",
        klein_ads
            .iter()
            .all(|a| (a * a - nalgebra::DMatrix::identity(3, 3)).norm() < 1e-14),
        json!(klein_ads.len()),
    );
    Ok(rec)
}

pub const CATALOG_NAMES: [&str; 7] = [
    "genus1-torus",
    "su2-strata",
    "so3-covering",
    "u2-parity",
    "o2-variety",
    "o3-splitting",
    "ramanathan",
];

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_pass(rec: &CatalogRecord) {
        assert!(rec.passed, "{}", serde_json::to_string_pretty(rec).unwrap());
    }

    #[test]
    fn ramanathan_passes() {
        assert_pass(&ramanathan_example().unwrap());
    }

    #[test]
    fn su2_strata_genus_two_and_three() {
        assert_pass(&su2_strata(2, 1).unwrap());
        assert_pass(&su2_strata(3, 1).unwrap());
    }

    #[test]
    fn covering_passes() {
        assert_pass(&so3_covering(2, 3).unwrap());
    }

    #[test]
    fn genus_one_models() {
        assert_pass(&genus1_torus_model(GroupSpec::Su2, 50, 0).unwrap());
        assert_pass(&genus1_torus_model(GroupSpec::So3, 30, 0).unwrap());
    }

    #[test]
    fn u2_both_parities() {
        assert_pass(&u2_parity(2, Parity::Even, 5, 0).unwrap());
        assert_pass(&u2_parity(2, Parity::Odd, 10, 0).unwrap());
    }

    #[test]
    fn disconnected_groups() {
        assert_pass(&o2_variety(2, None, 5, 0).unwrap());
        assert_pass(&o2_variety(1, None, 5, 0).unwrap());
        assert_pass(&o3_splitting(2, None, 5, 0).unwrap());
    }

    #[test]
    fn records_are_deterministic() {
        assert_eq!(so3_covering(2, 9).unwrap(), so3_covering(2, 9).unwrap());
    }

    #[test]
    fn targeted_reps_are_valid() {
        let b = BundleData::flat(GroupSpec::Su2, 2).unwrap();
        let t = targeted_representations(&b, 0);
        assert_eq!(
            t.iter().filter(|(n, _)| n.starts_with("central")).count(),
            16
        );
        let odd = u2_bundle(2, Parity::Odd).unwrap();
        assert_eq!(targeted_representations(&odd, 0).len(), 1);
    }
}
