//! Orbit-type classification of points and the stratification census.

use std::collections::{BTreeMap, BTreeSet};

use log::{debug, warn};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::error::{Error, Result};
use crate::liegroup::{
    adjoint_operator, centralizer, AlgebraElement, GroupElement, GroupSpec, OrbitTypeLabel,
};
use crate::linalg;
use crate::localmodel;
use crate::surface::{cohomology, BundleData, Representation, TwistedCohomology};
use crate::tolerance::Tolerances;
use crate::variety::{self, SolverConfig};

/// Stabilizer of a representation: Lie algebra basis, one element per
/// component (identity first) and the orbit-type label.
#[derive(Debug, Clone)]
pub struct Stabilizer {
    pub algebra: Vec<AlgebraElement>,
    pub component_generators: Vec<GroupElement>,
    pub label: OrbitTypeLabel,
}

pub fn stabilizer(rho: &Representation) -> Result<Stabilizer> {
    let c = centralizer(rho.spec(), rho.holonomies())?;
    if c.max_commutator > Tolerances::current().rank {
        return Err(Error::invalid(format!(
            "stabilizer element fails to commute (defect {:.3e})",
            c.max_commutator
        )));
    }
    Ok(Stabilizer {
        algebra: c.algebra,
        component_generators: c.components,
        label: c.label,
    })
}

/// The stabilizer Lie algebra equals the Lie algebra of the centre.
pub fn is_representation_irreducible(rho: &Representation) -> Result<bool> {
    Ok(stabilizer(rho)?.algebra.len() == rho.spec().center_dim())
}

/// Matrix of `x ↦ [ξ, x]` in algebra coordinates.
pub fn ad_matrix(xi: &AlgebraElement) -> DMatrix<f64> {
    let spec = xi.spec();
    let d = spec.algebra_dim();
    let mut m = DMatrix::zeros(d, d);
    for j in 0..d {
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        let col = xi.bracket(&AlgebraElement::from_coords(spec, &e)).coords();
        m.column_mut(j).copy_from_slice(&col);
    }
    m
}

fn block_diagonal(block: &DMatrix<f64>, copies: usize) -> DMatrix<f64> {
    let d = block.nrows();
    let mut m = DMatrix::zeros(d * copies, d * copies);
    for i in 0..copies {
        m.view_mut((i * d, i * d), (d, d)).copy_from(block);
    }
    m
}

/// Action of the stabilizer on `H¹`, compressed to the harmonic basis.
#[derive(Debug, Clone)]
pub struct H1Action {
    /// `u ↦ Ad(z)∘u`, one per component generator.
    pub group: Vec<DMatrix<f64>>,
    /// `u ↦ ad(ξ)∘u`, one per stabilizer algebra basis vector.
    pub infinitesimal: Vec<DMatrix<f64>>,
}

impl H1Action {
    /// Largest distance of a group operator from the identity or of an
    /// infinitesimal operator from zero.
    pub fn max_defect(&self) -> f64 {
        let g = self
            .group
            .iter()
            .map(|op| (op - DMatrix::identity(op.nrows(), op.ncols())).norm());
        let a = self.infinitesimal.iter().map(|op| op.norm());
        g.chain(a).fold(0.0, f64::max)
    }
}

pub fn z_action_on_h1(
    rho: &Representation,
    stab: &Stabilizer,
    coh: &TwistedCohomology,
) -> H1Action {
    let n = rho.holonomies().len();
    let h = &coh.harmonic1;
    let compress = |block: DMatrix<f64>| h.transpose() * block_diagonal(&block, n) * h;
    H1Action {
        group: stab
            .component_generators
            .iter()
            .map(|z| compress(adjoint_operator(z)))
            .collect(),
        infinitesimal: stab
            .algebra
            .iter()
            .map(|xi| compress(ad_matrix(xi)))
            .collect(),
    }
}

fn fixed_dimension(action: &H1Action, h1: usize) -> Result<usize> {
    if h1 == 0 {
        return Ok(0);
    }
    let id = DMatrix::identity(h1, h1);
    let mut blocks: Vec<DMatrix<f64>> = action.group.iter().map(|op| op - &id).collect();
    blocks.extend(action.infinitesimal.iter().cloned());
    let stacked = linalg::vstack(&blocks, h1);
    let (sigma, _) = linalg::right_svd(&stacked);
    let rank = linalg::strict_rank(
        &sigma,
        Tolerances::current().rank,
        "stabilizer action on H1",
    )?;
    Ok(h1 - rank)
}

#[derive(Debug, Clone)]
pub struct PointClassification {
    pub label: OrbitTypeLabel,
    pub stabilizer_algebra: Vec<AlgebraElement>,
    pub component_generators: Vec<GroupElement>,
    pub h: (usize, usize, usize),
    pub stratum_dim: usize,
    pub irreducible: bool,
    pub nonsingular: bool,
    pub top: bool,
    /// Largest distance of the stabilizer action on `H¹` from the trivial one.
    pub action_defect: f64,
}

/// Classify one point. A point is top when it is irreducible and its
/// stabilizer acts trivially on `H¹`; the census falls back to a heuristic
/// when no sampled point qualifies.
pub fn classify_point(rho: &Representation) -> Result<PointClassification> {
    let stab = stabilizer(rho)?;
    let coh = cohomology(rho)?;
    let action = z_action_on_h1(rho, &stab, &coh);
    let stratum_dim = fixed_dimension(&action, coh.h1)?;
    let irreducible = stab.algebra.len() == rho.spec().center_dim();
    let nonsingular = stratum_dim == coh.h1;
    Ok(PointClassification {
        label: stab.label,
        stabilizer_algebra: stab.algebra,
        component_generators: stab.component_generators,
        h: (coh.h0, coh.h1, coh.h2),
        stratum_dim,
        irreducible,
        nonsingular,
        top: irreducible && nonsingular,
        action_defect: action.max_defect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CensusConfig {
    pub solver: SolverConfig,
    pub threads: usize,
    pub include_targeted: bool,
    pub density_trials: usize,
    pub density_magnitude: f64,
    pub volume_samples: usize,
}

impl Default for CensusConfig {
    fn default() -> Self {
        CensusConfig {
            solver: SolverConfig::default(),
            threads: 1,
            include_targeted: true,
            density_trials: 50,
            density_magnitude: 1e-2,
            volume_samples: 20,
        }
    }
}

/// Where a census point came from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Origin {
    Seed(u64),
    Catalog(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelSummary {
    pub label: OrbitTypeLabel,
    pub count: usize,
    pub from_catalog: usize,
    pub stratum_dims: BTreeSet<usize>,
    pub cohomology: BTreeSet<(usize, usize, usize)>,
    pub irreducible: bool,
    pub nonsingular: bool,
    pub top: bool,
    pub examples: Vec<Origin>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySummary {
    pub from_label: String,
    pub trials: usize,
    pub converged: usize,
    pub landed_top: usize,
    pub landed_higher: usize,
    pub fraction_top: f64,
}

/// Monte Carlo `|Pf(Ω)|` over sampled top-stratum charts. A boundedness
/// indicator only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeIndicator {
    pub label: String,
    pub samples: usize,
    pub mean_abs_pfaffian: f64,
    pub max_abs_pfaffian: f64,
    pub rigorous: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub group: GroupSpec,
    pub genus: usize,
    pub central: String,
    pub phi: Option<Vec<i8>>,
    pub seed: u64,
    pub samples_attempted: usize,
    pub samples_converged: usize,
    pub samples_failed: usize,
    pub classification_failures: usize,
    pub catalog_points: usize,
    pub labels: Vec<LabelSummary>,
    pub top_label: Option<String>,
    pub top_heuristic: bool,
    pub density: Vec<DensitySummary>,
    pub volume: Option<VolumeIndicator>,
}

impl CensusReport {
    pub fn label(&self, symbol: &str) -> Option<&LabelSummary> {
        self.labels.iter().find(|l| l.label.symbol == symbol)
    }

    pub fn total_points(&self) -> usize {
        self.labels.iter().map(|l| l.count).sum()
    }
}

/// Seeds for the random samples, derived from the base seed.
pub fn derived_seeds(base: u64, n: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    (0..n).map(|_| rng.random()).collect()
}

fn describe_central(bundle: &BundleData) -> String {
    let c = bundle.central();
    let spec = bundle.spec();
    if c.distance_to_identity() == 0.0 {
        "I".into()
    } else if c.distance(&spec.scalar(crate::liegroup::C64::new(-1.0, 0.0))) == 0.0 {
        "-I".into()
    } else {
        let diag: Vec<String> = (0..spec.matrix_size())
            .map(|i| {
                let z = c.matrix()[(i, i)];
                format!("{}{:+}i", z.re, z.im)
            })
            .collect();
        format!("diag({})", diag.join(", "))
    }
}

fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
    {
        Ok(pool) => pool.install(f),
        Err(e) => {
            warn!("thread pool unavailable ({e}); running on the caller");
            f()
        }
    }
}

struct Point {
    origin: Origin,
    rho: Representation,
    class: PointClassification,
}

pub fn census(bundle: &BundleData, n_samples: usize, cfg: &CensusConfig) -> CensusReport {
    let mut report = CensusReport {
        group: bundle.spec(),
        genus: bundle.genus(),
        central: describe_central(bundle),
        phi: bundle.phi().map(|p| p.to_vec()),
        seed: cfg.solver.seed,
        samples_attempted: n_samples,
        samples_converged: 0,
        samples_failed: 0,
        classification_failures: 0,
        catalog_points: 0,
        labels: Vec::new(),
        top_label: None,
        top_heuristic: false,
        density: Vec::new(),
        volume: None,
    };
    if n_samples == 0 {
        return report;
    }

    let seeds = derived_seeds(cfg.solver.seed, n_samples);
    let solved: Vec<Result<Representation>> = with_pool(cfg.threads, || {
        seeds
            .par_iter()
            .map(|&s| {
                let solver = SolverConfig {
                    seed: s,
                    ..cfg.solver
                };
                variety::solve(bundle, &solver, None)
            })
            .collect()
    });

    let mut candidates: Vec<(Origin, Representation)> = Vec::new();
    for (seed, r) in seeds.iter().zip(solved) {
        match r {
            Ok(rho) => {
                report.samples_converged += 1;
                candidates.push((Origin::Seed(*seed), rho));
            }
            Err(e) => {
                debug!("seed {seed}: {e}");
                report.samples_failed += 1;
            }
        }
    }
    if cfg.include_targeted {
        for (name, rho) in catalog::targeted_representations(bundle, cfg.solver.seed) {
            report.catalog_points += 1;
            candidates.push((Origin::Catalog(name), rho));
        }
    }

    let classified: Vec<Result<PointClassification>> = with_pool(cfg.threads, || {
        candidates
            .par_iter()
            .map(|(_, rho)| classify_point(rho))
            .collect()
    });
    let mut points = Vec::new();
    for ((origin, rho), class) in candidates.into_iter().zip(classified) {
        match class {
            Ok(class) => points.push(Point { origin, rho, class }),
            Err(e) => {
                debug!("{origin:?}: classification failed: {e}");
                report.classification_failures += 1;
            }
        }
    }
    if points.is_empty() {
        return report;
    }

    let mut by_label: BTreeMap<OrbitTypeLabel, LabelSummary> = BTreeMap::new();
    for p in &points {
        let entry = by_label
            .entry(p.class.label.clone())
            .or_insert_with(|| LabelSummary {
                label: p.class.label.clone(),
                count: 0,
                from_catalog: 0,
                stratum_dims: BTreeSet::new(),
                cohomology: BTreeSet::new(),
                irreducible: true,
                nonsingular: true,
                top: false,
                examples: Vec::new(),
            });
        entry.count += 1;
        if matches!(p.origin, Origin::Catalog(_)) {
            entry.from_catalog += 1;
        }
        entry.stratum_dims.insert(p.class.stratum_dim);
        entry.cohomology.insert(p.class.h);
        entry.irreducible &= p.class.irreducible;
        entry.nonsingular &= p.class.nonsingular;
        if entry.examples.len() < 5 {
            entry.examples.push(p.origin.clone());
        }
    }

    let top = points
        .iter()
        .filter(|p| p.class.top)
        .map(|p| &p.class.label)
        .min()
        .cloned();
    let top = match top {
        Some(t) => t,
        None => {
            report.top_heuristic = true;
            points
                .iter()
                .filter(|p| p.class.nonsingular)
                .map(|p| &p.class.label)
                .min()
                .or_else(|| points.iter().map(|p| &p.class.label).min())
                .cloned()
                .expect("points is non-empty")
        }
    };
    if let Some(s) = by_label.get_mut(&top) {
        s.top = true;
    }
    report.top_label = Some(top.to_string());
    report.labels = by_label.into_values().collect();

    report.density = density_trials(&points, &top, cfg);
    report.volume = volume_indicator(&points, &top, cfg);
    report
}

fn density_trials(
    points: &[Point],
    top: &OrbitTypeLabel,
    cfg: &CensusConfig,
) -> Vec<DensitySummary> {
    if cfg.density_trials == 0 {
        return Vec::new();
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for p in points {
        if &p.class.label == top || !seen.insert(p.class.label.clone()) {
            continue;
        }
        let base = p.class.stratum_dim;
        let results: Vec<Option<PointClassification>> = with_pool(cfg.threads, || {
            (0..cfg.density_trials)
                .into_par_iter()
                .map(|t| {
                    let seed = cfg.solver.seed.wrapping_add(1 + t as u64);
                    variety::tangent_perturb(&p.rho, cfg.density_magnitude, seed, &cfg.solver)
                        .and_then(|q| classify_point(&q))
                        .ok()
                })
                .collect()
        });
        let converged: Vec<&PointClassification> = results.iter().flatten().collect();
        let landed_top = converged.iter().filter(|c| &c.label == top).count();
        let landed_higher = converged.iter().filter(|c| c.stratum_dim > base).count();
        out.push(DensitySummary {
            from_label: p.class.label.to_string(),
            trials: cfg.density_trials,
            converged: converged.len(),
            landed_top,
            landed_higher,
            fraction_top: landed_top as f64 / cfg.density_trials as f64,
        });
    }
    out
}

fn volume_indicator(
    points: &[Point],
    top: &OrbitTypeLabel,
    cfg: &CensusConfig,
) -> Option<VolumeIndicator> {
    let values: Vec<f64> = points
        .iter()
        .filter(|p| &p.class.label == top && p.class.nonsingular)
        .take(cfg.volume_samples)
        .filter_map(|p| localmodel::symplectic_form(&p.rho).ok())
        .map(|f| f.abs_pfaffian())
        .collect();
    if values.is_empty() {
        return None;
    }
    Some(VolumeIndicator {
        label: top.to_string(),
        samples: values.len(),
        mean_abs_pfaffian: values.iter().sum::<f64>() / values.len() as f64,
        max_abs_pfaffian: values.iter().cloned().fold(0.0, f64::max),
        rigorous: false,
    })
}
