//! Orbit-type stratification of moduli spaces of central Yang-Mills
//! connections on closed surfaces, realized as representation varieties
//! `{(u_1, v_1, …, u_ℓ, v_ℓ) ∈ G^{2ℓ} : ∏[u_j, v_j] = c}` for compact matrix
//! groups `G`.

pub mod catalog;
pub mod cli;
pub mod error;
pub mod liegroup;
pub mod linalg;
pub mod localmodel;
pub mod strata;
pub mod surface;
pub mod tolerance;
pub mod variety;

pub use error::{Error, Result};
pub use tolerance::Tolerances;
