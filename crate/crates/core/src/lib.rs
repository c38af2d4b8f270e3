//! Maps of asymmetric dissimilarity data and the archetypal cases within them.
//!
//! The pipeline runs in four steps:
//!
//! 1. [`ingest`] turns directed citation counts into relatedness factors and
//!    then into a rank-based dissimilarity matrix `Δ`.
//! 2. [`hplot`] embeds the `2n` profiles of `Δ` (each object's column and
//!    row) into one Euclidean map, with a goodness-of-fit measure and a
//!    per-object asymmetry score.
//! 3. [`archetypoids`] finds the observations that best describe the whole
//!    map as convex mixtures, on the `n × 4` table of paired profiles.
//! 4. [`comparators`] provides the baselines: metric unfolding, a thresholded
//!    citation network with a spring layout, and k-medoids with silhouettes.
//!
//! [`pipeline`] chains these stages and writes reproducible artifacts; the
//! `asymap` binary is a thin front end over it.

pub mod archetypoids;
pub mod comparators;
pub mod demo;
pub mod error;
pub mod export;
pub mod hplot;
pub mod ingest;
pub mod io;
mod linalg;
pub mod nnls;
pub mod pipeline;

pub use archetypoids::{
    ada_build, ada_exhaustive, ada_fit, ada_swap, combine_profiles, screeplot, solve_alpha, AdaModel,
    DataMatrix, Screeplot,
};
pub use error::{Error, Result};
pub use hplot::{asymmetry_scores, build_profile_matrix, embed, hplot_embed, HPlotEmbedding};
pub use ingest::{compute_relatedness, rank_transform, to_similarity, CitationTable, Dissimilarity};
