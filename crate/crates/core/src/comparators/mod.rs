//! Baselines the h-plot map is compared against.

pub mod medoids;
pub mod network;
pub mod unfolding;

pub use medoids::{best_by_silhouette, kmedoids, kmedoids_silhouette, MedoidClustering};
pub use network::{build_network, spring_layout, CitationGraph, Edge, LayoutOptions};
pub use unfolding::{raw_stress, unfolding_fit, RoleOrder, UnfoldingOptions, UnfoldingSolution};
