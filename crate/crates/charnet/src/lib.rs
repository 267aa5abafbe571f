//! Character co-occurrence network toolkit for scene-annotated serial
//! narratives.
//!
//! The pipeline starts from a corpus of scene-level annotations (who is
//! present in which stretch of panels), turns it into weighted character
//! networks, and provides the analyses usually run on such networks:
//! topological summaries, centrality tables, heavy-tail distribution fits,
//! reference random models and small-world assessment, growth and
//! preferential-attachment measurement, attack robustness, gender
//! statistics, and a structural typology of narrative-arc networks.

pub mod corpus;
pub mod dynamics;
#[cfg(test)]
pub(crate) mod testkit;
pub mod fitting;
pub mod gender;
pub mod graph;
pub mod metrics;
pub mod nullmodels;
pub mod robustness;
pub mod stats;
pub mod typology;

pub use corpus::{parse_corpus, Corpus, CorpusError};
pub use graph::{build_bipartite, build_graph, filter_graph, CharacterGraph, FilterSpec};
pub use metrics::{centralities, topo_summary, CentralityTable, TopoSummary};
