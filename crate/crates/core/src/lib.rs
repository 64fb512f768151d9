pub mod appsim;
pub mod canon;
pub mod extract;
pub mod graph;
pub mod ingest;
pub mod labeling;
pub mod lexicon;
pub mod quality;
pub mod resolve;
