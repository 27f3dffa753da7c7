//! Synthetic instance generators and loaders for on-disk datasets.

mod load;
mod synthetic;

pub use load::{
    load_graph, load_groups, load_points, load_sets, GroupTable, IdMap, LoadedGraph, PointSet,
    SetTable,
};
pub use synthetic::{
    gen_blobs, gen_hard_instance, gen_sbm, BlobConfig, BlobGroup, Blobs, SbmConfig,
};
