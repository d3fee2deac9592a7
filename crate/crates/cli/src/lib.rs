//! IO companion to `depnet-core`: npm-style registry ingestion, snapshot
//! construction, edge-list and CSV file formats, and run manifests. The
//! `depnet` binary in this crate wires everything into subcommands.

pub mod edgelist;
pub mod evolution;
pub mod fsutil;
pub mod manifest;
pub mod registry;
