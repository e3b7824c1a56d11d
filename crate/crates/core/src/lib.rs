//! Algorithms for mapping the research ecosystem behind policy documents.
//!
//! The crate is `no_std` (with `alloc`) and contains no IO. It covers:
//!
//! * [`corpus`]: locating reference sections and splitting them into
//!   normalized citation fragments.
//! * [`biblio`]: an in-memory bibliographic index with deterministic
//!   token search.
//! * [`resolver`]: scoring fragments against records and resolving them,
//!   with an optional fallback lookup.
//! * [`funding`]: two-direction article/award linkage, funder
//!   normalization and award-year imputation.
//! * [`stats`]: yearly share differences, the Wilcoxon signed-rank test,
//!   Hodges-Lehmann intervals and KLD concentration.
//! * [`ecomap`]: funder -> organization -> memo flow graphs, table rows,
//!   retraction flags and coverage summaries.
//!
//! File formats, the remote client and the CLI live in the `refmap` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod biblio;
pub mod corpus;
pub mod ecomap;
pub mod funding;
pub mod resolver;
pub mod stats;

pub use biblio::{ArticleRecord, Author, BiblioIndex, GrantTag, IndexError, IndexStats};
pub use corpus::{Memo, ReferenceFragment, SegmenterConfig};
pub use funding::{ArticleAwardLink, Award, AwardDb, FunderAliasTable, LinkSource};
pub use resolver::{CoverageStats, Method, ResolutionResult, ResolverConfig};
