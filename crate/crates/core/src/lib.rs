//! Author identifiers for a scholarly repository.
//!
//! The crate mints human-copyable author identifiers such as `warner_s_1`,
//! tracks which users own which papers, serves each author URI as HTML, Atom
//! or an OAI-ORE resource map through HTTP content negotiation, and joins
//! publication graphs from different repositories through `sameAs`
//! assertions.
//!
//! | module | what lives there |
//! |---|---|
//! | [`store`] | records, JSON-Lines ingest, snapshots |
//! | [`names`] | name parsing, ASCII dumb-down, blocking keys |
//! | [`minting`] | identifier minting, claim evaluation, endorsement |
//! | [`graph`] | publication graphs, merges, components |
//! | [`render`] | HTML, Atom and ORE serializers |
//! | [`resolver`] | content negotiation and the HTTP service |
//!
//! A guide with worked examples lives in the `book/` directory of the
//! repository; its code samples are compiled as doc-tests of this crate.

pub mod error;
pub mod graph;
pub mod minting;
pub mod names;
pub mod render;
pub mod resolver;
pub mod store;
pub mod time;

pub use error::{Error, Result};
pub use graph::{
    build_graph, coauthor_edges, connected_components, dedup_papers, merge_graphs, Component,
    IdentityAssertion, Node, NodeKind, PubGraph, RepoView,
};
pub use minting::{
    apply_claim, author_uri, claim_paper, endorsement_eligible, evaluate_claim, mint_author_id,
    ClaimDecision, MintPolicy,
};
pub use names::{
    blocking_key, dumbdown_surname, name_compatibility, name_frequency_report, parse_author_string,
    BlockingKey, Compatibility, NameReport, ParsedName,
};
pub use render::{render_atom, render_html, render_ore, Representation, Suffix};
pub use resolver::{negotiate, NegotiationResult, Resolver, Snapshot, Via};
pub use store::{
    AuthorRecord, ClaimStatus, ForeignIdentity, OwnershipClaim, PaperRecord, Provenance, ReadView,
    Scheme, Store, UserRecord,
};
pub use time::Timestamp;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/identifiers.md")]
    mod identifiers {}
    #[doc = include_str!("../../../book/src/claims.md")]
    mod claims {}
    #[doc = include_str!("../../../book/src/representations.md")]
    mod representations {}
    #[doc = include_str!("../../../book/src/negotiation.md")]
    mod negotiation {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
