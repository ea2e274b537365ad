//! Docstring corpora shipped with the crate.

use crate::doc_parser::RawApiDoc;

const LISTINGS: &str = include_str!("../data/listings.json");
const MOCK_DOCS: &str = include_str!("../data/mock_docs.json");

/// Three docstrings, one per documentation class: full `@param` docs,
/// signature only, and no documentation.
pub fn listing_docs() -> Vec<RawApiDoc> {
    serde_json::from_str(LISTINGS).expect("bundled listings are valid JSON")
}

/// Docstrings for every API of the mock target.
pub fn mock_docs() -> Vec<RawApiDoc> {
    serde_json::from_str(MOCK_DOCS).expect("bundled mock docs are valid JSON")
}

pub fn listings_json() -> &'static str {
    LISTINGS
}

pub fn mock_docs_json() -> &'static str {
    MOCK_DOCS
}
