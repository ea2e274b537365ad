//! Documentation-guided fuzzing of array-processing APIs.
//!
//! The pipeline runs in stages, each consuming the previous stage's artifact:
//!
//! 1. [`doc_parser`] classifies raw docstrings and parses signatures.
//! 2. [`enrichment`] turns parsed docs into [`schema::StandardizedApiInfo`],
//!    inferring missing details for signature-only APIs.
//! 3. [`constraint_engine`] resolves per-parameter generation domains and a
//!    dependency order.
//! 4. [`generation`] produces deterministic test-case streams.
//! 5. [`orchestrator`] executes cases in an isolated worker, classifies the
//!    outcomes and writes deduplicated bug reports.

pub mod bundled;
pub mod constraint_engine;
pub mod doc_parser;
pub mod enrichment;
pub mod generation;
pub mod orchestrator;
pub mod par;
pub mod pipeline;
pub mod schema;
pub mod value;

pub use constraint_engine::{check_case, extract_constraints, ApiConstraintSet, ResolvedSpec, Violation};
pub use doc_parser::{classify_doc, parse_doc, parse_signature, DocClass, ParsedDoc, RawApiDoc, SignatureInfo};
pub use generation::{case_stream, init_case, next_case, GenConfig, TestCase, ValidityMode};
pub use schema::{ParamInfo, StandardizedApiInfo};
pub use value::{EncodedValue, NdArray, ScalarType};
