mod constraint_engine;
mod corpus;
mod doc_parser;
mod enrichment;
mod generation;
mod oracle;
mod orchestrator;
mod par;
mod report;
mod rng;
mod rules;
mod schema;
mod strategies;
mod value;
mod wire;
