//! Bounded and unbounded case streams.

use super::{init_case, next_case, GenConfig, TestCase, ValidityMode};
use crate::constraint_engine::ApiConstraintSet;

/// Iterator over `init_case` followed by successive `next_case` calls.
#[derive(Debug, Clone)]
pub struct CaseStream<'a> {
    cs: &'a ApiConstraintSet,
    cfg: &'a GenConfig,
    prev: Option<TestCase>,
    next_index: u64,
    limit: Option<u64>,
}

impl<'a> CaseStream<'a> {
    pub fn unbounded(cs: &'a ApiConstraintSet, cfg: &'a GenConfig) -> Self {
        CaseStream {
            cs,
            cfg,
            prev: None,
            next_index: 0,
            limit: None,
        }
    }
}

impl Iterator for CaseStream<'_> {
    type Item = TestCase;

    fn next(&mut self) -> Option<TestCase> {
        if self.limit.is_some_and(|l| self.next_index >= l) {
            return None;
        }
        let case = match &self.prev {
            None => init_case(self.cs, self.cfg),
            Some(p) => next_case(self.cs, p, self.cfg, self.next_index),
        };
        self.next_index += 1;
        self.prev = Some(case.clone());
        Some(case)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        match self.limit {
            Some(l) => {
                let n = l.saturating_sub(self.next_index) as usize;
                (n, Some(n))
            }
            None => (usize::MAX, None),
        }
    }
}

/// `budget_per_api` cases; a smaller budget yields a prefix of a larger one.
pub fn case_stream<'a>(cs: &'a ApiConstraintSet, cfg: &'a GenConfig) -> CaseStream<'a> {
    CaseStream {
        limit: Some(cfg.budget_per_api as u64),
        ..CaseStream::unbounded(cs, cfg)
    }
}

/// Collects up to `n` ValidOnly cases. Gives up after `64 * n` cases (at
/// least 1024), which only matters for adversarial ratios near 1.
pub fn validity_sweep(cs: &ApiConstraintSet, cfg: &GenConfig, n: usize) -> Vec<TestCase> {
    let cap = n.saturating_mul(64).max(1024);
    CaseStream::unbounded(cs, cfg)
        .take(cap)
        .filter(|c| c.validity_mode == ValidityMode::ValidOnly)
        .take(n)
        .collect()
}
