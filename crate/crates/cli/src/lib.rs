//! Front end for `hptree`: the discover pipeline, the timing suites, and the
//! workbench HTTP service.

pub mod bench;
pub mod pipeline;
pub mod serve;
