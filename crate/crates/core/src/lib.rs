#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agents;
pub mod backend;
pub mod geometry;
pub mod io;
pub mod metrics;
pub mod optimizer;
pub mod rng;
pub mod task;
