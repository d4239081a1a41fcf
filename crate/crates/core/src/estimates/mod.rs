//! Interaction sources of soliton trains and the estimates they satisfy.

pub mod bounds;
pub mod counterexample;
pub mod norms;
pub mod sources;

pub use bounds::{check_h0, check_h1, soliton_sum_bound, BoundReport, SumBound};
pub use counterexample::{appendix_b, CounterexampleReport};
pub use norms::{lp_norm, GridNorm};
pub use sources::{demonstrate_nodecay, source_g, source_grad_h, source_h, source_h1, source_h2, SourceField, SourceKind};
