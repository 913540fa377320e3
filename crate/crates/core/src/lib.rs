//! A truly concurrent process calculus with reversible keyed events,
//! probabilistic box-summation and data-state guards.
//!
//! The crate is split along the pipeline: [`syntax`] (terms, parser, printer,
//! structural predicates), [`state`] (data states, guard tests, effects),
//! [`semantics`] (resolution, forward and reverse steps, transition system
//! construction), [`equiv`] (step/pomset/hp bisimulation checking) and
//! [`laws`] (executable law catalogue, term generator, expansion normal form).

pub mod equiv;
pub mod error;
pub mod features;
pub mod laws;
pub mod semantics;
pub mod state;
pub mod syntax;

pub use error::{Error, Result};
pub use features::FeatureMode;
pub use semantics::{build_plts, Bounds, Config, Plts};
pub use state::{DataState, StateModel};
pub use syntax::{parse_process, pretty, Action, Definitions, Guard, Key, Label, LabelSet, Process, RelabelFn};

/// Exact probability.
pub type Prob = num_rational::Ratio<i64>;
