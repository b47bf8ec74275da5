//! Deterministic, seedable simulator of long-horizon supermarket operation.
//!
//! The crate is organised around the state components of the store:
//! product [`catalog`], [`supply`] chain, customer [`demand`], age-tracked
//! [`inventory`], exogenous [`news`], customer [`reviews`] and [`finance`].
//! The [`engine`] owns the world state and the end-of-day transition,
//! [`toolapi`] is the phase-gated tool surface agents act through, [`policy`]
//! drives the two-phase strategy/execution loop, and [`metrics`] evaluates
//! trajectory logs.

// Range checks are written `!(x > 0.0)` so that NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod cli;
pub mod config;
pub mod demand;
pub mod engine;
pub mod error;
pub mod finance;
pub mod inventory;
pub mod metrics;
pub mod money;
pub mod news;
pub mod policy;
pub mod prompts;
pub mod protocol;
pub mod reviews;
pub mod rng;
pub mod strategy;
pub mod supply;
pub mod toolapi;
pub mod trajectory;

pub use config::EpisodeConfig;
pub use engine::{DayReport, Episode, Phase, WorldState};
pub use error::{Error, Result};
pub use money::Money;
pub use strategy::StrategyRecord;
pub use toolapi::{ToolCall, ToolResult};
