//! Deterministic two-player trading-card-game engine with an evaluation
//! harness for tool-calling agents.

pub mod action;
pub mod card;
pub mod effect;
pub mod engine;
pub mod events;
pub mod pool;
pub mod state;
pub mod observation;
pub mod rating;
pub mod seed;
pub mod agents;
pub mod harness;
pub mod runner;
pub mod trajectory;
pub mod tournament;
