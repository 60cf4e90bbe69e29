//! Simulation library for adversarial online learning with graph-structured
//! feedback and switching costs.
//!
//! A game runs for `T` rounds over `K` actions. Each round the player picks an
//! action, pays its loss plus a fixed cost `c` whenever the action changed, and
//! observes the losses of the actions reachable from the played one in that
//! round's feedback graph. The crate provides:
//!
//! - feedback graphs and graph sequences ([`graphs`]),
//! - exact and greedy graph measures: independence number, maximum induced
//!   acyclic set, the sequence-wide independence number, and a greedy
//!   sequence-split search ([`measures`]),
//! - loss-table generators, including a multi-scale Gaussian random-walk
//!   adversary and a Bernoulli gap adversary ([`adversary`]),
//! - learner policies: Threshold EXP3, EXP3.SC, EXP3 SET, Batch EXP3, and a
//!   uniform baseline ([`learners`]),
//! - a game engine with regret accounting ([`engine`]),
//! - an experiment harness: config-driven sweeps, bound checks, regret
//!   exponent fits, and SVG plots ([`harness`]).

#![forbid(unsafe_code)]

pub mod adversary;
pub mod engine;
pub mod graphs;
pub mod harness;
pub mod learners;
pub mod measures;
pub(crate) mod seeding;
