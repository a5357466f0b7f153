//! Seed known vulnerability classes into Solidity contracts with
//! pattern-based mutation operators, then score a static analyzer on how
//! many of the injected flaws it reports.
//!
//! The pipeline is: [`syntax`] parses contracts into span-carrying trees,
//! [`operators`] find injection sites and describe each mutation as an
//! [`rewrite::EditSet`], [`campaign`] drives a whole corpus and validates the
//! output, and [`detection`] diffs analyzer reports on originals against
//! reports on mutants.

pub mod campaign;
pub mod cli;
pub mod detection;
pub mod linediff;
pub mod operators;
pub mod rewrite;
pub mod syntax;
