//! Causal identification on ADMGs and finite-sample learning of
//! interventional distributions.

pub mod admg;
pub mod cli;
pub mod estimand;
pub mod fixtures;
pub mod generate;
pub mod identify;
pub mod jsonfmt;
pub mod learn;
pub mod oracle;
pub mod rng;
pub mod samples;
pub mod table;
pub mod verify;
