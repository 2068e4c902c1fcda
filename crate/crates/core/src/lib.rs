pub mod error;
pub mod lp;
pub mod model;
pub mod matching;
pub mod art;
pub mod mrt;
pub mod online;
pub mod gen;
pub mod sim;
pub mod cli;
