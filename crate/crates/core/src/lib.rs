pub mod analysis;
pub mod config;
pub mod error;
pub mod grid;
pub mod maxwell1d;
pub mod maxwell2d;
pub mod mimetic;
pub mod run;
pub mod snapshot;
pub mod sparse;
pub mod yee;
