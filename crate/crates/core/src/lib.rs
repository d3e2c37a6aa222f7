//! Energy-aware mode selection and time allocation for RF-powered
//! device-to-device pairs served by a hybrid access point.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod numerics;
pub mod optimizer;
pub mod scenario;
pub mod throughput;

pub use error::{Error, Result};
