pub mod bench;
pub mod cli;
pub mod encoding;
pub mod error;
pub mod generators;
pub mod gibbs;
pub mod hw;
pub mod io;
pub mod model;
pub mod onehot;
pub mod oracles;
pub mod problem;
pub mod tempering;
pub mod vectorized;

pub use encoding::{BitState, EncodingKind, EncodingLayout};
pub use error::{Error, Result};
pub use model::EnergyModel;
pub use problem::{ColoringInstance, Graph, TspInstance};
