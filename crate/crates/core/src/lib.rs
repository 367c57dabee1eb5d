pub mod analysis;
pub mod closed;
pub mod entanglement;
pub mod error;
pub mod exec;
pub mod model;
pub mod open;
pub mod symplectic;
pub mod trend;
