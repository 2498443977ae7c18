pub mod cf;
pub mod entropy;
pub mod error;
pub mod fixtures;
pub mod linalg;
mod optim;
pub mod prmi;
pub mod purification;
pub mod reflected;
pub mod reproduce;
pub mod states;
pub mod verify;

pub use cf::{CfConjugate, CfContext};
pub use entropy::{ExtendedReal, RenyiOrder};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, SpectralDecomposition, Subsystem, ToleranceConfig};
pub use prmi::{AltMinOptions, PrmiResult};
pub use purification::PurificationClass;
pub use reflected::{MinimizeOptions, MinimizedReflected, ParamMode, UnitaryParam};
pub use states::{BipartiteState, Pmf, PureVector};
pub use verify::{CheckReport, SuiteConfig, SuiteReport};
