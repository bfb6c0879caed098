//! Rank-based estimation of bivariate and spatial extremal dependence under
//! both asymptotic dependence and asymptotic independence.

pub mod empirical;
pub mod error;
pub mod families;
pub mod mestim;
pub mod normal;
pub mod optimize;
pub mod quadrature;
pub mod rect;
pub mod simulate;
pub mod spatial;

pub use error::{Result, TailError};
pub use empirical::{RankedSample, TailIndexChoice, TailIndexMode};
pub use families::{HrLambda, Stdf, TailFamily, ThetaVector};
pub use mestim::{BivariateFit, FitOptions, WeightPreset, WeightScheme, ZetaProfile};
pub use optimize::OptimOptions;
pub use rect::Rectangle;
pub use simulate::{Margins, Noise, SimModel, SimSpec, SpatialSampler};
pub use spatial::{SpatialFit, SpatialMethod, SpatialModel};
