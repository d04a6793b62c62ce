//! Monte-Carlo simulation and European option pricing for rough Volterra
//! stochastic volatility models of the αRFSV family.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`] and [`rng`]: time partitions and counter-based normal streams,
//! * [`fbm`]: fractional Brownian motion paths (Cholesky, Hybrid, rDonsker),
//! * [`model`]: variance, log-price and price paths of the αRFSV model,
//! * [`pricing`]: standard, turbocharged and safeguarded call estimators,
//! * [`diagnostics`]: moment-quality and variance-reduction statistics.
//!
//! ```
//! use roughvol::{fbm, GridSpec, ModelParams, PricingRequest, SeedSpec, Scheme};
//!
//! let params = ModelParams::spx();
//! let grid = GridSpec::new(1.0, 64).unwrap();
//! let batch = fbm::simulate(Scheme::Hybrid, &grid, params.hurst, 200, SeedSpec::new(7, 0)).unwrap();
//! let model = roughvol::model::euler_paths(&batch, &params).unwrap();
//! let request = PricingRequest::new(vec![90.0, 100.0, 110.0], 1.0).unwrap();
//! let prices = roughvol::pricing::modified_turbo_price(&model, &request, &params).unwrap();
//! assert_eq!(prices.len(), 3);
//! ```

pub mod csv;
pub mod diagnostics;
pub mod error;
pub mod fbm;
pub mod grid;
pub mod model;
pub mod pricing;
pub mod rng;

pub use diagnostics::{BatchStats, MomentErrorRow, MomentReport};
pub use error::{Error, Result};
pub use fbm::{FbmKernel, PathBatch, Scheme};
pub use grid::GridSpec;
pub use model::{ModelBatch, ModelParams};
pub use pricing::{Estimator, PriceEstimate, PricingRequest};
pub use rng::{BivariateNormalSpec, SeedSpec};
