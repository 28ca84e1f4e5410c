//! Ex-post validation of cleared portfolios.
//!
//! The block product of a cleared portfolio treats any block failure as a
//! total failure. The functions here compute the probability that the
//! accepted offers together still deliver a target volume, exactly by
//! convolution or by seeded sampling.

mod exact;
mod model;
mod sampling;

pub use exact::{delivery_probability, exact_distribution, DeliveryOptions, MAX_EXACT_OFFERS};
pub use model::{portfolio_slices, AvailabilityModel, Slice, ValidateError};
pub use sampling::{monte_carlo, McEstimate};
