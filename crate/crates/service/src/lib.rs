//! HTTP/JSON facade over the dialogue engine and the precedent store.
//!
//! Every request carries a bearer token that maps to one user. Sessions and
//! precedents belong to the user who created them and any attempt to touch
//! another user's data is answered with 403.

pub mod config;
pub mod error;
pub mod routes;
pub mod state;

pub use config::{ServiceConfig, UserEntry};
pub use error::{ApiError, ConfigError};
pub use routes::router;
pub use state::AppState;
