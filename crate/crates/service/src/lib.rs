//! HTTP API over the decomposition game.
//!
//! Sessions live in memory under monotonic integer ids. There is no
//! authentication: anyone who can reach the port can read, play and delete
//! every session, so bind to a trusted interface.

pub mod api;
pub mod store;

pub use api::router;
pub use store::{load_fixture_dir, SessionStore};
