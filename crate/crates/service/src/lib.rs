//! Command-line tool and HTTP service around the `strokesynth` engine.

pub mod cli;
pub mod http;

pub use cli::run;
pub use http::router;

pub const BIND_ENV: &str = "STROKESYNTH_BIND";
pub const DEFAULT_BIND: &str = "127.0.0.1:8080";
