//! Holds the workspace acceptance suite in `tests/acceptance.rs`. It lives in
//! its own package so that `cargo test --workspace` runs it after every other
//! suite.
