//! Holds the end-to-end acceptance checks in `tests/acceptance.rs`; run them
//! with `cargo test -p vmgame-e2e`.
