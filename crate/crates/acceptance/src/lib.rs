//! Empty library; the criteria live in `tests/acceptance.rs`.
