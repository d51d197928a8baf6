//! Holds the `acceptance` test target only. It lives in its own package so
//! that it runs after every other target of `cargo test --workspace`: a
//! failing criterion then cannot hide the results of the remaining suites.
