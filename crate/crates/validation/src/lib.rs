//! Holds the `acceptance` test target, which reports every criterion on its
//! own line. It is a separate package so that it runs after the unit,
//! property and CLI tests of the other crates.
