//! Finite-difference validation suites.
