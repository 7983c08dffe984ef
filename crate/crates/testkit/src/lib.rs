//! Brute-force oracles and seeded instance corpora shared by the test suites.
//!
//! Every oracle here is deliberately naive: exhaustive enumeration that can be
//! audited by reading it once.

pub mod corpus;
pub mod oracle;
