//! Independent oracles and seeded generators used by the integration tests.

pub mod gen;
pub mod oracle;
