#![allow(clippy::needless_range_loop)]

pub mod clifford;
pub mod cusps;
pub mod embedding;
pub mod exactla;
pub mod linalg;
pub mod octonion;
pub mod theta;
