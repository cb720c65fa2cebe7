//! Worked problem families built on the general machinery: three-way
//! coupled fixed-point problems driven by a single map, and periodic
//! boundary-value systems discretized through their integral kernel.

pub mod pbvs;
pub mod tripled;
