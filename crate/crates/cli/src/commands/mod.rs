pub mod explore;
pub mod finance;
pub mod territory;
