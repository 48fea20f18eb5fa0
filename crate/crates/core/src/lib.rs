pub mod flow1d;
pub mod novikov;
pub mod planes;
pub mod quadrature;
pub mod solitons;
pub mod stability;
