pub mod commands;
pub mod frames;
pub mod output;
pub mod scenario;
