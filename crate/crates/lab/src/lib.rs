pub mod gen;
pub mod harness;
pub mod text;
