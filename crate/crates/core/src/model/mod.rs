pub mod function;
pub mod point;
pub mod problem;
pub mod set;
pub mod tolerance;
