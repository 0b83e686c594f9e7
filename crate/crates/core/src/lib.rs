pub mod source;
pub mod surface;
pub mod types;
pub mod unify;
pub mod driver;
pub mod infer;
pub mod prelude;
pub mod report;
pub mod solve;
