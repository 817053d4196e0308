//! The `ksv` front end: a small input language for rings, Koszul data and DG
//! modules, plus a batch executor that checks support-variety identities.

pub mod exec;
pub mod model;
pub mod syntax;

pub use exec::{run, Options, Report, Status};
pub use model::{load, InputError, Model};
