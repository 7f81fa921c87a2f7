pub mod cli;
pub mod error;
pub mod galois;
pub mod genfun;
pub mod jacobi;
pub mod koszul;
pub mod lie;
pub mod linalg;
pub mod lyndon;
pub mod magnus;
pub mod massey;
pub mod ring;
pub mod snf;
pub mod words;

pub use error::{Error, Result};
