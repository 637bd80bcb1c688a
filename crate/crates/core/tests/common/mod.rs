#![allow(unused_imports)]

pub use fracsg_validation::*;
