pub mod contact;
pub mod dynamics;
pub mod polytope;
pub mod parameterize;
