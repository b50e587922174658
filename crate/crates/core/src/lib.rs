pub mod funcapprox;
pub mod legendre;
pub mod entropy;
pub mod pmp_bvp;
pub mod fvref;
pub mod problems;
