pub mod coxeter;
pub mod tableaux;
pub mod rational;
pub mod hecke;
pub mod specht;
pub mod lp;
pub mod cones;
pub mod optimize;
pub mod groupring;
