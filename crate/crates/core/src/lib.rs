pub mod angle;
pub mod census;
pub mod exactnum;
mod kernel;
pub mod orbits;
pub mod par;
pub mod rotation;
pub mod udist;
