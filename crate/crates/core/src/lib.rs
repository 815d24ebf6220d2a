pub mod collision;
pub mod cones;
pub mod nogo;
pub mod protocols;
pub mod spectra;
pub mod thermo;
