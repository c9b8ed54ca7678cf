pub mod averages;
pub mod dynsys;
pub mod equidist;
pub mod polyfam;
pub mod seminorms;
