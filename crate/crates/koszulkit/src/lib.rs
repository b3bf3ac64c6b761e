pub mod exactlin;
pub mod ncalg;
pub mod present;
pub mod quad;
pub mod ideal;
pub mod dg;
pub mod em;
pub mod massey;
