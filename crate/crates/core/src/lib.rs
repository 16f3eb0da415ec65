pub mod zeta;
pub mod quadrature;
pub mod cesaro;
pub mod oracles;
pub mod correlation;
pub mod harness;
