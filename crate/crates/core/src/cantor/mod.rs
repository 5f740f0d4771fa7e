//! Cantor space `{0,1}^N`: words, eventually periodic points, exact dyadic
//! masses and cylinder quadrature.

mod dyadic;
mod point;
mod quadrature;
mod word;

pub use dyadic::Dyadic;
pub use point::CantorPoint;
pub use quadrature::{cylinder_measure, riemann_norm, Cylinder, Norm, Quadrature, QuadratureNode};
pub use word::Word;
