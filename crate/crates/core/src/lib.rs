//! Exact and numerical computation in the C*-algebra generated by a free
//! semicircular system `x = (x_1, ..., x_d)`.
//!
//! The crate is organised around the free Chebyshev polynomials
//! `P_{i_n,...,i_1}`, which form an orthonormal basis of `L^2(x)`:
//!
//! * [`moments`]: exact traces of monomials (non-crossing pairings), plus a
//!   second oracle that reduces moments through the freeness relation.
//! * [`ncpoly`]: the polynomial algebra `C<X_1, ..., X_d>` in the monomial
//!   basis, non-commutative derivatives, trace and `L^2` inner product.
//! * [`chebyshev`]: the free Chebyshev basis, conversions, products and
//!   derivatives in Chebyshev coordinates.
//! * [`haagerup`]: scalar Haagerup bounds and the optimality family.
//! * [`opval`]: matrix-coefficient homogeneous polynomials and the
//!   flattening bound.
//! * [`fock`]: truncated Fock representation and certified lower estimates
//!   of operator norms.
//! * [`numerics`]: the small amount of complex linear algebra the rest needs.

pub mod chebyshev;
pub mod error;
pub mod fock;
pub mod haagerup;
pub mod io;
pub mod moments;
pub mod ncpoly;
pub mod numerics;
pub mod opval;
pub mod random;
pub mod scalar;
pub mod verify;
pub mod word;

pub use chebyshev::{cheb_to_mono, mono_to_cheb, ChebTensor, ChebVector};
pub use error::{Error, Result};
pub use ncpoly::{NcPoly, TensorPoly};
pub use scalar::{Exact, Float, Scalar};
pub use word::Word;
