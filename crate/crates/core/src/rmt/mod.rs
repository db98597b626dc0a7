//! Symplectic random-matrix moments: the exact closed form, its period-2
//! polynomial structure, the growth coefficient `γ`, a quadrature oracle and
//! the function-field box count.

pub mod function_field;
pub mod moment;
pub mod quasipoly;
pub mod weyl;

pub use function_field::{ff_box_count, ff_box_count_enumerated};
pub use moment::{
    gamma_leading_coefficient, gamma_value, gamma_value_f64, max_valid_n, moment_degree,
    moment_formula_unchecked, symplectic_moment,
};
pub use quasipoly::{quasipoly_fit, QuasiPolynomial};
pub use weyl::sp_weyl_oracle;
