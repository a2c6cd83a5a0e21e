//! Rotations of the torus, piecewise-smooth maps and their ergodic sums.

pub mod ergodic;
pub mod lambda;
pub mod maps;
pub mod rotation;

pub use ergodic::{ergodic_sum, ergodic_sum_at, sup_over_grid, triangle_identity_check, ErgodicSum, Grid};
pub use lambda::{derivative_sandwich_check, lambda_functionals, LambdaFunctionals};
pub use maps::{map_from_name, MapClass, PlanarMap, TriangleSpec};
pub use rotation::{rotate, rotate_turns, RotationVector};
