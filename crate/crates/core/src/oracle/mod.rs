//! Reference solvers, random generators and the hardness reduction chain,
//! used to cross-check the dynamic program.

mod brute;
mod gen;
mod reduction;

pub use brute::{brute_force_solve, DEFAULT_BUDGET};
pub use gen::{gen_random_instance, gen_random_psi, random_dag, GenParams, PsiParams};
pub use reduction::{
    brute_force_psi, brute_force_subtdag, parse_psi, parse_subtdag, reduce_psi_to_subtdag,
    reduce_subtdag_to_wsp, write_psi, write_subtdag, PsiInstance, SubTdagInstance,
};
