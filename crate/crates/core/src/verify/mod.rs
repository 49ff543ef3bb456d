//! Verification harness: finite-difference PDE residuals, convergence orders,
//! reduction and reference audits, and the JSON report.

pub mod convergence;
pub mod fd;
pub mod audit;
pub mod kummer_checks;
pub mod report;
pub mod pde_checks;
pub mod suite;
