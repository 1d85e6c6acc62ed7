//! Heat inequalities `∂f/∂t ≤ Δf + u f` and the Moser iteration chain that
//! turns integral bounds on f into pointwise ones: the integration-by-parts
//! inequality, the differential and time-integrated energy inequalities, the
//! H-recursion, the iteration schedule and the sup-bound kernel. Also the
//! quadratic case `∂f/∂t ≤ Δf + C₀f²` and the coupled decay estimate.
//!
//! Every inequality is returned as its two sides (or a signed residual) so
//! suites can record the margin, not just a verdict.

mod checks;
pub mod constants;
mod cutoff;
mod heat;
mod schedule;
mod smoothing;

pub use checks::{
    energy_step_check, h_functional, h_recursion_check, integration_by_parts_gap, time_integral,
    time_integrated_check, EnergyResidual, IntegrationByPartsGap, Sides,
};
pub use cutoff::{smoothstep, spatial_cutoff, time_cutoff};
pub use heat::{heat_solve, HeatProblem, HeatSeries, Potential};
pub use schedule::{
    kernel_ratio, moser_ladder, moser_schedule, sup_bound_kernel, MoserSchedule, ScheduleEntry, NU,
};
pub use smoothing::{
    coupled_decay_check, scalar_smoothing_check, DecayReport, QuadraticProblem, SmoothingReport,
};
