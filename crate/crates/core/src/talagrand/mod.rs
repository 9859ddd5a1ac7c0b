//! Weighted covers of the Talagrand space.

mod closed_form;
mod cover;
mod dset;
mod hall;
mod inequalities;
mod schedule;
mod search;
mod thin;
pub mod weight;

pub use closed_form::{psi_cylinder, psi_total};
pub use cover::{dsets_as_cylinders, is_proper_cover, CoverVerdict};
pub use dset::{family_weight, is_rectangle, make_rectangle, make_spike, DSet};
pub use hall::{cdr_find, hall_bound_check, Cdr, HallCheck};
pub use inequalities::{
    sample_grid, verify_inequalities, verify_one, Inequality, InequalityReport, Instance, MethodCounts,
    EXHAUSTIVE_RANGE,
};
pub use schedule::{Eta, Schedule, ScheduleKind, TALAGRAND_K_MAX};
pub use search::{min_weight_cover, min_weight_cover_with_cap, CoverUniverse, MinCover, SEARCH_LEAF_CAP};
pub use thin::{is_thin, CylinderMeasure, RestrictedPsi, ThinReport, ThinWitness};
pub use weight::{compare, compare_with_cap, Comparison, ExactWeight, Method, DEFAULT_PRECISION_CAP};
