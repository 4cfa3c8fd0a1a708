//! Counting points of bounded height directly and through the universal torsor
//! `eta2 eta5^2 eta8 + eta3 eta6^2 eta9 + eta4 eta7^2 eta10 = eta1 ... eta7`.

mod brute;
mod enumerate;
mod points;
mod report;

pub use brute::{brute_force_count, brute_force_count_capped, line_points, BruteForce, BRUTE_FORCE_CAP};
pub use enumerate::{
    degenerate_count, fiber_count, fiber_count_total, fiber_main_term, for_each_fiber_tuple, torsor_count, torsor_count_where,
    torsor_points, FiberContext,
};
pub use points::{prefix_coprime, squarefree_renormalize, torsor_to_point, SurfacePoint, TorsorPoint};
pub use report::{
    asymptotic_report, bijection_check, write_points_csv, write_torsor_csv, AsymptoticRow, BijectionReport,
    ASYMPTOTIC_NOTE,
};
