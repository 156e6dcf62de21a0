//! Independent reference solutions.

mod analytic;
mod cn;
mod fresnel;

pub use analytic::{
    beam_half_width, freespace_gaussian, imaged_freespace_gaussian, on_axis_amplitude, two_ray_factor, TwoRayGeometry,
};
pub use cn::cn_fd_march;
pub use fresnel::{fresnel_integrals, fresnel_parameter, knife_edge_loss, knife_edge_loss_exact};
