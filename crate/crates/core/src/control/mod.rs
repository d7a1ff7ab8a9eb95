//! Transfer-function algebra, discretization, and the inner, feedforward and
//! outer controller syntheses.

pub mod discrete;
pub mod inner;
pub mod outer;
pub mod poly;
pub mod tf;

pub use discrete::{realize_discrete, StateSpaceD};
pub use inner::{
    inner_closed_loop, joint_plant, synthesize_feedforward, synthesize_inner, ControllerGains, InnerDesign,
    InnerLoop,
};
pub use outer::{adaptive_update, channel_dynamics, outer_target, synthesize_outer, OuterController, OuterSynthesis};
pub use poly::Poly;
pub use tf::RationalTF;
