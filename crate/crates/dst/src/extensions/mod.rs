//! Extensions of the dual-system model: menu-dependent cognitive weights,
//! heterogeneous populations and the effort-based derivation of the weight.

pub mod menu_weights;
pub mod microfoundation;
pub mod population;

pub use menu_weights::{
    alpha_full_bounds,    check_best_option_gain, check_shared_best_gain, check_transitive_iia, consistent_revealed_order, ddst_construct_3, ddst_construct_3_with,
    ddst_identify_consistent, ddst_identify_known_best, ddst_prob, ddst_rcf, known_best_revealed_order, DDstConstruction, DDstIdentification,
    DDstParams,
};
pub use microfoundation::{ddst_from_improvements, microfoundation_alpha, verify_foc, FocCheck};
pub use population::{block_marschak, hdst_rcf, rum_approximate, rum_check, rum_prob, HDstParams, RumApproximation, RumReport};
