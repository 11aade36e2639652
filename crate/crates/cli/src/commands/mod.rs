pub mod criteria;
pub mod exante;
pub mod expost;
pub mod mdp;
pub mod model;
pub mod urn;
pub mod zurcher;
