pub mod exactalg;
pub mod families;
pub mod groupact;
pub mod homopoly;
pub mod jumploci;
pub mod presentation;
pub mod projgeom;
pub mod shell;
pub mod splitting;
