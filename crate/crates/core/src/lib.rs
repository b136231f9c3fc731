pub mod baseline;
pub mod bench;
pub mod decomposition;
pub mod generate;
pub mod graph;
pub mod io;
pub mod lp;
pub mod master;
mod paths;
pub mod rounding;
pub mod subproblem;
