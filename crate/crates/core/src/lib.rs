pub mod bp;
pub mod cli;
pub mod embed;
pub mod error;
pub mod geom;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod model;
pub mod percolation;
pub mod rigidity;
pub mod rng;
pub mod udgp;
