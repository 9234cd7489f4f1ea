pub mod analytic;
pub mod cli;
pub mod error;
pub mod gridscan;
pub mod oracle;
pub mod params;
pub mod quad;
pub mod specfun;
pub mod state;
