//! Job files, reports, verification oracles and the command line front end
//! for [`saddlenf_core`].

pub mod dump;
pub mod job;
pub mod literal;
pub mod report;
pub mod suite;
pub mod verify;

pub use job::{execute_job, run_job, JobError, JobFile, EXIT_CONFIG, EXIT_FINDING, EXIT_OK};
pub use literal::Literal;
pub use report::Report;
