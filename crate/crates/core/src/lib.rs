pub mod chains;
pub mod cli;
pub mod hamming;
pub mod locmatrix;
pub mod periodic;
pub mod steinitz;
pub mod tensor;
