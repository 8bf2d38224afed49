//! Exact sum-of-squares certificates for trace coefficients of `(A + tB)^m`.
pub mod cert42;
pub mod cert84;
pub mod golden;
pub mod gram;
pub mod matrix;
pub mod necklace;
pub mod poly;
pub mod psd;
pub mod report;
pub mod sdp;
