//! Majorization, pure-state transformations and multipartite entanglement toolkit.

pub mod boundent;
pub mod hideproto;
pub mod locc;
pub mod majorize;
pub mod measures;
pub mod noflip;
pub mod numkernel;
pub mod qstate;
pub mod witness;
