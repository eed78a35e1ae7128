//! Polynomial entropy of one-dimensional homeomorphisms and their induced
//! maps on hyperspaces, estimated by separated-set counting and orbit coding.

pub mod coding;
pub mod dynamics1d;
pub mod entropy;
pub mod experiment;
pub mod hyperspace;
