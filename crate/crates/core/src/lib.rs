pub mod blocking;
pub mod citation;
pub mod clustering;
pub mod corpus;
pub mod evalkit;
pub mod normalize;
pub mod portfolio;
pub mod scoring;
pub mod synth;
pub mod union_find;
