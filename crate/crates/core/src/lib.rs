//! Split Cayley hexagon incidence graphs: construction, distance structure,
//! automorphism groups, arc-transitivity and quotients.

pub mod autsearch;
pub mod ffgeom;
pub mod fixtures;
pub mod formats;
pub mod graph;
pub mod permgrp;
pub mod quotient;
pub mod report;
pub mod sarctrans;
