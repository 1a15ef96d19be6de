//! Replicator dynamics of the two-person rock-scissors-paper game with
//! player-specific tie payoffs.
//!
//! The library builds the heteroclinic network formed by the nine
//! pure-strategy equilibria, the local and global transition maps of its five
//! quotient cycles, and the machinery to decide, for each cycle and parameter
//! pair, whether the cycle attracts nearby trajectories: essentially
//! asymptotically stable, fragmentarily asymptotically stable (it attracts a
//! positive-measure set that is not a neighbourhood), or completely unstable.
//! Stability is computed twice — from closed-form expressions and from a
//! transition-matrix pipeline — and the two routes are cross-checked against
//! direct simulation of the flow.
//!
//! Modules:
//!
//! * [`game`] — payoff matrices, simplex states, the replicator field;
//! * [`network`] — vertex orbits, quotient connections and cycles, local eigenvalues;
//! * [`maps`] — section coordinates, local/global/composite transition maps;
//! * [`stability`] — characteristic polynomials, dominance, stability indices,
//!   region classification;
//! * [`flow`] — a fixed-step integrator, itineraries, distances to the network;
//! * [`sections`] — phase-space realisations of the section coordinates,
//!   used to compare transition maps against the integrated flow;
//! * [`harness`] — parameter sweeps and Monte Carlo basin estimates.

pub mod flow;
pub mod game;
pub mod harness;
pub mod maps;
pub mod network;
pub mod sections;
pub mod stability;
