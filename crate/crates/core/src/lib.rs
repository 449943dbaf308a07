//! Exact computations with self-injective bound quiver algebras: path-basis
//! construction, Frobenius forms and Nakayama automorphisms, bimodule
//! syzygies with twist recognition, stably-inner certificates and the
//! closed-form stable Calabi-Yau classification.

pub mod algebra;
pub mod bimod;
pub mod cli;
pub mod classify;
pub mod exactlin;
pub mod families;
pub mod morph;
