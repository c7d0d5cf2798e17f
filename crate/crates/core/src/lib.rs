//! Certified piecewise-linear curve systems on the torus, the annulus and the
//! torus with handles, with exact intersection checks, curve surgeries and
//! sidedness obstructions for fine curve graphs.

pub mod exactgeom;
pub mod graph;
pub mod surfaces;
pub mod realizer;
pub mod verifier;
pub mod surgeries;
pub mod obstructions;
pub mod shell;

/// Maps `f` over `items`, on the rayon pool when the `parallel` feature is on.
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
