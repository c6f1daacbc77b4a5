//! C ABI for the formlab spectral laboratory. Placeholder; surface lands
//! together with the core solvers.
