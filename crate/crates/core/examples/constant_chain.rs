//! Audit of the wrapped-Gaussian constants behind the cycle bound.

use clsi::graphs::{cyclic_bound, verify_constant_chain};

fn main() -> clsi::Result<()> {
    let r = verify_constant_chain();
    println!("grid {} points, range [{:.6}, {:.6}]", r.grid_points, r.grid_min, r.grid_max);
    println!("analytic lower {:.10} upper {:.10}", r.lower, r.upper);
    println!("2 lower/upper = {:.4} (needs >= 0.8)", r.ratio);
    for n in r.chain_ns {
        println!("n={n}: cyclic bound {:.6e} = 16/(45*{})", cyclic_bound(n)?, n * n);
    }
    println!("passed: {}", r.passed);
    Ok(())
}
