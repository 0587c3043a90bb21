use rei3bp::dynamics::DynamicsError;
use rei3bp::integrator::{EventSpec, IntOptions, Integrator};

fn main() {
    let integ = Integrator::<f64>::new();
    let opts = IntOptions::with_tol(1e-12);
    let f = |_s: &f64, u: &[f64; 3]| -> Result<[f64; 3], DynamicsError> { Ok([u[1], -u[0], 0.0]) };
    let g = |_: &f64, u: &[f64; 3]| u[0];
    let events = [EventSpec { g: &g, direction: 1, terminal: false }];
    let sol = integ.solve(&f, &[0.0, 1.0, 0.0], (0.5, 13.0), &[], &events, &opts).unwrap();
    println!("crossings: {}", sol.crossings.len());
    for c in &sol.crossings {
        println!("  s = {:.12}  (expected near 2pi k)", c.s);
    }
    println!("accepted {} rejected {}", sol.stats.accepted, sol.stats.rejected);
}
