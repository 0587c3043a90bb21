use rei3bp::melnikov::melnikov_direct;

fn main() {
    // isolate: evaluate at two xi values pi apart and average: osc parts of
    // odd harmonics cancel; compare against mpmath L0 = 0.1127537427155532716...
    let g = 2.0;
    for tol in [1e-9, 1e-10, 1e-11, 1e-12] {
        let (a, ea) = melnikov_direct(0.0, 0.0, g, tol).unwrap();
        let (b, eb) = melnikov_direct(0.0, std::f64::consts::PI, g, tol).unwrap();
        println!("tol {tol:.0e}: avg2 = {:.15}  errs {ea:.2e} {eb:.2e}", 0.5 * (a + b));
    }
    println!("mpmath L0   = 0.112753742715553");
}
