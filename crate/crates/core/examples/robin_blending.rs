//! Sigmoid blending between displacement and traction conditions along the
//! boundary parameter.

use unfitted_rbffd::smoothing::{robin_eval, RobinCoefficients};

fn main() -> unfitted_rbffd::Result<()> {
    // traction between t = 2.75 and t = 3.55, displacement elsewhere
    let rc = RobinCoefficients::new(vec![2.75, 3.55], 20.0, vec![0])?;
    println!("     t   kappa0   kappa1");
    for i in 0..=32 {
        let t = 2.0 + 2.0 * i as f64 / 32.0;
        let (k0, k1) = robin_eval(&rc, t);
        println!("{t:6.3}  {k0:7.4}  {k1:7.4}");
    }
    Ok(())
}
