//! Equivalent LOS ball radius and expected LOS count as the body
//! population and body size change.

use mmwave_d2d::{los_ball, AnnulusRegion, BlockProbProfile};

fn main() -> mmwave_d2d::Result<()> {
    let region = AnnulusRegion::new(0.3, 2.1)?;
    println!("{:>4} {:>6} {:>8} {:>8}", "K", "W_m", "R_B_m", "rho");
    for k in [8, 20, 36, 60] {
        for w in [0.2, 0.3, 0.5] {
            let ball = los_ball(&BlockProbProfile::new(region, w, k)?)?;
            println!("{k:>4} {w:>6.2} {:>8.4} {:>8.3}", ball.radius, ball.expected_los);
        }
    }
    Ok(())
}
