//! Distance-dependent blocking probability of a link by K random bodies,
//! compared with an empirical estimate from random placements.

use mmwave_d2d::montecarlo::empirical_block_profile;
use mmwave_d2d::{AnnulusRegion, BlockProbProfile};

fn main() -> mmwave_d2d::Result<()> {
    let region = AnnulusRegion::new(0.3, 2.1)?;
    let (w, k) = (0.3, 36);
    let analytic = BlockProbProfile::new(region, w, k)?;
    let empirical = empirical_block_profile(&region, w, k as usize, 12, 4000, 7)?;
    println!("branch point at r = {:.4} m", analytic.branch_point());
    println!("{:>6} {:>10} {:>10}", "r_m", "analytic", "empirical");
    for i in 0..12 {
        let r = 0.3 + 1.8 * (i as f64 + 0.5) / 12.0;
        println!("{r:>6.3} {:>10.4} {:>10.4}", analytic.block_prob(r)?, empirical.block_prob(r)?);
    }
    Ok(())
}
