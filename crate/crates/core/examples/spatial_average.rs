//! Coverage averaged over random user positions under the LOS ball model,
//! including the distribution of interferer channel scales.

use mmwave_d2d::coverage::ErgodicOptions;
use mmwave_d2d::{
    los_ball, upa_pattern, AnnulusRegion, BlockProbProfile, LinkModel, ReferenceLink, SpatialCoverage,
};

fn main() -> mmwave_d2d::Result<()> {
    let region = AnnulusRegion::new(0.3, 2.1)?;
    let k = 36;
    let ball = los_ball(&BlockProbProfile::new(region, 0.3, k)?)?;
    let link = LinkModel::new(4, 2, 2.0, 4.0, 0.01, 1.0)?;
    let reference = ReferenceLink::los(0.3, 0.0, &link)?;
    let (tx, rx) = (upa_pattern(4)?, upa_pattern(4)?);
    let model = SpatialCoverage::new(k, &link, &tx, &rx, &reference, &region, &ball)?;

    let density = model.density();
    println!("interferer scale CDF (mass {:.6}):", density.total_mass());
    for w in [1e-3, 1e-2, 1e-1, 1.0, 10.0] {
        println!("  F({w:e}) = {:.4}", density.cdf(w));
    }
    for db in [-10.0, 0.0, 10.0, 20.0] {
        println!("P(SINR > {db:>5} dB) = {:.5}", model.coverage(10f64.powf(db / 10.0))?);
    }
    let se = model.ergodic(&ErgodicOptions::default())?;
    println!("ergodic SE = {:.4} bit/s/Hz", se.value);
    Ok(())
}
