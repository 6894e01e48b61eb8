//! Throughput against transmit probability and body diameter, analysed with
//! the LOS ball model.

use mmwave_d2d::coverage::ErgodicOptions;
use mmwave_d2d::spatial::throughput;
use mmwave_d2d::{
    los_ball, upa_pattern, AnnulusRegion, BlockProbProfile, LinkModel, ReferenceLink, SpatialCoverage,
};

fn main() -> mmwave_d2d::Result<()> {
    let region = AnnulusRegion::new(0.3, 2.1)?;
    let k = 36;
    let (tx, rx) = (upa_pattern(16)?, upa_pattern(16)?);
    let opts = ErgodicOptions { points: 400, ..Default::default() };
    println!("{:>6} {:>6} {:>10} {:>10}", "W_m", "p_t", "SE", "throughput");
    for w in [0.2, 0.4, 0.6] {
        let ball = los_ball(&BlockProbProfile::new(region, w, k)?)?;
        for p_t in [0.1, 0.5, 1.0] {
            let link = LinkModel::new(4, 2, 2.0, 4.0, 0.01, p_t)?;
            let reference = ReferenceLink::los(0.3, 0.0, &link)?;
            let se = SpatialCoverage::new(k, &link, &tx, &rx, &reference, &region, &ball)?
                .ergodic(&opts)?
                .value;
            println!("{w:>6.2} {p_t:>6.2} {se:>10.4} {:>10.4}", throughput(p_t, se));
        }
    }
    Ok(())
}
