//! Exact SINR and rate coverage for a fixed lattice of co-located users,
//! with blockage resolved geometrically.

use mmwave_d2d::coverage::ErgodicOptions;
use mmwave_d2d::{
    blocked_set, grid_placement, omega_vector, upa_pattern, AnnulusRegion, ConditionalCoverage,
    LinkModel, ReferenceLink,
};

fn main() -> mmwave_d2d::Result<()> {
    let region = AnnulusRegion::new(0.3, 2.1)?;
    let users = grid_placement(7, 0.6, &region, 0.3)?;
    let report = blocked_set(&users, false)?;
    println!("{} interferers, {} blocked", users.len(), report.blocked_count());

    let link = LinkModel::new(4, 2, 2.0, 4.0, 0.01, 1.0)?;
    let reference = ReferenceLink::los(0.3, 0.0, &link)?;
    let (tx, rx) = (upa_pattern(4)?, upa_pattern(16)?);
    let omega = omega_vector(users.transmitters(), &report.los_flags(), &reference, &rx, &link)?;
    let model = ConditionalCoverage::new(&link, &tx, &reference)?;

    for db in [-10.0, 0.0, 10.0, 20.0, 30.0] {
        let beta = 10f64.powf(db / 10.0);
        println!("P(SINR > {db:>5} dB) = {:.5}", model.coverage(beta, &omega)?);
    }
    for eta in [1.0, 2.0, 4.0] {
        println!("P(rate > {eta} bit/s/Hz) = {:.5}", model.rate_ccdf(eta, &omega)?);
    }
    let se = model.ergodic(&omega, &ErgodicOptions::default())?;
    println!("ergodic SE = {:.4} bit/s/Hz ({} points)", se.value, se.points);
    Ok(())
}
