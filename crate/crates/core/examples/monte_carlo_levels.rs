//! Seeded Monte Carlo comparison of the placement assumptions, from
//! self-blocking bodies down to the LOS ball.

use mmwave_d2d::montecarlo::compare_levels;
use mmwave_d2d::{
    los_ball, upa_pattern, AnnulusRegion, AssumptionLevel, BlockProbProfile, LinkModel, Metric,
    MonteCarlo, ReferenceLink,
};

fn main() -> mmwave_d2d::Result<()> {
    let region = AnnulusRegion::new(0.3, 2.1)?;
    let (k, w) = (36, 0.3);
    let profile = BlockProbProfile::new(region, w, k)?;
    let ball = los_ball(&profile)?;
    let link = LinkModel::new(4, 2, 2.0, 4.0, 0.01, 1.0)?;
    let mc = MonteCarlo {
        region,
        k: k as usize,
        blockage_diameter: w,
        reference: ReferenceLink::los(0.3, 0.0, &link)?,
        link,
        tx: upa_pattern(4)?,
        rx: upa_pattern(4)?,
        level: AssumptionLevel::IndependentProcesses,
    };
    let levels = [
        AssumptionLevel::Orbital { d: 0.25 },
        AssumptionLevel::IndependentProcesses,
        AssumptionLevel::IndependentBlocking { profile },
        AssumptionLevel::LosBall { ball },
    ];
    let betas = vec![0.1, 1.0, 10.0, 100.0];
    let cmp = compare_levels(&mc, &levels, &Metric::Coverage(betas.clone()), 2000, 11)?;
    print!("{:>8}", "beta");
    for l in &cmp.levels {
        print!(" {l:>16}");
    }
    println!();
    for (i, b) in betas.iter().enumerate() {
        print!("{b:>8}");
        for est in &cmp.estimates {
            print!(" {:>8.4} ±{:.4}", est[i].mean, est[i].std_error);
        }
        println!();
    }
    for (i, j, gap, z) in &cmp.pairwise {
        println!("{} vs {}: max gap {gap:.4} ({z:.1} σ)", cmp.levels[*i], cmp.levels[*j]);
    }
    Ok(())
}
