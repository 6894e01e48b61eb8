//! Beamwidth, main/side-lobe gains and main-lobe alignment probability of
//! square uniform planar arrays.

use mmwave_d2d::antenna::{mainlobe_prob, radiated_power_integral, upa_pattern};

fn main() -> mmwave_d2d::Result<()> {
    println!("{:>4} {:>10} {:>10} {:>10} {:>10} {:>8}", "N", "beam_deg", "G_dB", "g_dB", "p_M", "power");
    for n in [1, 4, 16, 64] {
        let p = upa_pattern(n)?;
        println!(
            "{:>4} {:>10.2} {:>10.4} {:>10.4} {:>10.6} {:>8.4}",
            n,
            p.beamwidth_deg(),
            p.gain_main_db(),
            p.gain_side_db(),
            mainlobe_prob(&p),
            radiated_power_integral(&p)
        );
    }
    Ok(())
}
