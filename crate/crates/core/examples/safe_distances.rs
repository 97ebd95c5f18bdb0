//! Minimum safe gaps for following and side-by-side driving under the
//! default parameters, and how they grow with the response time.
//!
//! Run with `cargo run --example safe_distances`.

use rss_core::kernel::{safe_lateral_distance, safe_longitudinal_distance, stopping_distance};
use rss_core::RssParameters;

fn main() {
    let p = RssParameters::default().validate().expect("defaults are valid");
    println!("longitudinal gap (m), rear speed down, front speed across");
    let speeds = [0.0, 10.0, 20.0, 30.0, 40.0];
    print!("{:>8}", "");
    for vf in speeds {
        print!("{vf:>9.0}");
    }
    println!();
    for vr in speeds {
        print!("{vr:>8.0}");
        for vf in speeds {
            print!("{:>9.2}", safe_longitudinal_distance(vr, vf, &p).expect("speeds are non-negative"));
        }
        println!();
    }

    println!("\nstopping distance after one response time of acceleration");
    for v in speeds {
        println!("  {v:>4.0} m/s -> {:>7.2} m", stopping_distance(v, &p));
    }

    println!("\nlateral gap (m); positive lateral velocity points right, actor 1 is on the left");
    for (v1, v2, what) in [
        (0.0, 0.0, "both holding their line"),
        (0.5, -0.5, "drifting towards each other"),
        (-0.5, 0.5, "drifting apart"),
        (-5.0, 5.0, "diverging fast"),
    ] {
        println!("  {what:<28} {:>6.3}", safe_lateral_distance(v1, v2, &p));
    }

    println!("\nfollowing gap at 25 m/s behind a car at 25 m/s as the response time grows");
    for rho in [0.25, 0.5, 1.0, 1.5, 2.0] {
        let q = RssParameters { response_time_s: rho, ..RssParameters::default() }.validate().expect("valid");
        println!("  rho = {rho:>4.2} s -> {:>6.2} m", safe_longitudinal_distance(25.0, 25.0, &q).expect("valid"));
    }
}
