//! Build regions from the text grammar and compare exact and Monte Carlo
//! measures.

use pppkit::{parse_region, RngStream};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let specs = [
        "box:0,0;2,1",
        "ball:0,0,0;1",
        "diff(box:0,0;2,1, ball:0.5,0.5;0.25)",
        "union(box:0,0;1,1, box:2,0;3,1)",
        "inter(box:0,0;1,1, ball:0,0;0.5)",
        "union(ball:0,0;1, ball:1,0;1)",
    ];
    let mut rng = RngStream::new(1, 0);
    for s in specs {
        let r = parse_region(s)?;
        let m = r.measure();
        let mc = r.measure_mc(&mut rng, 200_000)?;
        println!(
            "{:<40} {:?} {:.5} +- {:.1e}   mc {:.5} +- {:.1e}",
            r.to_string(),
            m.method,
            m.value,
            m.std_error,
            mc.value,
            mc.std_error
        );
    }

    let lens = parse_region("inter(ball:0,0;1, ball:1,0;1)")?;
    // closed form: 2 pi / 3 - sqrt(3) / 2
    let exact = 2.0 * std::f64::consts::PI / 3.0 - 3f64.sqrt() / 2.0;
    println!("lens {:.5}, closed form {exact:.5}", lens.measure().value);
    println!("(0.5, 0) in lens: {}", lens.contains(&[0.5, 0.0])?);
    Ok(())
}
