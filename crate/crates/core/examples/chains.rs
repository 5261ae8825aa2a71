//! Random premise-satisfying three-chains, stars and four-chains, with the
//! conclusions each analysis reaches.

use curvtensor::campaign::{four_chain_fixture, star_fixture, three_chain_fixture};
use curvtensor::chain::{analyze_four_chain, analyze_star, analyze_three_chain, ChainReport};
use curvtensor::report::Status;
use curvtensor::seed::rng_for;
use curvtensor::Rational;

fn show(label: &str, r: &ChainReport) {
    let failed = r.conclusions.iter().filter(|c| c.status == Status::Fail).count();
    println!("{label}: ranks {:?}, exact {:?}, {} conclusions, {failed} failed", r.ranks, r.exact, r.conclusions.len());
}

fn main() -> curvtensor::Result<()> {
    for t in 0..4u64 {
        let mut rng = rng_for(11, &[t]);
        let (ctx, f) = three_chain_fixture::<Rational, _>(&mut rng)?;
        show("three", &analyze_three_chain(&ctx, &f.a, &f.b, &f.c, f.eps, f.delta)?);

        let (ctx, f) = star_fixture::<Rational, _>(&mut rng)?;
        show("star ", &analyze_star(&ctx, &f.a, &f.legs, &f.eps)?);

        let (ctx, f) = four_chain_fixture::<Rational, _>(&mut rng)?;
        let [e1, e2, e3] = f.eps;
        show("four ", &analyze_four_chain(&ctx, &f.a, &f.b, &f.c, &f.d, e1, e2, e3)?);
    }
    Ok(())
}
