//! Draw repeated samples from a known design and count how often the bounding set covers beta.

use ovbound::{bate, grid, simulate_dgp, summarize, BoundedBox, DgpSpec};

fn main() -> ovbound::Result<()> {
    let mut covered = 0;
    let reps = 10;
    for seed in 0..reps {
        let spec = DgpSpec {
            n: 20_000,
            beta_true: 1.0,
            psi: vec![0.8, 0.0],
            control_variances: vec![1.0, 2.0],
            confounder_variance: 1.5,
            alpha1: 0.6,
            delta1: 0.3,
            noise_variance: 1.0,
            treatment_noise_variance: 1.0,
            orthogonal_loadings: vec![0.0, 0.5],
            seed,
        };
        let (data, truth) = simulate_dgp(&spec)?;
        let s = summarize(&data)?;
        let rmax = truth.rmax.min(0.999).max(s.r2_int + 0.01);
        let bx = BoundedBox::new(0.01, 0.99, s.r2_int, rmax, 0.02)?;
        let dist = bate::distribution(&grid::run(&s, &bx)?, &s)?;
        let hit = dist.bounding_set.contains(truth.beta);
        covered += usize::from(hit);
        println!(
            "seed {seed}: true delta {:.3}, beta~ {:.3}, set {} {}",
            truth.delta,
            s.beta_int,
            dist.bounding_set,
            if hit { "covers" } else { "misses" }
        );
    }
    println!("{covered}/{reps} sets cover beta = 1");
    Ok(())
}
