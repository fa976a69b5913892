//! A three-node network: exact inference with point tables, then bounds once
//! the root becomes an interval.

use credal_cfr::credal::{bayes_infer, credal_infer, Evidence, NetworkBuilder, Query};
use credal_cfr::estimate::ProbabilityInterval;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut b = NetworkBuilder::new("toy");
    b.variable("H", ["h", "hc"])?
        .variable("G", ["g", "gc"])?
        .variable("Q", ["q", "qc"])?;
    b.point_cpt("H", &[], vec![vec![0.4, 0.6]])?
        .point_cpt("G", &["H"], vec![vec![0.3, 0.7], vec![0.2, 0.8]])?
        .point_cpt(
            "Q",
            &["G", "H"],
            vec![
                vec![0.5, 0.5],
                vec![0.6, 0.4],
                vec![0.2, 0.8],
                vec![0.1, 0.9],
            ],
        )?;
    let net = b.build()?;
    let query = Query::new("H", "h");
    let evidence = Evidence::new().hard("G", "g").hard("Q", "q");
    println!("P(h | g, q) = {:.4}", bayes_infer(&net, &query, &evidence)?);

    let root = vec![
        ProbabilityInterval::new(0.3, 0.5)?,
        ProbabilityInterval::new(0.5, 0.7)?,
    ];
    let h = net.index_of("H")?;
    let imprecise = net.map_rows(|v, _, row| if v == h { root.clone() } else { row.to_vec() })?;
    let iv = credal_infer(&imprecise, &query, &evidence)?;
    println!(
        "with P(h) in [0.3, 0.5]: [{:.4}, {:.4}]",
        iv.lower(),
        iv.upper()
    );
    Ok(())
}
