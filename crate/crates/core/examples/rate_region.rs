//! Non-dominated rate constraints for two families that share a bottleneck.

use qbnet::bounds::{rate_region, ChannelWeightTable};
use qbnet::entropy::ChannelSearch;
use qbnet::netmodel::{enumerate_partitions, load_network_file};

fn main() -> qbnet::Result<()> {
    let net = load_network_file(concat!(env!("CARGO_MANIFEST_DIR"), "/data/bottleneck.json"))?;
    let weights = ChannelWeightTable::compute(&net, &ChannelSearch::default())?;
    let parts: Vec<_> = enumerate_partitions(net.num_vertices(), None)?.collect();
    let region = rate_region(&net, &weights, &parts, 0.0, None)?;
    let names: Vec<&str> = net.families().iter().map(|f| f.id.as_str()).collect();
    for c in &region {
        let lhs: Vec<String> = c.coefficients.iter().zip(&names).filter(|(k, _)| **k > 0).map(|(k, n)| format!("{k}·r_{n}")).collect();
        println!("{} <= {:.3}   via {}", lhs.join(" + "), c.rhs, c.partition_text);
    }
    let point = [1.0, 1.0];
    println!("rates {point:?} feasible: {}", region.iter().all(|c| c.satisfied_by(&point)));
    Ok(())
}
