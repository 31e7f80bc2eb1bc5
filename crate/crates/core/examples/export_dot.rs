//! Prints the example network as Graphviz, with the best partition for the
//! first family drawn as clusters.

use qbnet::bounds::{corollary_bound, ChannelWeightTable, Strategy};
use qbnet::entropy::ChannelSearch;
use qbnet::netmodel::{export_dot, load_network_file};

fn main() -> qbnet::Result<()> {
    let net = load_network_file(concat!(env!("CARGO_MANIFEST_DIR"), "/data/fig1.json"))?;
    let weights = ChannelWeightTable::compute(&net, &ChannelSearch::default())?;
    let best = corollary_bound(&net, &net.families()[0].id, &weights, &Strategy::Exhaustive, 0.0)?;
    print!("{}", export_dot(&net, Some(&best.partition())));
    Ok(())
}
