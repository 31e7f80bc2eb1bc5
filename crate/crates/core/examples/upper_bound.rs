//! Best single-family upper bounds on the example network, by exhaustive
//! partition search and by local search.

use qbnet::bounds::{corollary_bound, ChannelWeightTable, Strategy};
use qbnet::entropy::ChannelSearch;
use qbnet::netmodel::load_network_file;

fn main() -> qbnet::Result<()> {
    let net = load_network_file(concat!(env!("CARGO_MANIFEST_DIR"), "/data/fig1.json"))?;
    let weights = ChannelWeightTable::compute(&net, &ChannelSearch::default())?;
    println!("{} weight entries, all exact: {}", weights.len(), weights.all_exact());
    for fam in net.families() {
        let ex = corollary_bound(&net, &fam.id, &weights, &Strategy::Exhaustive, 0.0)?;
        let ls = corollary_bound(&net, &fam.id, &weights, &Strategy::local(7), 0.0)?;
        println!(
            "{}: exhaustive {:.4} at {} ({} partitions), local search {:.4}",
            fam.id, ex.value, ex.partition_text, ex.evaluated, ls.value
        );
    }
    Ok(())
}
