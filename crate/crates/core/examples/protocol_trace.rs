//! Replays a repeater protocol and prints the partition entanglement after
//! each step next to the budget the network's channel uses allow.

use qbnet::bounds::ChannelWeightTable;
use qbnet::entropy::ChannelSearch;
use qbnet::netmodel::{enumerate_partitions, load_network_file, Partition};
use qbnet::simverify::{verify_theorem1_trace, ProtocolScript};

fn main() -> qbnet::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let net = load_network_file(format!("{dir}/chain.json"))?;
    let script = ProtocolScript::from_json(&std::fs::read_to_string(format!("{dir}/scripts/chain_swap.json"))?)?;
    let weights = ChannelWeightTable::compute(&net, &ChannelSearch::default())?;

    let r = verify_theorem1_trace(&net, &script, &Partition::discrete(net.num_vertices()), &weights)?;
    println!("partition {}", r.partition);
    for s in &r.steps {
        println!("  {:<14} value {:.3}  budget {:.3}  {}", s.op, s.value, s.budget, if s.exact { "exact" } else { "surrogate" });
    }

    let mut worst = 0usize;
    for p in enumerate_partitions(net.num_vertices(), None)? {
        worst += verify_theorem1_trace(&net, &script, &p, &weights)?.violations;
    }
    println!("violations over all partitions: {worst}");
    Ok(())
}
