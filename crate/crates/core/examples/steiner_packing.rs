//! Steiner tree packing against the min Steiner cut, on a triangle and on
//! the example network.

use qbnet::lower::{aggregated_rate, brute_force_packing, min_steiner_cut, pack_steiner_trees, Copies, GhzHypergraph, PackingMethod};
use qbnet::netmodel::load_network_file;

fn main() -> qbnet::Result<()> {
    let tri = GhzHypergraph::from_names(&["A", "B", "C"], &[("ab", &["A", "B"]), ("bc", &["B", "C"]), ("ca", &["C", "A"])])?;
    let s = [0, 1, 2];
    let p = pack_steiner_trees(&tri, &s, PackingMethod::Exact)?;
    let cut = min_steiner_cut(&tri, &s)?;
    println!("triangle: {} tree(s), brute force {}, min cut {} {:?}", p.count, brute_force_packing(&tri, &s, 12)?, cut.value, cut.witness);
    if let Some(floor) = p.lau_floor {
        println!("  guaranteed by cut/26: {floor}");
    }

    let net = load_network_file(concat!(env!("CARGO_MANIFEST_DIR"), "/data/fig1.json"))?;
    let copies = Copies::parse(concat!(env!("CARGO_MANIFEST_DIR"), "/data/fig1_copies.json"))?;
    for fam in net.families() {
        let r = aggregated_rate(&net, &fam.id, &copies, PackingMethod::Exact)?;
        println!("{}: {} GHZ state(s) per round, cut certificate {}", fam.id, r.achievable, r.packing.upper_certificate);
        for t in &r.packing.trees {
            println!("  tree {:?}", t.edge_ids);
        }
    }
    Ok(())
}
