//! Channel weights of broadcast channels under different groupings of their
//! endpoints (tail first, then heads).

use qbnet::entropy::{channel_esq, ChannelSearch, ChannelSpec};

fn main() -> qbnet::Result<()> {
    let search = ChannelSearch::default();
    let cases = [
        ("ideal qubit, 2 heads", ChannelSpec::ideal(2, 2)),
        ("ideal qutrit, 2 heads", ChannelSpec::ideal(3, 2)),
        ("dephasing p=0.1, 2 heads", ChannelSpec::dephasing(2, 2, 0.1)),
        ("erasure p=0.2, 1 head", ChannelSpec::erasure(2, 1, 0.2)),
    ];
    for (name, spec) in cases {
        let r = spec.heads()?;
        println!("{name}");
        let mut groupings = vec![(0..=r).collect::<Vec<_>>()];
        if r >= 2 {
            let mut heads_together = vec![0];
            heads_together.extend(std::iter::repeat_n(1, r));
            groupings.push(heads_together);
        }
        for classes in groupings {
            let w = channel_esq(&spec, &classes, &search)?;
            println!("  classes {classes:?}: {:.4} bits ({:?})", w.value, w.provenance);
        }
    }
    Ok(())
}
