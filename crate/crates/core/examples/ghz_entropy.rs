//! Entropies of GHZ states, a private state and the squashed-entanglement
//! upper bound for a few party groupings.

use qbnet::entropy::{
    ghz_state, measure_key, multipartite_cmi, private_state, squashed_ent_upper, von_neumann_entropy, DensityMatrix, SystemLabeling,
    Twisting,
};

fn main() -> qbnet::Result<()> {
    for (m, d) in [(2, 2), (3, 2), (3, 3), (4, 2)] {
        let rho = ghz_state(m, d)?.to_density();
        let parts: Vec<String> = (1..=m).map(|i| format!("A{i}")).collect();
        let parts: Vec<&str> = parts.iter().map(|s| s.as_str()).collect();
        println!(
            "GHZ m={m} d={d}: H(A1)={:.3}  E_sq upper={:.3}  (m log d = {:.3})",
            von_neumann_entropy(&rho, "A1")?,
            squashed_ent_upper(&rho, &parts, None)?,
            m as f64 * (d as f64).log2()
        );
    }

    let ghz = ghz_state(3, 2)?;
    println!("I(A1+A2 : A3) = {:.3}", multipartite_cmi(&ghz, &["A1+A2", "A3"], &[])?);

    // identity twisting with a mixed shield still yields a perfect key
    let shield = DensityMatrix::maximally_mixed(SystemLabeling::qubits(["S1", "S2"])?);
    let gamma = private_state(2, 2, &shield, &Twisting::Identity)?;
    let key = measure_key(&gamma, &["K1", "K2"])?;
    println!("private state key: correlated={} uniform={}", key.is_perfectly_correlated(1e-12), key.is_uniform_key(1e-12));
    Ok(())
}
