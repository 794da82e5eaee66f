use std::time::Instant;

use mumford_core::examples::{g2p, g2p2, BetaExponents};
use mumford_core::schottky::{check_descent_condition_c, verify_figure};

#[test]
fn g2p2_verifies() {
    let d = g2p2();
    let rep = verify_figure(&d.figure);
    assert!(rep.ok, "{:?}", rep.failures());
    let desc = check_descent_condition_c(&d, 8);
    assert!(desc.ok);
    let table: Vec<String> = desc.table.iter().map(|e| e.to_string()).collect();
    assert_eq!(
        table,
        ["σ(g1) = g1⁻¹", "σ(g2) = g2", "τ(g1) = g1", "τ(g2) = g2⁻¹"]
    );
}

#[test]
fn g2p_verifies() {
    for p in [2, 3] {
        let now = Instant::now();
        let d = g2p(p, BetaExponents::default()).unwrap();
        let rep = verify_figure(&d.figure);
        assert!(rep.ok, "p = {p}: {:?}", rep.failures());
        assert_eq!(rep.rank, 2 * p as usize);
        let desc = check_descent_condition_c(&d, 8);
        assert!(desc.ok, "{:?}", desc);
        eprintln!("p = {p}: {:?}", now.elapsed());
    }
}
