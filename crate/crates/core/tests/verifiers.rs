use std::time::Instant;

use duality_lab::theorems::{negative_control, verify, Params, THEOREM_IDS};

#[test]
fn every_verifier_passes_and_every_control_fails() {
    let params = Params {
        trials: 6,
        seed: 11,
        ..Params::default()
    };
    let mut bad = Vec::new();
    for id in THEOREM_IDS {
        let t = Instant::now();
        let r = verify(id, &params).unwrap();
        println!("{} [{:.2?}]", r.summary(), t.elapsed());
        if !r.passed() {
            bad.push(format!("{id} failed"));
        }
        let t = Instant::now();
        let n = negative_control(id, &params).unwrap();
        println!("control {} [{:.2?}]", n.summary(), t.elapsed());
        if n.passed() {
            bad.push(format!("{id} control passed"));
        }
    }
    assert!(bad.is_empty(), "{bad:?}");
}
