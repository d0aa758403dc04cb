use std::time::Instant;

use thermal_jcm_core::oracle::{verify_identity, Identity, OracleConfig};

#[test]
fn catalog_holds_up_to_sixth_power() {
    let cfg = OracleConfig::identities();
    let start = Instant::now();
    let mut worst = 0.0f64;
    for id in Identity::catalog() {
        for n in id.powers(6) {
            let dev = verify_identity(id, n, &cfg).unwrap();
            eprintln!("{:<24} n={n} dev={dev:.3e}", id.name());
            assert!(dev < 1e-9, "{} n={n}: {dev}", id.name());
            worst = worst.max(dev);
        }
    }
    eprintln!("worst {worst:.3e} in {:?}", start.elapsed());
}
