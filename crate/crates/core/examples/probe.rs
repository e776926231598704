use kolmo_core::catalog::{load_model, ModelId};
use kolmo_core::flow;
use kolmo_core::system::point;
use std::collections::BTreeMap;

fn main() {
    let e = load_model(ModelId::Pp2, &BTreeMap::new()).unwrap();
    let traj = flow::shoot_heteroclinic(&e.system, point(1.0, 1.0), None, 3.0, 1e-5, 1e-5).unwrap();
    let mid = traj.samples.iter().find(|s| s.state.x >= 0.2).unwrap();
    for rel in [1e-3f64, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8] {
        let off = point(mid.state.x * (1.0 + rel), mid.state.y * (1.0 - rel));
        match flow::backward_slope(&e.system, off, 100.0) {
            Ok(s) => println!("offset {rel:.0e}: slope {s:.7} err {:.2e}", (s - 3.0).abs()),
            Err(err) => println!("offset {rel:.0e}: {err}"),
        }
    }
}
