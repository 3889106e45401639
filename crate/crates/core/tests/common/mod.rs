#![allow(dead_code)]

use std::path::{Path, PathBuf};

use vitsim::params::{derive, parse_config, DerivedParams, Model, PhysicalConstants, SystemParams};

pub fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

pub fn load(name: &str) -> (SystemParams<f64>, DerivedParams<f64>, Model<f64>) {
    let cfg = parse_config(&std::fs::read_to_string(example(name)).unwrap()).unwrap();
    let d = derive(&cfg.params, &PhysicalConstants::default()).unwrap();
    (cfg.params, d, Model::new(&cfg.params, &d))
}
