use clap::Parser;
use sumhess::harness::{run, RunManifest};

fn main() {
    let manifest = RunManifest::parse();
    std::process::exit(run(&manifest));
}
