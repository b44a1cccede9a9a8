fn main() { equisphere::cli::run_main(); }
