//! Prints the built-in default run configuration as TOML.

fn main() {
    print!("{}", humsim_cli::config::RunConfig::default().to_toml());
}
