fn main() {
    // Placeholder until the CLI module lands.
    eprintln!("flatsurf: not yet wired");
    std::process::exit(2);
}
