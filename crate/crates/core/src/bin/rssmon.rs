fn main() {
    std::process::exit(rss_core::io::cli::run());
}
