fn main() {
    let (output, code) = cheby2w::cli::run(std::env::args());
    println!("{output}");
    std::process::exit(code);
}
