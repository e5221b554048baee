fn main() {
    let (code, report) = cli::run(std::env::args_os());
    println!("{report}");
    std::process::exit(code);
}
