use std::io;

fn main() {
    let code = ensemble_knn::cli::run(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    std::process::exit(code);
}
