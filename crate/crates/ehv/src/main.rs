fn main() {
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr().lock());
    let code = ehv::cli::run(std::env::args_os(), &mut ehv::cli::Io::from_env(&mut out, &mut err));
    std::process::exit(code);
}
