fn main() {
    let stdin = std::io::stdin();
    let code = topolab_cli::main_with(std::env::args().collect(), &mut stdin.lock());
    std::process::exit(code);
}
