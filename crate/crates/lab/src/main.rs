use glasscut::cli;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let code = match cli::main_entry(args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<cli::UsageError>().is_some() {
                2
            } else {
                1
            }
        }
    };
    std::process::exit(code);
}
