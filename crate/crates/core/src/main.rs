use clap::Parser;

fn main() {
    let cli = gonal::cli::Cli::parse();
    match gonal::cli::run(cli) {
        Ok(output) => {
            for (path, content) in &output.files {
                if let Some(parent) = path.parent() {
                    if !parent.as_os_str().is_empty() {
                        if let Err(e) = std::fs::create_dir_all(parent) {
                            eprintln!("{}", gonal::cli::error_json(&e.into()));
                            std::process::exit(2);
                        }
                    }
                }
                if let Err(e) = std::fs::write(path, content) {
                    eprintln!("{}", gonal::cli::error_json(&e.into()));
                    std::process::exit(2);
                }
            }
            print!("{}", output.stdout);
        }
        Err(e) => {
            eprintln!("{}", gonal::cli::error_json(&e));
            std::process::exit(e.code() as i32);
        }
    }
}
