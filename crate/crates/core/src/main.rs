fn main() {
    std::process::exit(ncsim::app::dispatch(std::env::args_os()));
}
