#include "stablemap/cli.hpp"

int main(int argc, char** argv) { return stablemap::cli::run_cli(argc, argv); }
