#include "pcmsim/cli.hpp"

int main(int argc, char **argv) { return pcmsim::cli::run_cli(argc, argv); }
