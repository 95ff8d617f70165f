// Command line entry point. Subcommand wiring lives in rankbias/cli.hpp.

#include "rankbias/cli.hpp"

int main(int argc, char** argv) { return rankbias::cli::run_cli(argc, argv); }
