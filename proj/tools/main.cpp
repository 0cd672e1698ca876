#include "advgd/cli.hpp"

int main(int argc, char** argv) { return advgd::cli::run_cli(argc, argv); }
