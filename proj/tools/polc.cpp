#include "polc/cli.hpp"

int main(int argc, char** argv) { return polc::cli::cli_main(argc, argv); }
