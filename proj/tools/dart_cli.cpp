#include "dart/cli.hpp"

int main(int argc, char** argv) { return dart::cli::cli_main(argc, argv); }
