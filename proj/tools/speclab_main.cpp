#include "speclab/cli.hpp"

int main(int argc, char** argv) { return speclab::cli::main(argc, argv); }
