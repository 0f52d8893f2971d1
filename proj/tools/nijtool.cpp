#include "nij/cli/cli.hpp"

int main(int argc, char** argv) { return nij::cli::main_entry(argc, argv); }
