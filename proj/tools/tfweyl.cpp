#include "cli.hpp"

int main(int argc, char** argv) { return tfweyl::cli::main(argc, argv); }
