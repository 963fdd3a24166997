#include "rigidsim/cli.hpp"

int main(int argc, char** argv) { return rigidsim::cli::main(argc, argv); }
