#include "prekopa_lab/cli.hpp"

int main(int argc, char** argv) { return prekopa::cli::main(argc, argv); }
