#include "scatpoles/cli.hpp"

int main(int argc, char** argv) { return scatpoles::cli::main(argc, argv); }
