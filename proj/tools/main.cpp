#include "devs/cli.hpp"

int main(int argc, char** argv) { return devs::cli::main(argc, argv); }
