#include "fogfair/cli.hpp"

int main(int argc, char** argv) { return fogfair::cli_main(argc, argv); }
