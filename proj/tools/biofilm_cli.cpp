#include "biofilm/cli.hpp"

int main(int argc, char** argv) { return biofilm::cli_main(argc, argv); }
