#include "latgibbs/cli.hpp"

int main(int argc, char** argv) { return latgibbs::cli_main(argc, argv); }
