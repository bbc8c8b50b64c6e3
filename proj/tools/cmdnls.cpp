#include "cmdnls/cli.hpp"

int main(int argc, char** argv) { return cmdnls::run_cli(argc, argv); }
