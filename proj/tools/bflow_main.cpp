#include "bflow/cli.hpp"

int main(int argc, char** argv) { return bflow::run_cli(argc, argv); }
