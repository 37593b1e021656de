#include "fdirnet/cli.hpp"

int main(int argc, char** argv) { return fdirnet::run_cli(argc, argv); }
