#include "setrisk/cli.hpp"

int main(int argc, char** argv) { return setrisk::run_cli(argc, argv); }
