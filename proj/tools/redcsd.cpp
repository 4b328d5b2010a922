#include "redcsd/cli.hpp"

int main(int argc, char** argv) { return redcsd::run_cli(argc, argv); }
