#include "stparse/cli.hpp"

int main(int argc, char** argv) { return stparse::run_cli(argc, argv); }
