#include <iostream>

#include "bhldp/io/cli.hpp"

int main(int argc, char** argv) { return bhldp::io::run_cli(argc, argv, std::cout, std::cerr); }
