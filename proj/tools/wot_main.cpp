#include <iostream>

#include "wot/cli.hpp"

int main(int argc, char** argv) { return wot::run_cli(argc, argv, std::cout); }
