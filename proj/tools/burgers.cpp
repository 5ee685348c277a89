#include "sburgers/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return sburgers::run_cli(argc, argv, std::cout, std::cerr); }
