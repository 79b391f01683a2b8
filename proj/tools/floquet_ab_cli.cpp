#include "floquet_ab/app/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return floquet_ab::app::run_cli(argc, argv, std::cout, std::cerr); }
