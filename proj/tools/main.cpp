#include <iostream>

#include "delreg/cli.hpp"

int main(int argc, char** argv) {
    return delreg::cli::run(argc, argv, std::cout, std::cerr);
}
