#include "posdelay/commands.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return posdelay::cli::run(argc, argv, std::cout, std::cerr);
}
