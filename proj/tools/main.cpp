#include <iostream>

#include "xchess/cli.hpp"

int main(int argc, char** argv) {
    try {
        return xchess::run_cli(argc, argv, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return xchess::kExitInternal;
    }
}
