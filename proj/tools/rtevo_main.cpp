#include <vector>

#include "rtevo/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return rtevo::run_cli(args);
}
