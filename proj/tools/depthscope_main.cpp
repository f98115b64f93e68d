#include <vector>

#include "depthscope/cli/run.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return depthscope::cli::run(std::move(args));
}
