#include <string>
#include <vector>

#include "fplnn/cli.hpp"

int main(int argc, char** argv) {
    return fplnn::cli::dispatch(std::vector<std::string>(argv, argv + argc));
}
