#include "pfnet/cli.hpp"

int main(int argc, char** argv) {
    return pfnet::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
