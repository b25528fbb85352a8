#include "tsogame/cli.hpp"

int main(int argc, char** argv) {
    return tsogame::cli_main(argc, argv);
}
