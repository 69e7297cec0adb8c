#include "cph/cli.hpp"

int main(int argc, char** argv) { return cph::cli::run(argc, argv); }
