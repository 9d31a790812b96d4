#include "tradeoff/cli.hpp"

int main(int argc, char** argv) { return tradeoff::cli::run(argc, argv); }
