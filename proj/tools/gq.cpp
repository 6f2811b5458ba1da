#include "gq/cli.hpp"

int main(int argc, char **argv) { return gq::cli::run(argc, argv); }
