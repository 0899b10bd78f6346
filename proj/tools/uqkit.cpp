#include "uq/cli.hpp"

int main(int argc, char** argv) { return uq::cli::run(argc, argv); }
