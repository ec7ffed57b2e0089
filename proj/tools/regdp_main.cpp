#include "regdp/cli.hpp"

int main(int argc, char** argv) { return regdp::cli::run(argc, argv); }
