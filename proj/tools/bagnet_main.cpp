#include "bagnet/cli.hpp"

int main(int argc, char** argv) { return bagnet::cli::run(argc, argv); }
