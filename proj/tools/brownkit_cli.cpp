#include "brownkit/cli.hpp"

int main(int argc, char** argv) { return brownkit::cli::run(argc, argv); }
