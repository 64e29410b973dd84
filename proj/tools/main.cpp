#include "pslra/cli.hpp"

int main(int argc, char** argv) { return pslra::cli::run(argc, argv); }
