#include "logpi1/cli.hpp"

int main(int argc, char** argv) { return logpi1::cli::run(argc, argv); }
