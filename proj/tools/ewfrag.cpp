#include "ewfrag/cli.hpp"

int main(int argc, char** argv) { return ewfrag::cli::run(argc, argv); }
