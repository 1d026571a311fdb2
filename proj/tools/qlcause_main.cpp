#include "qlcause/cli.hpp"

int main(int argc, char** argv) { return qlcause::cli::run(argc, argv); }
