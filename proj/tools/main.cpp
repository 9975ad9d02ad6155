#include "mined/cli.hpp"

int main(int argc, char** argv) { return mined::cli::run(argc, argv); }
