#include "defectscope/cli.hpp"

int main(int argc, char** argv) { return dscope::cli_main(argc, argv); }
