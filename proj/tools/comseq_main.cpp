#include "comseq/cli.hpp"

int main(int argc, char** argv) { return comseq::cli_main(argc, argv); }
