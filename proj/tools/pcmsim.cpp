#include "pcm/cli.hpp"

int main(int argc, char** argv) { return pcm::cli_main(argc, argv); }
