#include "ctf/cli.hpp"

int main(int argc, char** argv) { return ctf::run_cli(argc, argv); }
