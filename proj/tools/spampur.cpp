#include "spampur/cli.hpp"

int main(int argc, char** argv) { return spampur::cli::main_entry(argc, argv); }
