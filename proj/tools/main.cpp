#include "natop/cli.hpp"

int main(int argc, char** argv) { return natop::run(argc, argv); }
