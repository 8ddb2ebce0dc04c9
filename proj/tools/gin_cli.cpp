#include "gin/cli.hpp"

int main(int argc, char** argv) { return gin::run(argc, argv); }
