#include "textfeat/cli.hpp"

int main(int argc, char** argv) { return textfeat::run_cli(argc, argv); }
