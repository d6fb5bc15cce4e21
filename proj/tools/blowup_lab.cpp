#include "blowup/lab.hpp"

int main(int argc, char** argv) { return blowup::lab::run_cli(argc, argv); }
