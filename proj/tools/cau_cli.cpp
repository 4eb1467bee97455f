#include <iostream>

#include "cau/frontend.hpp"

int main(int argc, char** argv) { return cau::cli_main(argc, argv, std::cout, std::cerr); }
