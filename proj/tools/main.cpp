#include <cstdlib>
#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  socdispatch::cli::Environment env;
  if (const char* tol = std::getenv("SOCDISPATCH_TOL")) env.tol = tol;
  return socdispatch::cli::run({argv + 1, argv + argc}, std::cout, std::cerr, env);
}
