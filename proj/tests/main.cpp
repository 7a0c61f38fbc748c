#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include <cstdio>

#include "support.hpp"

int main(int argc, char** argv) {
  std::printf("RNG_SEED=%llu\n", static_cast<unsigned long long>(testing::seed()));
  doctest::Context ctx(argc, argv);
  return ctx.run();
}
