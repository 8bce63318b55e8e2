#include "doctest.h"

#include "conscript/rng.hpp"

using namespace conscript;

TEST_CASE("identical seeds give identical streams") {
  DeterministicRng a(42), b(42);
  CHECK(a.bytes(64) == b.bytes(64));
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge") {
  DeterministicRng a(1), b(2);
  CHECK(a.bytes(32) != b.bytes(32));
}

TEST_CASE("derived streams are independent of the parent position") {
  DeterministicRng a(7);
  DeterministicRng child_before = a.derive("x");
  a.bytes(100);
  DeterministicRng child_after = a.derive("x");
  CHECK(child_before.bytes(32) == child_after.bytes(32));

  DeterministicRng other = a.derive("y");
  CHECK(a.derive("x").bytes(32) != other.bytes(32));
}

TEST_CASE("uniform stays in range and covers it") {
  DeterministicRng rng(3);
  bool seen[10] = {};
  for (int i = 0; i < 1000; i++) {
    uint64_t v = rng.uniform(10);
    REQUIRE(v < 10);
    seen[v] = true;
  }
  for (bool s : seen) CHECK(s);
}

TEST_CASE("coin respects degenerate probabilities") {
  DeterministicRng rng(4);
  for (int i = 0; i < 100; i++) {
    CHECK_FALSE(rng.coin(0.0));
    CHECK(rng.coin(1.0));
  }
}
