#include "doctest.h"
#include "oracles.hpp"

// Runs last (link order): every specialized evaluation path the library
// advertises must have been checked against a literal-loop reference by one
// of the preceding test cases.
TEST_CASE("every fast path was exercised against its oracle") {
  const auto missing = ustatboot::oracle::unmarked_fast_paths();
  for (const auto& name : missing)
    MESSAGE("fast path without an oracle pairing: ", name);
  CHECK(missing.empty());
}
