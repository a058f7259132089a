#include "wallforge/pool.hpp"

#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <vector>

using namespace wallforge;

TEST_SUITE("pool") {

TEST_CASE("every index runs exactly once") {
  for (std::size_t workers : {1u, 2u, 4u}) {
    std::vector<int> hits(100, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, workers);
    for (int h : hits) CHECK(h == 1);
  }
  parallel_for(0, [](std::size_t) { FAIL("no tasks expected"); }, 3);
}

TEST_CASE("lowest failing index is rethrown after all tasks finish") {
  std::atomic<int> done{0};
  try {
    parallel_for(20, [&](std::size_t i) {
      ++done;
      if (i == 7 || i == 13) throw std::runtime_error("task " + std::to_string(i));
    }, 3);
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "task 7");
  }
  CHECK(done == 20);
}

TEST_CASE("WALLFORGE_THREADS bounds the worker count") {
  setenv("WALLFORGE_THREADS", "3", 1);
  CHECK(worker_count() == 3);
  setenv("WALLFORGE_THREADS", "zero", 1);
  CHECK(worker_count() >= 1);
  unsetenv("WALLFORGE_THREADS");
  CHECK(worker_count() >= 1);
}

}  // TEST_SUITE
