#include <gtest/gtest.h>

#include <atomic>
#include <stdexcept>
#include <vector>

#include "ivtf/parallel.hpp"

using namespace ivtf;

TEST(Parallel, EveryIndexRunsOnce)
{
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i].fetch_add(1); });
    for (const auto& h : hits)
        EXPECT_EQ(h.load(), 1);
}

TEST(Parallel, ExceptionsPropagate)
{
    EXPECT_THROW(parallel_for(100, 3,
                              [](std::size_t i) {
                                  if (i == 57)
                                      throw std::runtime_error("boom");
                              }),
                 std::runtime_error);
}

TEST(Parallel, ZeroThreadsMeansHardware)
{
    EXPECT_GE(resolve_threads(0), 1u);
    EXPECT_EQ(resolve_threads(3), 3u);
    parallel_for(0, 2, [](std::size_t) { FAIL(); });
}
