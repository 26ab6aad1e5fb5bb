#pragma once

#include <cstdint>
#include <functional>

namespace rmt {

// Worker count: the RMT_WORKERS environment variable when set (must parse as
// a positive integer, else ConfigError), otherwise the hardware concurrency.
// Read on every call so tests can toggle the variable inside one process.
int worker_count();

// Runs body(block_index, begin, end) over the blocks of [0, total) split into
// fixed-size chunks, distributed over worker_count() threads via an atomic
// block counter.
//
// Reproducibility contract: the block layout is a pure function of (total,
// block_size); workers race only for *which* thread runs a block, never for
// what a block contains. Callers must write results into per-block slots and
// reduce them in block order afterwards — with that pattern the output is
// bit-identical for every worker count and scheduling.
//
// Exceptions thrown by body are captured and rethrown (first one wins) after
// all workers join.
void run_blocked(std::int64_t total, std::int64_t block_size,
                 const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& body);

// Number of blocks run_blocked will use for the given arguments.
std::int64_t block_count(std::int64_t total, std::int64_t block_size);

}  // namespace rmt
