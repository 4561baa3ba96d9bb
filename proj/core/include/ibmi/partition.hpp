#pragma once

#include <cstddef>
#include <filesystem>
#include <string_view>
#include <vector>

#include "ibmi/matrix.hpp"

namespace ibmi {

enum class Ordering { CONTIGUOUS, RED_BLACK, CUSTOM };

struct Partition {
  std::size_t p = 0;
  std::vector<IndexList> sets;
  double overlap_fraction = 0.0;
  Ordering ordering = Ordering::CUSTOM;

  std::size_t k() const noexcept { return sets.size(); }
};

// Base blocks of m = floor(p/k) (last block takes the remainder); each block
// is widened by h = round(f*m) into each neighbour.
Partition contiguous_partition(std::size_t p, std::size_t k, double overlap_fraction);

// Two disjoint sets: even positions first, odd positions second.
Partition red_black_partition(std::size_t p);

// Ascending indices of {0..p-1} not in sets[j].
IndexList complement(const Partition& part, std::size_t j);

// Throws UncoveredIndices, DuplicateWithinSet, IndexOutOfRange or
// InvalidArgument (fewer than two sets).
void validate(const Partition& part);

// {"p": int, "sets": [[int, ...], ...]}; the result is validated.
Partition partition_from_json(std::string_view text);
Partition load_partition(const std::filesystem::path& path);

std::string_view to_string(Ordering ordering);

}  // namespace ibmi
