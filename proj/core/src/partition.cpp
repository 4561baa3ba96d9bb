#include "ibmi/partition.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ibmi {

Partition contiguous_partition(std::size_t p, std::size_t k, double overlap_fraction) {
  if (!(overlap_fraction >= 0.0 && overlap_fraction < 0.5))
    throw InvalidOverlap("overlap fraction must lie in [0, 0.5)");
  if (k < 2) throw TooManyBlocks("need at least two blocks");
  if (p < 2 * k) throw TooManyBlocks("p must be at least 2k");
  const std::size_t m = p / k;
  const auto h = static_cast<std::size_t>(std::llround(overlap_fraction * static_cast<double>(m)));
  if (h >= m) throw TooManyBlocks("overlap depth must be smaller than the block size");

  Partition part;
  part.p = p;
  part.overlap_fraction = overlap_fraction;
  part.ordering = Ordering::CONTIGUOUS;
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t lo = j * m;
    const std::size_t hi = (j + 1 == k) ? p : lo + m;
    const std::size_t first = j == 0 ? lo : lo - h;
    const std::size_t last = j + 1 == k ? hi : hi + h;
    if (last > p) throw TooManyBlocks("set extends past p");
    IndexList set(last - first);
    for (std::size_t i = 0; i < set.size(); ++i) set[i] = first + i;
    part.sets.push_back(std::move(set));
  }
  return part;
}

Partition red_black_partition(std::size_t p) {
  if (p < 4) throw InvalidArgument("red_black_partition needs p >= 4");
  Partition part;
  part.p = p;
  part.ordering = Ordering::RED_BLACK;
  part.sets.resize(2);
  for (std::size_t i = 0; i < p; ++i) part.sets[i % 2].push_back(i);
  return part;
}

IndexList complement(const Partition& part, std::size_t j) {
  if (j >= part.sets.size()) throw IndexOutOfRange("set index " + std::to_string(j));
  std::vector<char> in(part.p, 0);
  for (std::size_t i : part.sets[j]) {
    if (i >= part.p) throw IndexOutOfRange("index " + std::to_string(i) + " >= p");
    in[i] = 1;
  }
  IndexList out;
  out.reserve(part.p);
  for (std::size_t i = 0; i < part.p; ++i)
    if (!in[i]) out.push_back(i);
  return out;
}

void validate(const Partition& part) {
  if (part.sets.size() < 2) throw InvalidArgument("a partition needs at least two sets");
  std::vector<char> covered(part.p, 0);
  std::vector<std::size_t> seen_in(part.p, static_cast<std::size_t>(-1));
  for (std::size_t s = 0; s < part.sets.size(); ++s) {
    if (part.sets[s].empty()) throw InvalidArgument("set " + std::to_string(s) + " is empty");
    for (std::size_t i : part.sets[s]) {
      if (i >= part.p) throw IndexOutOfRange("index " + std::to_string(i) + " >= p");
      if (seen_in[i] == s)
        throw DuplicateWithinSet("index " + std::to_string(i) + " repeated in set " + std::to_string(s));
      seen_in[i] = s;
      covered[i] = 1;
    }
  }
  IndexList missing;
  for (std::size_t i = 0; i < part.p; ++i)
    if (!covered[i]) missing.push_back(i);
  if (!missing.empty()) throw UncoveredIndices(std::move(missing));
}

Partition partition_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("partition JSON: ") + e.what());
  }
  Partition part;
  part.ordering = Ordering::CUSTOM;
  try {
    part.p = j.at("p").get<std::size_t>();
    for (const auto& s : j.at("sets")) {
      IndexList set = s.get<IndexList>();
      std::sort(set.begin(), set.end());
      part.sets.push_back(std::move(set));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("partition JSON: ") + e.what());
  }
  validate(part);
  return part;
}

Partition load_partition(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return partition_from_json(buf.str());
}

std::string_view to_string(Ordering ordering) {
  switch (ordering) {
    case Ordering::CONTIGUOUS: return "contiguous";
    case Ordering::RED_BLACK: return "red-black";
    case Ordering::CUSTOM: return "custom";
  }
  return "?";
}

}  // namespace ibmi
