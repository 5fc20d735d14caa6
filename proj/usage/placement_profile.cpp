// Start-position distributions of every segment, as CSV for plotting.
//   placement_profile [n] [length ...]      defaults: 100 1 5 10 15

#include <cstdio>
#include <cstdlib>
#include <vector>

#include "seqagree/seqagree.hpp"

int main(int argc, char** argv) {
  std::size_t n = 100;
  std::vector<std::size_t> lengths = {1, 5, 10, 15};
  if (argc > 1) n = std::strtoul(argv[1], nullptr, 10);
  if (argc > 2) {
    lengths.clear();
    for (int i = 2; i < argc; ++i) lengths.push_back(std::strtoul(argv[i], nullptr, 10));
  }
  try {
    const auto dists = seqagree::location_distributions(seqagree::SequenceSpec(n), seqagree::SegmentProfile(lengths));
    std::printf("length,start,probability\n");
    for (const auto& d : dists)
      for (std::size_t l = 1; l <= d.support_size(); ++l) std::printf("%zu,%zu,%.10g\n", d.segment_length, l, d.at(l));
  } catch (const seqagree::Error& e) {
    std::fprintf(stderr, "placement_profile: %s\n", e.what());
    return 1;
  }
}
